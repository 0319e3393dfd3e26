//! Small table model rendered as aligned text or CSV.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Text => {
                let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
                for r in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(r) {
                        *w = (*w).max(cell.len());
                    }
                }
                let fmt_row = |cells: &[String]| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                let mut out = fmt_row(&self.columns);
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&fmt_row(r));
                    out.push('\n');
                }
                out
            }
        }
    }
}

/// 17-significant-digit float formatting shared by every emitter.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut t = Table::new(&["a", "bb"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.render(Format::Csv), "a,bb\n1,2\n");
        assert_eq!(t.render(Format::Text), "a  bb\n1  2\n");
    }
}
