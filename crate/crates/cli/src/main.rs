use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use decofree::algebra::{
    collective_decoherence_generators, decompose, global_pauli_group, klein_group,
};
use decofree::codes::{
    dephasing_dfs_enumerate, dfs_check_hamiltonian, even_weight_stabilized_code, four_qubit_dfs,
    three_qubit_ns_code, CodeSpace, ColumnLabel,
};
use decofree::dd::{cdd, cdd_bound_and_optimum, symmetrize};
use decofree::models::{build_model, CouplingTemplate};
use decofree_cli::config::ExperimentConfig;
use decofree_cli::deutsch::deutsch_demo;
use decofree_cli::output::{num, Format as TableFormat, Table};
use decofree_cli::rates::{rate_table, RateModel};
use decofree_cli::sweep::run_sweep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "decofree",
    version,
    about = "Decoherence-free subspace, noiseless-subsystem, and dynamical-decoupling experiments"
)]
struct Cli {
    /// Seed for every randomized model.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Tolerance for structural checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Deutsch's problem through a dephasing channel.
    Deutsch {
        /// Dephasing probability in [0, 1].
        #[arg(long)]
        p: f64,
        /// Encode the query qubit into the two-qubit dephasing-free subspace.
        #[arg(long)]
        encoded: bool,
    },
    /// List the collective-dephasing-protected eigenspaces for n qubits.
    EnumerateDfs {
        #[arg(long)]
        n: usize,
    },
    /// Emit a code isometry in the shared matrix text format.
    BuildCode {
        /// four_qubit_dfs | three_qubit_ns | even_weight
        #[arg(long)]
        kind: String,
        /// Number of physical qubits (even_weight only).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Check a code file against a coupling model's Hamiltonian.
    CheckDfs {
        /// Code file produced by build-code.
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        template: String,
        #[arg(long, default_value_t = 2)]
        bath_dim: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Decompose the algebra generated by a coupling family into its
    /// multiplicity/irrep blocks.
    Decompose {
        /// A coupling template name, or global_pauli.
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: usize,
    },
    /// Print the group-symmetrization pulse sequence.
    Symmetrize {
        /// klein | global_pauli
        #[arg(long, default_value = "klein")]
        group: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        tau: f64,
    },
    /// Print a concatenated decoupling sequence.
    Cdd {
        #[arg(long, default_value = "klein")]
        group: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        tau: f64,
    },
    /// Run a configured scaling sweep and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact encoding-rate table with asymptotes.
    Rates {
        /// dephasing | decoherence
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1024)]
        max_n: usize,
    },
    /// Concatenation error-phase bound table and the optimal level.
    Bound {
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn table_format(cli: &Cli) -> TableFormat {
    match cli.format {
        OutFormat::Text => TableFormat::Text,
        OutFormat::Csv => TableFormat::Csv,
    }
}

fn pulse_group(name: &str, n: usize) -> Result<Vec<decofree::linalg::ComplexMatrix>> {
    match name {
        "klein" => Ok(klein_group()),
        "global_pauli" => Ok(global_pauli_group(n)),
        other => bail!("unknown group {other:?}; expected klein or global_pauli"),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Deutsch { p, encoded } => {
            let mut t = Table::new(&["function", "misidentification"]);
            for (name, miss) in deutsch_demo(*p, *encoded)? {
                t.push(vec![name, num(miss)]);
            }
            emit(cli, &t.render(table_format(cli)))?;
        }
        Cmd::EnumerateDfs { n } => {
            if *n == 0 || *n > 12 {
                bail!("n must lie in 1..=12");
            }
            let mut t = Table::new(&["c_z", "dim", "rate"]);
            for code in dephasing_dfs_enumerate(*n) {
                let cz = match code.labels()[0] {
                    ColumnLabel::Weight(w) => w,
                    _ => unreachable!("dephasing eigenspaces carry weight labels"),
                };
                let rate = (code.dim() as f64).log2() / *n as f64;
                t.push(vec![cz.to_string(), code.dim().to_string(), num(rate)]);
            }
            emit(cli, &t.render(table_format(cli)))?;
        }
        Cmd::BuildCode { kind, n } => {
            let code = match kind.as_str() {
                "four_qubit_dfs" => four_qubit_dfs(),
                "three_qubit_ns" => three_qubit_ns_code(),
                "even_weight" => {
                    let n = n.ok_or_else(|| anyhow!("even_weight needs --n"))?;
                    even_weight_stabilized_code(n)?
                }
                other => bail!(
                    "unknown code kind {other:?}; expected four_qubit_dfs, three_qubit_ns, or even_weight"
                ),
            };
            emit(cli, &code.to_text())?;
        }
        Cmd::CheckDfs {
            code,
            n,
            template,
            bath_dim,
            j,
            beta,
        } => {
            let text = std::fs::read_to_string(code)
                .with_context(|| format!("reading {}", code.display()))?;
            let code = CodeSpace::from_text(*n, &text)?;
            let template = CouplingTemplate::parse(template)
                .ok_or_else(|| anyhow!("unknown coupling template {template:?}"))?;
            let model = build_model(template, *n, *bath_dim, *j, *beta, cli.seed)?;
            let report = dfs_check_hamiltonian(&model, &code, cli.tol)?;
            let mut t = Table::new(&["coupling", "c_alpha_re", "c_alpha_im", "residual"]);
            for (i, (ca, r)) in report
                .c_alphas
                .iter()
                .zip(&report.coupling_residuals)
                .enumerate()
            {
                t.push(vec![i.to_string(), num(ca.re), num(ca.im), num(*r)]);
            }
            let mut out = t.render(table_format(cli));
            out.push_str(&format!("system_leakage {}\n", num(report.system_leakage)));
            out.push_str(&format!("ok {}\n", report.ok));
            emit(cli, &out)?;
            if !report.ok {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Decompose { model, n } => {
            let generators = match model.as_str() {
                "global_pauli" => global_pauli_group(*n),
                "collective_decoherence" => collective_decoherence_generators(*n),
                other => CouplingTemplate::parse(other)
                    .ok_or_else(|| anyhow!("unknown model {other:?}"))?
                    .system_operators(*n),
            };
            let dec = decompose(&generators, cli.seed)?;
            let mut blocks: Vec<_> = dec.blocks.iter().map(|b| (b.n_j, b.d_j)).collect();
            blocks.sort_by_key(|&(n_j, d_j)| (d_j, n_j));
            let rendered: Vec<String> =
                blocks.iter().map(|(n_j, d_j)| format!("({n_j},{d_j})")).collect();
            emit(cli, &format!("blocks {}\n", rendered.join(",")))?;
        }
        Cmd::Symmetrize { group, n, tau } => {
            let seq = symmetrize(&pulse_group(group, *n)?, *tau)?;
            emit(cli, &seq.to_text())?;
        }
        Cmd::Cdd {
            group,
            n,
            level,
            tau,
        } => {
            let seq = cdd(&pulse_group(group, *n)?, *level, *tau)?;
            emit(cli, &seq.to_text())?;
        }
        Cmd::Sweep { config } => {
            let raw = std::fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&raw)?;
            let csv = run_sweep(&cfg, &raw)?.to_csv();
            match (&cli.out, &cfg.out) {
                (Some(_), _) => emit(cli, &csv)?,
                (None, Some(path)) => std::fs::write(path, &csv)
                    .with_context(|| format!("writing {path}"))?,
                (None, None) => print!("{csv}"),
            }
        }
        Cmd::Rates { model, max_n } => {
            let model = RateModel::parse(model)
                .ok_or_else(|| anyhow!("unknown rate model {model:?}"))?;
            let mut t = Table::new(&["N", "dim", "rate", "asymptote"]);
            for r in rate_table(*max_n, model)? {
                t.push(vec![
                    r.n.to_string(),
                    r.dim.to_string(),
                    num(r.rate),
                    num(r.asymptote),
                ]);
            }
            emit(cli, &t.render(table_format(cli)))?;
        }
        Cmd::Bound {
            j,
            beta,
            tau,
            m_max,
        } => {
            if *tau <= 0.0 || *m_max == 0 {
                bail!("bound needs tau > 0 and m_max ≥ 1");
            }
            let table = cdd_bound_and_optimum(*j, *beta, *tau, *m_max);
            let mut t = Table::new(&["m", "T_m", "phi_bound"]);
            for r in &table.rows {
                t.push(vec![r.m.to_string(), num(r.t_m), num(r.phi_bound)]);
            }
            let mut out = t.render(table_format(cli));
            out.push_str(&format!("m_opt {}\n", num(table.m_opt)));
            out.push_str(&format!("m_opt_floor {}\n", table.m_opt_floor));
            out.push_str(&format!("concatenate {}\n", table.concatenate));
            emit(cli, &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
