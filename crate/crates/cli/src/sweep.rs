//! Deterministic scaling sweeps over the pulse-sequence experiments, with
//! CSV output carrying a config hash, the seed, and fitted slopes.

use crate::config::ExperimentConfig;
use anyhow::{Context, Result};
use decofree::dd::{
    cdd, decoupling_error, fit_loglog_slope, hybrid_ddfs_two_qubit, real_pulse_error_scan,
    simulate, xy4, PulseEvent, PulseSequence,
};
use decofree::algebra::klein_group;
use decofree::linalg::TensorLayout;
use decofree::models::{build_model, HamiltonianModel};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct SweepRow {
    /// Concatenation level for CDD groups, pulse width for real-pulse rows,
    /// free-segment duration otherwise.
    pub m_or_tau: f64,
    pub system_error: f64,
    pub bath_distance: f64,
    pub t_total: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    /// `# key=value` provenance lines.
    pub header: Vec<String>,
    pub rows: Vec<(Option<String>, SweepRow)>,
    /// Trailing `# key=value` lines (fitted slopes).
    pub footer: Vec<String>,
}

const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("m_or_tau,system_error,bath_distance,T_total,seed\n");
        for (comment, r) in &self.rows {
            if let Some(cmt) = comment {
                out.push_str(&format!("# {cmt}\n"));
            }
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                num(r.m_or_tau),
                num(r.system_error),
                num(r.bath_distance),
                num(r.t_total),
                r.seed
            ));
        }
        for line in &self.footer {
            out.push_str(&format!("# {line}\n"));
        }
        out
    }
}

fn free_sequence(tau: f64) -> PulseSequence {
    PulseSequence {
        name: "free".into(),
        level: 0,
        events: vec![PulseEvent::Free(tau)],
    }
}

fn measure(
    model: &HamiltonianModel,
    layout: &TensorLayout,
    seq: &PulseSequence,
    code: Option<&decofree::codes::CodeSpace>,
) -> Result<(f64, f64, f64)> {
    let u = simulate(seq, model)?;
    let t = seq.total_duration();
    let rep = decoupling_error(&u, t, layout, code)?;
    Ok((rep.system_error, rep.bath_distance, t))
}

/// Runs the configured experiment. `raw_config` is the config file text,
/// hashed into the provenance header so identical configs produce
/// byte-identical output.
pub fn run_sweep(cfg: &ExperimentConfig, raw_config: &str) -> Result<SweepResult> {
    let seed = cfg.model.seed;
    let model = build_model(
        cfg.template()?,
        cfg.model.n_qubits,
        cfg.model.bath_dim,
        cfg.model.j,
        cfg.model.beta,
        seed,
    )?;
    let layout = TensorLayout::new(vec![model.system_dim(), model.bath_dim]);
    let hash = hex(&Sha256::digest(raw_config.as_bytes()));
    let header = vec![
        format!("config_hash={hash} seed={seed}"),
        format!("artifact_version={ARTIFACT_VERSION} experiment={}", cfg.experiment),
    ];
    let mut rows: Vec<(Option<String>, SweepRow)> = Vec::new();
    let mut footer = Vec::new();
    let row = |m_or_tau: f64, (err, dist, t): (f64, f64, f64)| SweepRow {
        m_or_tau,
        system_error: err,
        bath_distance: dist,
        t_total: t,
        seed,
    };

    match cfg.experiment.as_str() {
        "free" => {
            let mut pts = Vec::new();
            for &tau in &cfg.grid.taus {
                let m = measure(&model, &layout, &free_sequence(tau), None)?;
                pts.push((tau, m.0));
                rows.push((None, row(tau, m)));
            }
            push_slope(&mut footer, "slope", &pts);
        }
        "xy4" => {
            let mut pts = Vec::new();
            for &tau in &cfg.grid.taus {
                let m = measure(&model, &layout, &xy4(tau, true, 0.0, 0.0)?, None)?;
                pts.push((tau, m.0));
                rows.push((None, row(tau, m)));
            }
            push_slope(&mut footer, "slope", &pts);
        }
        "cdd" => {
            let group = klein_group();
            for &m_level in &cfg.grid.ms {
                let mut pts = Vec::new();
                let mut first = true;
                for &tau in &cfg.grid.taus {
                    let seq = cdd(&group, m_level, tau)?;
                    let m = measure(&model, &layout, &seq, None)?;
                    pts.push((tau, m.0));
                    let cmt = first.then(|| format!("m={m_level}"));
                    first = false;
                    rows.push((cmt, row(tau, m)));
                }
                push_slope(&mut footer, &format!("slope_m{m_level}"), &pts);
            }
        }
        "hybrid" => {
            let mut pts = Vec::new();
            for &tau in &cfg.grid.taus {
                let h = hybrid_ddfs_two_qubit(tau);
                let m = measure(&model, &layout, &h.u3, Some(&h.code))?;
                pts.push((tau, m.0));
                rows.push((None, row(tau, m)));
            }
            push_slope(&mut footer, "slope", &pts);
        }
        "real_pulse" => {
            let tau = cfg.grid.taus[0];
            let scan = real_pulse_error_scan(&model, tau, &cfg.grid.deltas)?;
            let mut pts = Vec::new();
            for r in &scan.rows {
                pts.push((r.delta, (r.system_error - scan.ideal_error).abs()));
                rows.push((
                    None,
                    SweepRow {
                        m_or_tau: r.delta,
                        system_error: r.system_error,
                        bath_distance: r.bath_distance,
                        t_total: 4.0 * tau,
                        seed,
                    },
                ));
            }
            footer.push(format!("ideal_error={}", num(scan.ideal_error)));
            push_slope(&mut footer, "slope", &pts);
        }
        other => anyhow::bail!("unknown experiment {other:?}"),
    }
    Ok(SweepResult {
        header,
        rows,
        footer,
    })
}

fn push_slope(footer: &mut Vec<String>, label: &str, pts: &[(f64, f64)]) {
    match fit_loglog_slope(pts) {
        Some(s) => footer.push(format!("{label}={}", num(s))),
        None => footer.push(format!("{label}=nan")),
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses a config file's text and runs it, returning the CSV.
pub fn sweep_csv(raw_config: &str) -> Result<String> {
    let cfg = ExperimentConfig::parse(raw_config).context("invalid sweep config")?;
    Ok(run_sweep(&cfg, raw_config)?.to_csv())
}
