//! Dynamical decoupling: pulse-sequence construction and simulation, the
//! XY-4 cycle, group symmetrization, concatenated decoupling (CDD), a hybrid
//! sequence over the two-qubit dephasing-free subspace, and the error
//! metrics used to quantify all of them.
//!
//! Sequences store events in time order: the first list element is applied
//! first. A formula like Zf Xf Zf Xf therefore becomes the event list
//! [f, X, f, Z, f, X, f, Z].

use crate::algebra::{check_group_closure, AlgebraError};
use crate::codes::{CodeSpace, ColumnLabel};
use crate::linalg::{
    distance_up_to_global_phase, expm_skew_hermitian, logm_unitary, op_norm, partial_trace,
    paulis, tensor, ComplexMatrix, LinalgError, TensorLayout, C64,
};
use crate::models::{total_hamiltonian, HamiltonianModel, ModelError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DdError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("real pulses require delta·lambda = π/2, got {0}")]
    BadPulseArea(f64),
    #[error("concatenation level must be ≥ 1")]
    BadLevel,
    #[error("sequence file: {0}")]
    Parse(String),
    #[error("unknown pulse name {0:?}")]
    UnknownPulse(String),
    #[error(transparent)]
    Group(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, DdError>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug)]
pub enum PulseEvent {
    /// Free evolution under the full joint Hamiltonian for the duration.
    Free(f64),
    /// Instantaneous system unitary g ⊗ I_B.
    Ideal { name: String, unitary: ComplexMatrix },
    /// Finite-width pulse: evolve under control ⊗ I_B + H for the width.
    Real {
        name: String,
        control: ComplexMatrix,
        width: f64,
    },
}

#[derive(Clone, Debug)]
pub struct PulseSequence {
    pub name: String,
    /// Concatenation level for CDD-built sequences, 0 otherwise.
    pub level: usize,
    pub events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn total_duration(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Free(t) => *t,
                PulseEvent::Ideal { .. } => 0.0,
                PulseEvent::Real { width, .. } => *width,
            })
            .sum()
    }

    pub fn free_segment_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, PulseEvent::Free(_)))
            .count()
    }

    /// One event per line: `free <tau>`, `pulse <name>`, `realpulse <name> <delta>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            match e {
                PulseEvent::Free(t) => out.push_str(&format!("free {t:.16e}\n")),
                PulseEvent::Ideal { name, .. } => out.push_str(&format!("pulse {name}\n")),
                PulseEvent::Real { name, width, .. } => {
                    out.push_str(&format!("realpulse {name} {width:.16e}\n"))
                }
            }
        }
        out
    }

    /// Parses the text format; pulse names are resolved against the given
    /// table. A real pulse's control is the table unitary's generator scaled
    /// to area π/2, matching the constant-amplitude convention.
    pub fn from_text(name: &str, text: &str, pulse_table: &[(String, ComplexMatrix)]) -> Result<Self> {
        let lookup = |pulse: &str| -> Result<ComplexMatrix> {
            pulse_table
                .iter()
                .find(|(n, _)| n == pulse)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| DdError::UnknownPulse(pulse.to_string()))
        };
        let mut events = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| DdError::Parse(format!("line {}: {msg}", lineno + 1));
            match fields[0] {
                "free" => {
                    let t: f64 = fields
                        .get(1)
                        .ok_or_else(|| bad("missing duration"))?
                        .parse()
                        .map_err(|_| bad("bad duration"))?;
                    events.push(PulseEvent::Free(t));
                }
                "pulse" => {
                    let pname = fields.get(1).ok_or_else(|| bad("missing pulse name"))?;
                    events.push(PulseEvent::Ideal {
                        name: pname.to_string(),
                        unitary: lookup(pname)?,
                    });
                }
                "realpulse" => {
                    let pname = fields.get(1).ok_or_else(|| bad("missing pulse name"))?;
                    let width: f64 = fields
                        .get(2)
                        .ok_or_else(|| bad("missing width"))?
                        .parse()
                        .map_err(|_| bad("bad width"))?;
                    let unitary = lookup(pname)?;
                    let generator = logm_unitary(&unitary)?;
                    events.push(PulseEvent::Real {
                        name: pname.to_string(),
                        control: generator.scale_re(1.0 / width),
                        width,
                    });
                }
                other => return Err(bad(&format!("unknown event {other:?}"))),
            }
        }
        Ok(PulseSequence {
            name: name.to_string(),
            level: 0,
            events,
        })
    }
}

/// Total joint unitary of a sequence: events applied in list order, so the
/// product is U = U_last ⋯ U_first.
pub fn simulate(seq: &PulseSequence, model: &HamiltonianModel) -> Result<ComplexMatrix> {
    let d = model.total_dim();
    let h = total_hamiltonian(model);
    let ib = ComplexMatrix::identity(model.bath_dim);
    let mut u = ComplexMatrix::identity(d);
    for e in &seq.events {
        let step = match e {
            PulseEvent::Free(t) => expm_skew_hermitian(&h, *t)?,
            PulseEvent::Ideal { unitary, .. } => {
                if unitary.rows() != model.system_dim() {
                    return Err(DdError::DimensionMismatch(format!(
                        "pulse dim {} vs system dim {}",
                        unitary.rows(),
                        model.system_dim()
                    )));
                }
                tensor(unitary, &ib)
            }
            PulseEvent::Real { control, width, .. } => {
                if control.rows() != model.system_dim() {
                    return Err(DdError::DimensionMismatch(format!(
                        "control dim {} vs system dim {}",
                        control.rows(),
                        model.system_dim()
                    )));
                }
                let gen = &tensor(control, &ib) + &h;
                expm_skew_hermitian(&gen, *width)?
            }
        };
        u = &step * &u;
    }
    Ok(u)
}

fn ideal(name: &str, unitary: ComplexMatrix) -> PulseEvent {
    PulseEvent::Ideal {
        name: name.to_string(),
        unitary,
    }
}

/// The universal single-qubit cycle Zf_τ Xf_τ Zf_τ Xf_τ. With `ideal` false,
/// pulses become constant-amplitude σ-rotations of width `delta` and strength
/// `lambda_strength`, which must satisfy δλ = π/2.
pub fn xy4(tau: f64, ideal_pulses: bool, delta: f64, lambda_strength: f64) -> Result<PulseSequence> {
    let mut events = Vec::new();
    for pulse in ["X", "Z", "X", "Z"] {
        events.push(PulseEvent::Free(tau));
        if ideal_pulses {
            let u = match pulse {
                "X" => paulis::x(),
                _ => paulis::z(),
            };
            events.push(ideal(pulse, u));
        } else {
            let area = delta * lambda_strength;
            if (area - std::f64::consts::FRAC_PI_2).abs() > 1e-12 {
                return Err(DdError::BadPulseArea(area));
            }
            let gen = match pulse {
                "X" => paulis::x(),
                _ => paulis::z(),
            };
            events.push(PulseEvent::Real {
                name: pulse.to_string(),
                control: gen.scale_re(lambda_strength),
                width: delta,
            });
        }
    }
    Ok(PulseSequence {
        name: if ideal_pulses { "xy4" } else { "xy4-real" }.to_string(),
        level: 1,
        events,
    })
}

/// Canonicalizes a pulse unitary against the group: returns the index of the
/// element it matches up to a global phase, if any.
fn match_in_group(u: &ComplexMatrix, group: &[ComplexMatrix]) -> Option<usize> {
    group
        .iter()
        .enumerate()
        .filter_map(|(i, g)| distance_up_to_global_phase(u, g).ok().map(|d| (i, d)))
        .filter(|&(_, d)| d < 1e-8)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Merges adjacent Ideal pulses into single events, canonicalized to group
/// representatives with phases discarded; pulses proportional to the
/// identity are dropped.
fn merge_ideal_pulses(events: Vec<PulseEvent>, group: &[ComplexMatrix]) -> Vec<PulseEvent> {
    let names: Vec<String> = (0..group.len()).map(|i| canonical_name(&group[i], i)).collect();
    let mut out: Vec<PulseEvent> = Vec::with_capacity(events.len());
    for e in events {
        let (name, unitary) = match e {
            PulseEvent::Ideal { name, unitary } => (name, unitary),
            other => {
                out.push(other);
                continue;
            }
        };
        // Time order: an earlier trailing pulse acts first, so combine as new·prev.
        let (combined, combined_name) = match out.last() {
            Some(PulseEvent::Ideal {
                unitary: prev,
                name: pname,
            }) => {
                let c = &unitary * prev;
                let n = format!("{name}{pname}");
                out.pop();
                (c, n)
            }
            _ => (unitary, name),
        };
        let (cname, cu) = match match_in_group(&combined, group) {
            Some(i) => (names[i].clone(), group[i].clone()),
            None => (combined_name, combined),
        };
        if distance_up_to_global_phase(&cu, &ComplexMatrix::identity(cu.rows()))
            .map(|d| d < 1e-8)
            .unwrap_or(false)
        {
            continue; // identity pulse: drop entirely
        }
        out.push(PulseEvent::Ideal {
            name: cname,
            unitary: cu,
        });
    }
    out
}

/// Readable name for a group element: a Pauli string when it matches one up
/// to phase, otherwise a positional label.
fn canonical_name(u: &ComplexMatrix, index: usize) -> String {
    let d = u.rows();
    let n = (d as f64).log2().round() as usize;
    if 1 << n == d && n <= 4 {
        for (axes, m) in paulis::all_strings(n) {
            if distance_up_to_global_phase(u, &m).map(|x| x < 1e-10).unwrap_or(false) {
                return axes
                    .iter()
                    .map(|a| ["I", "X", "Y", "Z"][*a as usize])
                    .collect::<String>();
            }
        }
    }
    format!("g{index}")
}

/// Symmetrization cycle U(T) = Π_j g_j† f_τ g_j over a closed group with
/// g₀ = I, as a pulse sequence with merged inter-segment pulses;
/// T = |G|·τ.
pub fn symmetrize(group: &[ComplexMatrix], tau: f64) -> Result<PulseSequence> {
    check_group_closure(group)?;
    let mut events = Vec::new();
    for g in group {
        // Time order within one factor g† f g: pulse g, free, pulse g†.
        events.push(ideal("g", g.clone()));
        events.push(PulseEvent::Free(tau));
        events.push(ideal("g'", g.dagger()));
    }
    let events = merge_ideal_pulses(events, group);
    Ok(PulseSequence {
        name: "symmetrize".to_string(),
        level: 1,
        events,
    })
}

/// Concatenated decoupling: level 1 is the symmetrization cycle; level m
/// conjugates level m−1 by each group element in turn. Adjacent pulses are
/// merged, so the sequence has exactly |G|^m free segments and duration
/// |G|^m·τ.
pub fn cdd(base_group: &[ComplexMatrix], level: usize, tau: f64) -> Result<PulseSequence> {
    if level < 1 {
        return Err(DdError::BadLevel);
    }
    check_group_closure(base_group)?;
    let mut events: Vec<PulseEvent> = vec![PulseEvent::Free(tau)];
    for _ in 0..level {
        let mut next = Vec::new();
        for g in base_group {
            next.push(ideal("g", g.clone()));
            next.extend(events.iter().cloned());
            next.push(ideal("g'", g.dagger()));
        }
        events = merge_ideal_pulses(next, base_group);
    }
    Ok(PulseSequence {
        name: format!("cdd-{level}"),
        level,
        events,
    })
}

/// Error figures extracted from a total joint unitary.
///
/// The effective Hamiltonian is measured relative to the best pure-bath
/// rotation V*: H_rel = log[(I⊗V*)† U], which keeps every eigenphase small
/// and hence principal-branch safe; multiplying by a system-identity factor
/// leaves the non-identity system-Pauli components untouched to first order.
#[derive(Clone, Debug)]
pub struct DecouplingErrorReport {
    pub total_unitary: ComplexMatrix,
    /// (1/T)·H_rel — the effective Hamiltonian rate relative to V*.
    pub effective_h: ComplexMatrix,
    /// Dimensionless error phase: Σ_{α≠I} ‖B_α‖ over the system-Pauli
    /// expansion H_rel = Σ_α P_α ⊗ B_α (not divided by T).
    pub system_error: f64,
    /// system_error / T.
    pub system_error_rate: f64,
    /// ‖U − I⊗V*‖ for the optimal pure-bath V*.
    pub bath_distance: f64,
}

/// Expands a joint operator as h = Σ_α P_α ⊗ B_α over the system Pauli
/// strings; returns (axes, B_α) pairs with B_α = Tr_S[(P_α ⊗ I)h]/2ⁿ.
pub fn system_pauli_components(
    h: &ComplexMatrix,
    n_sys_qubits: usize,
    bath_dim: usize,
) -> Result<Vec<(Vec<u8>, ComplexMatrix)>> {
    let ds = 1usize << n_sys_qubits;
    if h.rows() != ds * bath_dim {
        return Err(DdError::DimensionMismatch(format!(
            "operator dim {} vs {}·{}",
            h.rows(),
            ds,
            bath_dim
        )));
    }
    let layout = TensorLayout::new(vec![ds, bath_dim]);
    let ib = ComplexMatrix::identity(bath_dim);
    let mut out = Vec::new();
    for (axes, p) in paulis::all_strings(n_sys_qubits) {
        let m = &tensor(&p.dagger(), &ib) * h;
        let b = partial_trace(&m, &layout, &[1])?.scale_re(1.0 / ds as f64);
        out.push((axes, b));
    }
    Ok(out)
}

/// Computes the decoupling error figures for a total joint unitary over
/// duration T. When a code is given, U is first compressed to the code
/// block (nearest unitary via the polar factor) and the expansion runs over
/// the logical Pauli basis instead, so only within-code errors count.
pub fn decoupling_error(
    u: &ComplexMatrix,
    t: f64,
    layout: &TensorLayout,
    code: Option<&CodeSpace>,
) -> Result<DecouplingErrorReport> {
    let dims = layout.factor_dims();
    let bath_dim = *dims.last().expect("layout has factors");
    let sys_dim: usize = dims[..dims.len() - 1].iter().product();
    if u.rows() != sys_dim * bath_dim {
        return Err(DdError::DimensionMismatch(format!(
            "unitary dim {} vs layout dim {}",
            u.rows(),
            sys_dim * bath_dim
        )));
    }
    let (working, n_qubits_eff) = match code {
        None => {
            let n = (sys_dim as f64).log2().round() as usize;
            (u.clone(), n)
        }
        Some(cs) => {
            let p = cs.isometry();
            if p.rows() != sys_dim {
                return Err(DdError::DimensionMismatch(format!(
                    "code physical dim {} vs system dim {}",
                    p.rows(),
                    sys_dim
                )));
            }
            let piso = tensor(p, &ComplexMatrix::identity(bath_dim));
            let compressed = &(&piso.dagger() * u) * &piso;
            let n = (cs.dim() as f64).log2().round() as usize;
            if 1usize << n != cs.dim() {
                return Err(DdError::DimensionMismatch(
                    "code dimension must be a power of two".into(),
                ));
            }
            (compressed.polar_unitary()?, n)
        }
    };
    let ds = 1usize << n_qubits_eff;
    let wl = TensorLayout::new(vec![ds, bath_dim]);
    // Optimal pure-bath factor: polar part of the system-trace.
    let traced = partial_trace(&working, &wl, &[1])?.scale_re(1.0 / ds as f64);
    let v_star = traced.polar_unitary()?;
    let reference = tensor(&ComplexMatrix::identity(ds), &v_star);
    let bath_distance = op_norm(&(&working - &reference));
    let u_rel = &reference.dagger() * &working;
    let h_rel = logm_unitary(&u_rel)?;
    let mut system_error = 0.0;
    for (axes, b) in system_pauli_components(&h_rel, n_qubits_eff, bath_dim)? {
        if axes.iter().any(|&a| a != 0) {
            system_error += op_norm(&b);
        }
    }
    Ok(DecouplingErrorReport {
        total_unitary: u.clone(),
        effective_h: h_rel.scale_re(1.0 / t),
        system_error,
        system_error_rate: system_error / t,
        bath_distance,
    })
}

/// One row of a pulse-width scan.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub delta: f64,
    pub system_error: f64,
    pub bath_distance: f64,
}

/// XY-4 with finite-width pulses (λ = π/(2δ) per row) at fixed τ, plus the
/// ideal-pulse baseline in `ideal_error`.
pub struct RealPulseScan {
    pub tau: f64,
    pub ideal_error: f64,
    pub rows: Vec<ScanRow>,
}

pub fn real_pulse_error_scan(
    model: &HamiltonianModel,
    tau: f64,
    deltas: &[f64],
) -> Result<RealPulseScan> {
    let layout = TensorLayout::new(vec![model.system_dim(), model.bath_dim]);
    let ideal_seq = xy4(tau, true, 0.0, 0.0)?;
    let ideal_u = simulate(&ideal_seq, model)?;
    let ideal_error = decoupling_error(&ideal_u, 4.0 * tau, &layout, None)?.system_error;
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let lambda = std::f64::consts::FRAC_PI_2 / delta;
        let seq = xy4(tau, false, delta, lambda)?;
        let u = simulate(&seq, model)?;
        let t = seq.total_duration();
        let rep = decoupling_error(&u, t, &layout, None)?;
        rows.push(ScanRow {
            delta,
            system_error: rep.system_error,
            bath_distance: rep.bath_distance,
        });
    }
    Ok(RealPulseScan {
        tau,
        ideal_error,
        rows,
    })
}

/// How a physical error operator acts on a code space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Acts as a multiple of identity on the code — harmless.
    Unchanged,
    /// Preserves the code but acts nontrivially inside it.
    Logical,
    /// Maps code states outside the code space.
    Leakage,
}

impl std::fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ErrorClass::Unchanged => "unchanged",
            ErrorClass::Logical => "logical",
            ErrorClass::Leakage => "leakage",
        };
        write!(f, "{s}")
    }
}

/// Classifies an operator against a code: leakage if it maps the code out of
/// itself, unchanged if its code block is ∝ a phase, logical otherwise.
pub fn classify_against_code(op: &ComplexMatrix, code: &CodeSpace, tol: f64) -> ErrorClass {
    let p = code.isometry();
    let q = code.complement();
    let leak = op_norm(&(&q.dagger() * &(op * p)));
    if leak > tol {
        return ErrorClass::Leakage;
    }
    let block = &p.dagger() * &(op * p);
    let d = code.dim() as f64;
    let phase = block.trace() / c(d, 0.0);
    let residual = (&block - &ComplexMatrix::identity(code.dim()).scale(phase)).max_abs_entry();
    if residual < tol && (phase.norm() - 1.0).abs() < tol {
        ErrorClass::Unchanged
    } else {
        ErrorClass::Logical
    }
}

/// The hybrid construction over the two-qubit dephasing-free subspace
/// Span{|01⟩, |10⟩}: encoded pulses, the three nested sequences, and the
/// classification of all 16 two-qubit Pauli strings.
pub struct HybridDdfs {
    pub code: CodeSpace,
    /// σ̄ˣ = (σˣσˣ + σʸσʸ)/2 — the encoded X observable.
    pub sigma_x_bar: ComplexMatrix,
    /// σ̄ᶻ = (σᶻ₁ − σᶻ₂)/2 — the encoded Z observable.
    pub sigma_z_bar: ComplexMatrix,
    pub u1: PulseSequence,
    pub u2: PulseSequence,
    pub u3: PulseSequence,
    /// (Pauli-string name, class) for all 16 two-qubit strings.
    pub classification: Vec<(String, ErrorClass)>,
}

pub fn hybrid_ddfs_two_qubit(tau: f64) -> HybridDdfs {
    // Code: |0̄⟩ = |01⟩, |1̄⟩ = |10⟩.
    let iso = ComplexMatrix::from_fn(4, 2, |i, j| {
        if (j == 0 && i == 0b01) || (j == 1 && i == 0b10) {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let code = CodeSpace::new(2, iso, vec![ColumnLabel::Weight(0); 2]).unwrap();
    let xx = tensor(&paulis::x(), &paulis::x());
    let yy = tensor(&paulis::y(), &paulis::y());
    let sigma_x_bar = (&xx + &yy).scale_re(0.5);
    let z1 = tensor(&paulis::z(), &ComplexMatrix::identity(2));
    let z2 = tensor(&ComplexMatrix::identity(2), &paulis::z());
    let sigma_z_bar = (&z1 - &z2).scale_re(0.5);
    let zz = tensor(&paulis::z(), &paulis::z());
    let half_pi = std::f64::consts::FRAC_PI_2;
    let xbar_pulse = expm_skew_hermitian(&sigma_x_bar, half_pi).unwrap();
    let zbar_pulse = expm_skew_hermitian(&sigma_z_bar, half_pi).unwrap();

    // U₁ = X̄ f_τ X̄ f_τ (time order: f, X̄, f, X̄).
    let u1_events = vec![
        PulseEvent::Free(tau),
        ideal("XBAR", xbar_pulse.clone()),
        PulseEvent::Free(tau),
        ideal("XBAR", xbar_pulse),
    ];
    let u1 = PulseSequence {
        name: "hybrid-u1".to_string(),
        level: 1,
        events: u1_events.clone(),
    };
    // U₂ = ZZ·U₁·ZZ·U₁.
    let mut u2_events = u1_events.clone();
    u2_events.push(ideal("ZZ", zz.clone()));
    u2_events.extend(u1_events.iter().cloned());
    u2_events.push(ideal("ZZ", zz));
    let u2 = PulseSequence {
        name: "hybrid-u2".to_string(),
        level: 2,
        events: u2_events.clone(),
    };
    // U₃ = Z̄·U₂·Z̄·U₂.
    let mut u3_events = u2_events.clone();
    u3_events.push(ideal("ZBAR", zbar_pulse.clone()));
    u3_events.extend(u2_events.iter().cloned());
    u3_events.push(ideal("ZBAR", zbar_pulse));
    let u3 = PulseSequence {
        name: "hybrid-u3".to_string(),
        level: 3,
        events: u3_events,
    };

    let classification = paulis::all_strings(2)
        .into_iter()
        .map(|(axes, m)| {
            let name: String = axes
                .iter()
                .map(|a| ["I", "X", "Y", "Z"][*a as usize])
                .collect();
            (name, classify_against_code(&m, &code, 1e-10))
        })
        .collect();
    HybridDdfs {
        code,
        sigma_x_bar,
        sigma_z_bar,
        u1,
        u2,
        u3,
        classification,
    }
}

/// One row of the concatenation-bound table.
#[derive(Clone, Debug)]
pub struct BoundRow {
    pub m: usize,
    pub t_m: f64,
    pub phi_bound: f64,
}

#[derive(Clone, Debug)]
pub struct CddBoundTable {
    pub rows: Vec<BoundRow>,
    /// Real-valued optimum m_opt = −log(4βτ)/(2 log 2); negative or zero
    /// means "do not concatenate".
    pub m_opt: f64,
    pub m_opt_floor: i64,
    pub concatenate: bool,
}

/// Evaluates the error-phase bound φ(m) ≤ T_m·2^{m²}(βτ)^m·J over the
/// fixed-τ family T_m = 4^m τ, and reports the optimal level.
pub fn cdd_bound_and_optimum(j: f64, beta: f64, tau: f64, m_max: usize) -> CddBoundTable {
    let rows = (1..=m_max)
        .map(|m| {
            let t_m = 4f64.powi(m as i32) * tau;
            let phi_bound = t_m * 2f64.powf((m * m) as f64) * (beta * tau).powi(m as i32) * j;
            BoundRow { m, t_m, phi_bound }
        })
        .collect();
    let m_opt = -(4.0 * beta * tau).ln() / (2.0 * std::f64::consts::LN_2);
    CddBoundTable {
        rows,
        m_opt,
        m_opt_floor: m_opt.floor() as i64,
        concatenate: m_opt > 0.0,
    }
}

/// Fixed-total-time bound J·T·(βT/2^m)^m; decreases monotonically in m as
/// soon as 2^m > βT.
pub fn fixed_time_bound(j: f64, beta: f64, t: f64, m: usize) -> f64 {
    j * t * (beta * t / 2f64.powi(m as i32)).powi(m as i32)
}

/// Ordinary least squares slope of log(y) vs log(x), discarding points below
/// the numerical noise floor 1e3·ε.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let floor = 1e3 * f64::EPSILON;
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > floor)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
