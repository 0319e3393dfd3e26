//! Open-system model definitions: Hamiltonian and Kraus forms, seeded random
//! bath generation, and joint time evolution.
//!
//! The bath is always a single finite-dimensional factor appended after the
//! system qubits. Random bath operators stand in for physical baths; the
//! scaling claims exercised downstream depend only on the operator norms
//! J = ‖H_SB‖ and β = ‖H_B‖, which the builder pins exactly.

use crate::linalg::{
    expm_skew_hermitian, op_norm, paulis, tensor, ComplexMatrix, DensityMatrix,
    LinalgError, TensorLayout, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator {0} is not Hermitian within 1e-10")]
    NotHermitian(String),
    #[error("Kraus operators do not satisfy the completeness relation (residual {0:.2e})")]
    KrausIncomplete(f64),
    #[error("dephasing strength must be nonnegative, got {0}")]
    NegativeAlpha(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// H = H_S ⊗ I_B + I_S ⊗ H_B + Σ_α S_α ⊗ B_α on n qubits and one bath factor.
#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    pub n_qubits: usize,
    pub bath_dim: usize,
    pub h_s: ComplexMatrix,
    pub h_b: ComplexMatrix,
    pub couplings: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl HamiltonianModel {
    pub fn new(
        n_qubits: usize,
        bath_dim: usize,
        h_s: Option<ComplexMatrix>,
        h_b: Option<ComplexMatrix>,
        couplings: Vec<(ComplexMatrix, ComplexMatrix)>,
    ) -> Result<Self> {
        let ds = 1usize << n_qubits;
        let h_s = h_s.unwrap_or_else(|| ComplexMatrix::zeros(ds, ds));
        let h_b = h_b.unwrap_or_else(|| ComplexMatrix::zeros(bath_dim, bath_dim));
        let check = |m: &ComplexMatrix, dim: usize, name: &str| -> Result<()> {
            if m.rows() != dim || m.cols() != dim {
                return Err(ModelError::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_hermitian(1e-10) {
                return Err(ModelError::NotHermitian(name.to_string()));
            }
            Ok(())
        };
        check(&h_s, ds, "H_S")?;
        check(&h_b, bath_dim, "H_B")?;
        for (k, (s, b)) in couplings.iter().enumerate() {
            check(s, ds, &format!("S_{k}"))?;
            check(b, bath_dim, &format!("B_{k}"))?;
        }
        Ok(Self {
            n_qubits,
            bath_dim,
            h_s,
            h_b,
            couplings,
        })
    }

    pub fn layout(&self) -> TensorLayout {
        TensorLayout::qubits_with_bath(self.n_qubits, self.bath_dim)
    }

    pub fn system_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim() * self.bath_dim
    }

    /// Σ_α S_α ⊗ B_α alone, without the free system and bath terms.
    pub fn interaction_hamiltonian(&self) -> ComplexMatrix {
        let d = self.total_dim();
        let mut h = ComplexMatrix::zeros(d, d);
        for (s, b) in &self.couplings {
            h = &h + &tensor(s, b);
        }
        h
    }
}

/// H_S ⊗ I_B + I_S ⊗ H_B + Σ_α S_α ⊗ B_α.
pub fn total_hamiltonian(model: &HamiltonianModel) -> ComplexMatrix {
    let ib = ComplexMatrix::identity(model.bath_dim);
    let is = ComplexMatrix::identity(model.system_dim());
    let mut h = &tensor(&model.h_s, &ib) + &tensor(&is, &model.h_b);
    h = &h + &model.interaction_hamiltonian();
    h
}

/// U(t) ρ U†(t) with U = exp(-i t H); the joint state, not yet traced.
pub fn evolve_joint(
    model: &HamiltonianModel,
    t: f64,
    initial: &DensityMatrix,
) -> Result<DensityMatrix> {
    if initial.dim() != model.total_dim() {
        return Err(ModelError::DimensionMismatch(format!(
            "state dim {} vs model dim {}",
            initial.dim(),
            model.total_dim()
        )));
    }
    let u = expm_skew_hermitian(&total_hamiltonian(model), t)?;
    Ok(initial.conjugated(&u))
}

/// Operator-sum channel ρ ↦ Σ_α K_α ρ K_α†.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        assert!(!kraus_ops.is_empty(), "channel needs at least one operator");
        let d = kraus_ops[0].rows();
        for k in &kraus_ops {
            if k.rows() != d || k.cols() != d {
                return Err(ModelError::DimensionMismatch(
                    "Kraus operators must share one square dimension".into(),
                ));
            }
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &kraus_ops {
            sum = &sum + &(&k.dagger() * k);
        }
        let residual = (&sum - &ComplexMatrix::identity(d)).max_abs_entry();
        if residual > 1e-10 {
            return Err(ModelError::KrausIncomplete(residual));
        }
        Ok(Self { kraus_ops })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].rows()
    }
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(ModelError::DimensionMismatch(format!(
            "channel dim {} vs state dim {}",
            ch.dim(),
            rho.dim()
        )));
    }
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in ch.ops() {
        out = &out + &(&(k * rho.matrix()) * &k.dagger());
    }
    Ok(DensityMatrix::from_parts(out, rho.layout().clone()))
}

/// Gaussian-averaged collective dephasing: in the computational basis,
/// ρ_{s,s'} ↦ ρ_{s,s'} · exp(-α (w(s) - w(s'))²) with w the Hamming weight.
///
/// This is the exact average over a collective phase kick φ drawn from a
/// Gaussian of variance 2α; the single-qubit case reproduces the off-diagonal
/// damping factor e^{-α}.
#[derive(Clone, Debug)]
pub struct CollectiveDephasing {
    n_qubits: usize,
    alpha: f64,
}

pub fn collective_dephasing_channel(n_qubits: usize, alpha: f64) -> Result<CollectiveDephasing> {
    if alpha < 0.0 {
        return Err(ModelError::NegativeAlpha(alpha));
    }
    Ok(CollectiveDephasing { n_qubits, alpha })
}

impl CollectiveDephasing {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = 1usize << self.n_qubits;
        if rho.dim() != d {
            return Err(ModelError::DimensionMismatch(format!(
                "state dim {} vs 2^{}",
                rho.dim(),
                self.n_qubits
            )));
        }
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            let dw = i.count_ones() as f64 - j.count_ones() as f64;
            rho.matrix().get(i, j) * C64::new((-self.alpha * dw * dw).exp(), 0.0)
        });
        Ok(DensityMatrix::from_parts(m, rho.layout().clone()))
    }

    /// Damping factor applied to a coherence between weights w and w'.
    pub fn damping(&self, w: i64, w_prime: i64) -> f64 {
        let dw = (w - w_prime) as f64;
        (-self.alpha * dw * dw).exp()
    }
}

/// Target for seeded random Hermitian bath operators of prescribed norm.
#[derive(Clone, Copy, Debug)]
pub struct BathSpec {
    pub bath_dim: usize,
    pub norm: f64,
    pub seed: u64,
}

/// Deterministic function of (spec.seed, stream_index): Hermitized standard
/// complex Gaussian matrix rescaled so its largest singular value equals
/// spec.norm exactly.
pub fn random_bath_operator(spec: &BathSpec, stream_index: u64) -> ComplexMatrix {
    let d = spec.bath_dim;
    if spec.norm == 0.0 {
        return ComplexMatrix::zeros(d, d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream_index);
    let raw = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let herm = (&raw + &raw.dagger()).scale_re(0.5);
    let n = op_norm(&herm);
    if n == 0.0 {
        // Astronomically unlikely; keep the zero matrix rather than divide by 0.
        return herm;
    }
    herm.scale_re(spec.norm / n)
}

/// Named system-coupling layouts for model building.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingTemplate {
    /// One σᶻ coupling per qubit, each with its own bath operator.
    PureDephasing,
    /// Single coupling through the collective S_z.
    CollectiveDephasing,
    /// Three couplings through S_x, S_y, S_z.
    CollectiveDecoherence,
    /// σᵅᵢ ⊗ Bᵅᵢ for every qubit i and axis α — fully independent linear coupling.
    LinearIndependentBaths,
    /// Every non-identity Pauli string gets its own bath operator.
    GeneralPauli,
}

impl CouplingTemplate {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "pure_dephasing" => Some(Self::PureDephasing),
            "collective_dephasing" => Some(Self::CollectiveDephasing),
            "collective_decoherence" => Some(Self::CollectiveDecoherence),
            "linear_independent_baths" => Some(Self::LinearIndependentBaths),
            "general_pauli" => Some(Self::GeneralPauli),
            _ => None,
        }
    }

    /// The system-side coupling operators, before baths are attached.
    pub fn system_operators(&self, n: usize) -> Vec<ComplexMatrix> {
        let collective = |axis: &ComplexMatrix| {
            let d = 1usize << n;
            let mut s = ComplexMatrix::zeros(d, d);
            for i in 0..n {
                s = &s + &paulis::on_qubit(axis, i, n);
            }
            s
        };
        match self {
            Self::PureDephasing => (0..n).map(|i| paulis::on_qubit(&paulis::z(), i, n)).collect(),
            Self::CollectiveDephasing => vec![collective(&paulis::z())],
            Self::CollectiveDecoherence => {
                vec![collective(&paulis::x()), collective(&paulis::y()), collective(&paulis::z())]
            }
            Self::LinearIndependentBaths => {
                let mut out = Vec::with_capacity(3 * n);
                for i in 0..n {
                    for axis in [paulis::x(), paulis::y(), paulis::z()] {
                        out.push(paulis::on_qubit(&axis, i, n));
                    }
                }
                out
            }
            Self::GeneralPauli => paulis::all_strings(n)
                .into_iter()
                .skip(1)
                .map(|(_, m)| m)
                .collect(),
        }
    }
}

/// Builds a model with ‖Σ S_α ⊗ B_α‖ = j_norm and ‖H_B‖ = beta exactly.
///
/// Couplings draw bath operators from streams 0..k of the seed; H_B uses
/// stream k. All bath operators are rescaled jointly so the total coupling
/// norm hits j_norm without disturbing their relative structure.
pub fn build_model(
    template: CouplingTemplate,
    n_qubits: usize,
    bath_dim: usize,
    j_norm: f64,
    beta: f64,
    seed: u64,
) -> Result<HamiltonianModel> {
    let sys_ops = template.system_operators(n_qubits);
    let spec = BathSpec {
        bath_dim,
        norm: 1.0,
        seed,
    };
    let mut couplings: Vec<(ComplexMatrix, ComplexMatrix)> = sys_ops
        .into_iter()
        .enumerate()
        .map(|(k, s)| (s, random_bath_operator(&spec, k as u64)))
        .collect();
    let h_b = random_bath_operator(
        &BathSpec {
            norm: beta,
            ..spec
        },
        couplings.len() as u64,
    );
    // Joint rescale so ‖H_SB‖ = j_norm exactly.
    let trial = HamiltonianModel::new(n_qubits, bath_dim, None, None, couplings.clone())?;
    let n0 = op_norm(&trial.interaction_hamiltonian());
    if n0 > 0.0 && j_norm > 0.0 {
        let scale = j_norm / n0;
        for (_, b) in couplings.iter_mut() {
            *b = b.scale_re(scale);
        }
    } else if j_norm == 0.0 {
        for (_, b) in couplings.iter_mut() {
            *b = ComplexMatrix::zeros(bath_dim, bath_dim);
        }
    }
    HamiltonianModel::new(n_qubits, bath_dim, None, Some(h_b), couplings)
}

/// Default initial joint state: system state tensored with the maximally
/// mixed bath.
pub fn with_mixed_bath(system: &DensityMatrix, bath_dim: usize) -> DensityMatrix {
    let bath = DensityMatrix::maximally_mixed(TensorLayout::new(vec![bath_dim]));
    system.tensor(&bath)
}

/// Two-element dephasing channel {√(1-p) I, √p Z} on one qubit.
pub fn single_qubit_dephasing_kraus(p: f64) -> Result<KrausChannel> {
    KrausChannel::new(vec![
        paulis::identity2().scale_re((1.0 - p).sqrt()),
        paulis::z().scale_re(p.sqrt()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, StateVector};
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn total_hamiltonian_zero_model() {
        let m = HamiltonianModel::new(1, 2, None, None, vec![]).unwrap();
        assert_eq!(total_hamiltonian(&m).max_abs_entry(), 0.0);
    }

    #[test]
    fn total_hamiltonian_pure_dephasing() {
        let spec = BathSpec {
            bath_dim: 3,
            norm: 0.7,
            seed: 9,
        };
        let bz = random_bath_operator(&spec, 0);
        let m = HamiltonianModel::new(1, 3, None, None, vec![(paulis::z(), bz.clone())]).unwrap();
        let h = total_hamiltonian(&m);
        assert!((&h - &tensor(&paulis::z(), &bz)).max_abs_entry() < 1e-14);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn evolve_joint_t_zero_and_composition() {
        let m = build_model(CouplingTemplate::LinearIndependentBaths, 1, 3, 1.0, 1.0, 5).unwrap();
        let sys = StateVector::from_bits(&[0]).to_density();
        let rho0 = with_mixed_bath(&sys, 3);
        let same = evolve_joint(&m, 0.0, &rho0).unwrap();
        assert!((same.matrix() - rho0.matrix()).max_abs_entry() < 1e-12);
        let two_step = evolve_joint(&m, 0.3, &evolve_joint(&m, 0.4, &rho0).unwrap()).unwrap();
        let one_step = evolve_joint(&m, 0.7, &rho0).unwrap();
        assert!((two_step.matrix() - one_step.matrix()).max_abs_entry() < 1e-11);
    }

    #[test]
    fn evolve_joint_commuting_model_factorizes() {
        // Diagonal model: H_S = Z, H_B diagonal, coupling Z⊗diag — all commute,
        // so joint evolution equals the product of the individual exponentials.
        let diag_b = ComplexMatrix::from_real_rows(&[vec![0.4, 0.0], vec![0.0, -0.9]]);
        let m = HamiltonianModel::new(
            1,
            2,
            Some(paulis::z()),
            Some(diag_b.clone()),
            vec![(paulis::z(), diag_b.clone())],
        )
        .unwrap();
        let t = 0.37;
        let u_joint = expm_skew_hermitian(&total_hamiltonian(&m), t).unwrap();
        let id2 = ComplexMatrix::identity(2);
        let u_parts = &(&expm_skew_hermitian(&tensor(&paulis::z(), &id2), t).unwrap()
            * &expm_skew_hermitian(&tensor(&id2, &diag_b), t).unwrap())
            * &expm_skew_hermitian(&tensor(&paulis::z(), &diag_b), t).unwrap();
        assert!((&u_joint - &u_parts).max_abs_entry() < 1e-12);
    }

    #[test]
    fn evolve_preserves_purity() {
        let m = build_model(CouplingTemplate::GeneralPauli, 1, 2, 1.0, 1.0, 1).unwrap();
        let mut v = DVector::zeros(4);
        v[0] = c(0.6, 0.0);
        v[1] = c(0.0, 0.8);
        let psi = StateVector::new(v, TensorLayout::new(vec![2, 2])).unwrap();
        let rho = psi.to_density();
        let out = evolve_joint(&m, 0.9, &rho).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kraus_validation() {
        assert!(single_qubit_dephasing_kraus(0.3).is_ok());
        let bad = KrausChannel::new(vec![paulis::z().scale_re(0.5)]);
        assert!(matches!(bad, Err(ModelError::KrausIncomplete(_))));
    }

    #[test]
    fn identity_channel_is_identity() {
        let ch = KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let rho = StateVector::from_bits(&[1]).to_density();
        let out = apply_channel(&ch, &rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs_entry() < 1e-15);
    }

    #[test]
    fn dephasing_channel_on_plus_minus() {
        // {√(1-p) I⊗I, √p Z⊗I} sends |+-⟩⟨+-| to (1-p)|+-⟩⟨+-| + p|--⟩⟨--|.
        let p = 0.3_f64;
        let id2 = ComplexMatrix::identity(2);
        let ch = KrausChannel::new(vec![
            tensor(&id2, &id2).scale_re((1.0 - p).sqrt()),
            tensor(&paulis::z(), &id2).scale_re(p.sqrt()),
        ])
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(
            DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
            TensorLayout::qubits(1),
        )
        .unwrap();
        let minus = StateVector::new(
            DVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]),
            TensorLayout::qubits(1),
        )
        .unwrap();
        let pm = plus.tensor(&minus);
        let mm = minus.tensor(&minus);
        let out = apply_channel(&ch, &pm.to_density()).unwrap();
        let expect = &pm.to_density().matrix().scale_re(1.0 - p) + &mm.to_density().matrix().scale_re(p);
        assert!((out.matrix() - &expect).max_abs_entry() < 1e-13);
    }

    #[test]
    fn collective_dephasing_single_qubit_offdiagonal() {
        let alpha = 0.8;
        let ch = collective_dephasing_channel(1, alpha).unwrap();
        let a = c(0.6, 0.0);
        let b = c(0.48, 0.64);
        let psi = StateVector::new(
            DVector::from_vec(vec![a, b]),
            TensorLayout::qubits(1),
        )
        .unwrap();
        let out = ch.apply(&psi.to_density()).unwrap();
        let expect = a * b.conj() * c((-alpha).exp(), 0.0);
        assert!((out.matrix().get(0, 1) - expect).norm() < 1e-14);
        // Diagonal untouched.
        assert!((out.matrix().get(0, 0) - a * a.conj()).norm() < 1e-14);
    }

    #[test]
    fn collective_dephasing_matches_kraus_parametrization() {
        // n = 1: the Gaussian superoperator equals {√(1-p) I, √p Z} with
        // p = (1 - e^{-α})/2, entrywise.
        for &alpha in &[0.1, 0.7, 2.5] {
            let p = (1.0 - (-alpha as f64).exp()) / 2.0;
            let ch_g = collective_dephasing_channel(1, alpha).unwrap();
            let ch_k = single_qubit_dephasing_kraus(p).unwrap();
            let psi = StateVector::new(
                DVector::from_vec(vec![c(0.28, 0.21), c(0.5, -0.79)]),
                TensorLayout::qubits(1),
            );
            let psi = psi.unwrap_or_else(|_| StateVector::from_bits(&[0]));
            let rho = psi.to_density();
            let a = ch_g.apply(&rho).unwrap();
            let b = apply_channel(&ch_k, &rho).unwrap();
            assert!((a.matrix() - b.matrix()).max_abs_entry() < 1e-12);
        }
    }

    #[test]
    fn dephasing_free_subspace_two_qubits() {
        // a|01⟩ + b|10⟩ is untouched for any α: both strings have weight 1.
        let alpha = 3.0;
        let ch = collective_dephasing_channel(2, alpha).unwrap();
        let mut v = DVector::zeros(4);
        v[1] = c(0.6, 0.3);
        v[2] = c(0.1, -0.735);
        let psi = StateVector::normalized(v, TensorLayout::qubits(2)).unwrap();
        let rho = psi.to_density();
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs_entry() < 1e-14);
    }

    #[test]
    fn alpha_zero_is_identity_and_negative_rejected() {
        let ch = collective_dephasing_channel(2, 0.0).unwrap();
        let rho = StateVector::from_bits(&[1, 0]).to_density();
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs_entry() == 0.0);
        assert!(matches!(
            collective_dephasing_channel(2, -0.1),
            Err(ModelError::NegativeAlpha(_))
        ));
    }

    #[test]
    fn random_bath_determinism_and_norm() {
        let spec = BathSpec {
            bath_dim: 4,
            norm: 1.3,
            seed: 42,
        };
        for idx in 0..100 {
            let a = random_bath_operator(&spec, idx);
            let b = random_bath_operator(&spec, idx);
            assert!((&a - &b).max_abs_entry() == 0.0);
            assert!(a.is_hermitian(1e-14));
            assert!((op_norm(&a) - 1.3).abs() < 1e-12);
        }
        let zero = random_bath_operator(
            &BathSpec {
                norm: 0.0,
                ..spec
            },
            0,
        );
        assert_eq!(zero.max_abs_entry(), 0.0);
        // Different streams give different draws.
        let a = random_bath_operator(&spec, 0);
        let b = random_bath_operator(&spec, 1);
        assert!((&a - &b).max_abs_entry() > 1e-3);
    }

    #[test]
    fn build_model_pins_norms() {
        let m = build_model(CouplingTemplate::GeneralPauli, 2, 4, 1.0, 1.0, 42).unwrap();
        assert!((op_norm(&m.interaction_hamiltonian()) - 1.0).abs() < 1e-10);
        assert!((op_norm(&m.h_b) - 1.0).abs() < 1e-12);
        assert_eq!(m.couplings.len(), 15);
    }

    #[test]
    fn partial_trace_recovers_reduced_dynamics_shape() {
        let m = build_model(CouplingTemplate::CollectiveDephasing, 2, 2, 0.5, 0.5, 3).unwrap();
        let sys = StateVector::from_bits(&[0, 1]).to_density();
        let rho0 = with_mixed_bath(&sys, 2);
        let out = evolve_joint(&m, 0.2, &rho0).unwrap();
        let red = partial_trace(out.matrix(), out.layout(), &[0, 1]).unwrap();
        assert!((red.trace() - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(red.rows(), 4);
    }
}
