//! Decoherence-free subspaces and noiseless subsystems: weight-eigenspace
//! enumeration, angular-momentum path counting, the sequentially coupled
//! spin-tower basis, explicit 3- and 4-qubit codes, exchange-operator logical
//! gates, and checkers that verify a candidate code against a noise model.
//!
//! Conventions: qubit |0⟩ is spin-up, so the collective weight label
//! c_z = (#0) − (#1) equals the eigenvalue of S_z = Σᵢ σᶻᵢ and the magnetic
//! number is m = c_z/2. Half-integer spin labels are stored doubled
//! (`twice_j`, `twice_m`) so they stay exact integers.

use crate::linalg::{
    op_norm, paulis, textfmt, ComplexMatrix, LinalgError, StateVector, TensorLayout, C64,
};
use crate::models::HamiltonianModel;
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("qubit count {0} outside supported range {1}..={2}")]
    NOutOfRange(usize, usize, usize),
    #[error("qubit index out of range: ({i}, {j}) on {n} qubits (1-based, i < j)")]
    BadQubitPair { i: usize, j: usize, n: usize },
    #[error("isometry columns are not orthonormal (residual {0:.2e})")]
    NotIsometry(f64),
    #[error("codeword count must be even: n = {0}")]
    OddN(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, CodeError>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Per-column metadata for a [`CodeSpace`] basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnLabel {
    /// Collective weight c_z = #0 − #1.
    Weight(i64),
    /// Spin-tower label (J, λ, m_J), half-integers doubled.
    Spin {
        twice_j: i64,
        lambda: usize,
        twice_m: i64,
    },
    /// Codeword bit string (e.g. the representative r of (|r⟩+|r̄⟩)/√2).
    Word(String),
    Unlabeled,
}

/// Isometry from a logical space into the physical space of n qubits.
#[derive(Clone, Debug)]
pub struct CodeSpace {
    pub n_qubits: usize,
    isometry: ComplexMatrix,
    labels: Vec<ColumnLabel>,
}

impl CodeSpace {
    pub fn new(n_qubits: usize, isometry: ComplexMatrix, labels: Vec<ColumnLabel>) -> Result<Self> {
        if isometry.rows() != 1 << n_qubits {
            return Err(CodeError::DimensionMismatch(format!(
                "isometry has {} rows, expected 2^{}",
                isometry.rows(),
                n_qubits
            )));
        }
        if labels.len() != isometry.cols() {
            return Err(CodeError::DimensionMismatch(format!(
                "{} labels for {} columns",
                labels.len(),
                isometry.cols()
            )));
        }
        let gram = &isometry.dagger() * &isometry;
        let residual = (&gram - &ComplexMatrix::identity(isometry.cols())).max_abs_entry();
        if residual > 1e-12 {
            return Err(CodeError::NotIsometry(residual));
        }
        Ok(Self {
            n_qubits,
            isometry,
            labels,
        })
    }

    pub fn from_states(n_qubits: usize, states: &[StateVector], labels: Vec<ColumnLabel>) -> Result<Self> {
        let d = 1usize << n_qubits;
        let iso = ComplexMatrix::from_fn(d, states.len(), |i, j| states[j].amplitudes()[i]);
        Self::new(n_qubits, iso, labels)
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.isometry.cols()
    }

    pub fn physical_dim(&self) -> usize {
        self.isometry.rows()
    }

    /// Projector P P† onto the code space.
    pub fn projector(&self) -> ComplexMatrix {
        &self.isometry * &self.isometry.dagger()
    }

    /// Orthonormal basis of the orthogonal complement, built by extending the
    /// code columns with standard basis vectors via modified Gram-Schmidt.
    pub fn complement(&self) -> ComplexMatrix {
        let d = self.physical_dim();
        let k = self.dim();
        let mut cols: Vec<DVector<C64>> = (0..k).map(|j| self.isometry.column(j)).collect();
        for e in 0..d {
            if cols.len() == d {
                break;
            }
            let mut v = DVector::zeros(d);
            v[e] = c(1.0, 0.0);
            for _ in 0..2 {
                for b in &cols {
                    let overlap: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                    v -= b.map(|x| x * overlap);
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                cols.push(v.map(|x| x / norm));
            }
        }
        assert_eq!(cols.len(), d, "complement construction lost rank");
        ComplexMatrix::from_fn(d, d - k, |i, j| cols[k + j][i])
    }

    pub fn to_text(&self) -> String {
        textfmt::to_text(&[&self.isometry])
    }

    pub fn from_text(n_qubits: usize, text: &str) -> Result<Self> {
        let ms = textfmt::parse_matrices(text)?;
        if ms.len() != 1 {
            return Err(CodeError::DimensionMismatch(format!(
                "expected one matrix in code file, found {}",
                ms.len()
            )));
        }
        let cols = ms[0].cols();
        Self::new(n_qubits, ms[0].clone(), vec![ColumnLabel::Unlabeled; cols])
    }
}

/// Collective spin operators S_α = Σᵢ σᵢᵅ (halved when `half_spin`), plus the
/// ladder pair and the Casimir S⃗² in the chosen convention.
#[derive(Clone, Debug)]
pub struct CollectiveSpinOps {
    pub s_x: ComplexMatrix,
    pub s_y: ComplexMatrix,
    pub s_z: ComplexMatrix,
    pub s_sq: ComplexMatrix,
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
}

pub fn collective_spin_ops(n: usize, half_spin: bool) -> CollectiveSpinOps {
    let d = 1usize << n;
    let sum_over_qubits = |op: &ComplexMatrix| {
        let mut s = ComplexMatrix::zeros(d, d);
        for i in 0..n {
            s = &s + &paulis::on_qubit(op, i, n);
        }
        s
    };
    let scale = if half_spin { 0.5 } else { 1.0 };
    let s_x = sum_over_qubits(&paulis::x()).scale_re(scale);
    let s_y = sum_over_qubits(&paulis::y()).scale_re(scale);
    let s_z = sum_over_qubits(&paulis::z()).scale_re(scale);
    let s_sq = &(&(&s_x * &s_x) + &(&s_y * &s_y)) + &(&s_z * &s_z);
    // Ladder operators in the unit-Pauli convention of the source text:
    // S₊ = Σ|1⟩⟨0|ᵢ, so S_x = S₊ + S₋ and S_y = i(S₊ − S₋) hold with unit S_α.
    let s_plus = sum_over_qubits(&paulis::raise());
    let s_minus = sum_over_qubits(&paulis::lower());
    CollectiveSpinOps {
        s_x,
        s_y,
        s_z,
        s_sq,
        s_plus,
        s_minus,
    }
}

/// One DFS per eigenvalue c_z of S_z = Σσᶻ, ordered by descending c_z.
/// The c_z eigenspace is spanned by the bit strings with (n + c_z)/2 zeros.
pub fn dephasing_dfs_enumerate(n: usize) -> Vec<CodeSpace> {
    assert!(n >= 1);
    let d = 1usize << n;
    let mut out = Vec::with_capacity(n + 1);
    for zeros in (0..=n).rev() {
        let cz = 2 * zeros as i64 - n as i64;
        let indices: Vec<usize> = (0..d)
            .filter(|idx| idx.count_ones() as usize == n - zeros)
            .collect();
        let iso = ComplexMatrix::from_fn(d, indices.len(), |i, j| {
            if i == indices[j] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        out.push(CodeSpace::new(n, iso, vec![ColumnLabel::Weight(cz); indices.len()]).unwrap());
    }
    out
}

/// Number of length-n walks from j = ½ after one step (i.e. starting at the
/// origin) to total spin J, stepping j → j ± ½ with j ≥ 0 throughout.
/// `twice_j` is 2J. Infeasible (n, J) pairs give 0.
pub fn bratteli_paths(n: usize, twice_j: i64) -> u128 {
    if twice_j < 0 || twice_j > n as i64 || (n as i64 - twice_j) % 2 != 0 {
        return 0;
    }
    // counts[j2] = number of paths reaching doubled spin j2 after k steps.
    let mut counts = vec![0u128; n + 2];
    counts[0] = 1; // origin, zero qubits
    for _ in 0..n {
        let mut next = vec![0u128; n + 2];
        for j2 in 0..=n {
            if counts[j2] == 0 {
                continue;
            }
            next[j2 + 1] += counts[j2];
            if j2 >= 1 {
                next[j2 - 1] += counts[j2];
            }
        }
        counts = next;
    }
    counts[twice_j as usize]
}

/// Closed-form multiplicity n_J = (2J+1)·N!/((N/2+1+J)!(N/2−J)!), exact in
/// u128 for the n ≤ 10 range it is compared over (and well beyond).
pub fn multiplicity_closed_form(n: usize, twice_j: i64) -> u128 {
    if twice_j < 0 || twice_j > n as i64 || (n as i64 - twice_j) % 2 != 0 {
        return 0;
    }
    let factorial = |k: u128| -> u128 { (1..=k).product::<u128>().max(1) };
    let nf = factorial(n as u128);
    let a = factorial(((n as i64 + 2 + twice_j) / 2) as u128);
    let b = factorial(((n as i64 - twice_j) / 2) as u128);
    (twice_j as u128 + 1) * nf / (a * b)
}

/// One irreducible spin multiplet in the tower: its path through the
/// angular-momentum lattice and its 2J+1 basis states.
#[derive(Clone, Debug)]
pub struct Multiplet {
    pub twice_j: i64,
    pub lambda: usize,
    /// Doubled-spin increments per coupled qubit (+1 = up-step, −1 = down-step).
    pub steps: Vec<i8>,
    /// States for m = −J..J ascending; index (twice_m + twice_j)/2.
    pub states: Vec<StateVector>,
}

impl Multiplet {
    pub fn state(&self, twice_m: i64) -> Option<&StateVector> {
        if twice_m < -self.twice_j || twice_m > self.twice_j || (twice_m + self.twice_j) % 2 != 0 {
            return None;
        }
        self.states.get(((twice_m + self.twice_j) / 2) as usize)
    }
}

/// Complete orthonormal basis |J, λ, m_J⟩ of n qubits built by coupling one
/// spin-½ at a time.
#[derive(Clone, Debug)]
pub struct SpinTowerBasis {
    pub n_qubits: usize,
    pub multiplets: Vec<Multiplet>,
}

impl SpinTowerBasis {
    pub fn state(&self, twice_j: i64, lambda: usize, twice_m: i64) -> Option<&StateVector> {
        self.multiplets
            .iter()
            .find(|m| m.twice_j == twice_j && m.lambda == lambda)
            .and_then(|m| m.state(twice_m))
    }

    pub fn total_states(&self) -> usize {
        self.multiplets.iter().map(|m| m.states.len()).sum()
    }
}

/// Raw Condon-Shortley coupling of a tower level with one more qubit.
/// `parent` holds states for m ascending; returns (up-coupled, down-coupled)
/// children, the latter absent when J = 0.
fn couple_qubit(parent_j2: i64, parent: &[DVector<C64>]) -> (Vec<DVector<C64>>, Option<Vec<DVector<C64>>>) {
    let dim = parent[0].len() * 2;
    let parent_state = |twice_m: i64| -> Option<&DVector<C64>> {
        if twice_m < -parent_j2 || twice_m > parent_j2 {
            return None;
        }
        parent.get(((twice_m + parent_j2) / 2) as usize)
    };
    // Child index: attach |0⟩ (spin-up, parent m' − ½) or |1⟩ (spin-down,
    // parent m' + ½); amplitude of tensor basis index i*2 + bit.
    let attach = |src: &DVector<C64>, bit: usize, coeff: f64, dst: &mut DVector<C64>| {
        for (i, amp) in src.iter().enumerate() {
            dst[i * 2 + bit] += amp * c(coeff, 0.0);
        }
    };
    let denom = 2.0 * (parent_j2 as f64 + 1.0);
    let up_j2 = parent_j2 + 1;
    let mut ups = Vec::new();
    let mut m2 = -up_j2;
    while m2 <= up_j2 {
        let mut v = DVector::zeros(dim);
        // |J+½, m'⟩ = √((J+m'+½)/(2J+1)) |J, m'−½⟩|↑⟩ + √((J−m'+½)/(2J+1)) |J, m'+½⟩|↓⟩
        if let Some(src) = parent_state(m2 - 1) {
            attach(src, 0, ((parent_j2 + m2 + 1) as f64 / denom).sqrt(), &mut v);
        }
        if let Some(src) = parent_state(m2 + 1) {
            attach(src, 1, ((parent_j2 - m2 + 1) as f64 / denom).sqrt(), &mut v);
        }
        ups.push(v);
        m2 += 2;
    }
    let downs = if parent_j2 >= 1 {
        let down_j2 = parent_j2 - 1;
        let mut list = Vec::new();
        let mut m2 = -down_j2;
        while m2 <= down_j2 {
            let mut v = DVector::zeros(dim);
            // |J−½, m'⟩ = −√((J−m'+½)/(2J+1)) |J, m'−½⟩|↑⟩ + √((J+m'+½)/(2J+1)) |J, m'+½⟩|↓⟩
            if let Some(src) = parent_state(m2 - 1) {
                attach(src, 0, -((parent_j2 - m2 + 1) as f64 / denom).sqrt(), &mut v);
            }
            if let Some(src) = parent_state(m2 + 1) {
                attach(src, 1, ((parent_j2 + m2 + 1) as f64 / denom).sqrt(), &mut v);
            }
            list.push(v);
            m2 += 2;
        }
        Some(list)
    } else {
        None
    };
    (ups, downs)
}

/// Builds the tower with raw Condon-Shortley phases, then applies the output
/// sign normalization: the first nonzero amplitude of each state is made
/// positive, except the three-qubit (J=½, λ=1) doublet, whose published form
/// carries the opposite overall sign and is adopted verbatim.
pub fn spin_tower(n: usize) -> Result<SpinTowerBasis> {
    if n < 1 || n > 8 {
        return Err(CodeError::NOutOfRange(n, 1, 8));
    }
    // Each entry: (doubled-spin step sequence, states for m ascending).
    let mut level: Vec<(Vec<i8>, i64, Vec<DVector<C64>>)> = vec![(
        vec![1],
        1,
        vec![
            DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]), // m = −½ is |1⟩
            DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]), // m = +½ is |0⟩
        ],
    )];
    for _ in 1..n {
        let mut next = Vec::new();
        for (steps, j2, states) in &level {
            let (ups, downs) = couple_qubit(*j2, states);
            let mut up_steps = steps.clone();
            up_steps.push(1);
            next.push((up_steps, j2 + 1, ups));
            if let Some(d) = downs {
                let mut down_steps = steps.clone();
                down_steps.push(-1);
                next.push((down_steps, j2 - 1, d));
            }
        }
        level = next;
    }
    // λ ordering: within each final J, paths sorted by their doubled-spin
    // trajectory ascending (down-step before up-step), so λ = 0 is always the
    // lowest-trajectory route (e.g. the singlet route).
    let trajectory = |steps: &[i8]| -> Vec<i64> {
        let mut t = Vec::with_capacity(steps.len());
        let mut j2 = 0i64;
        for &s in steps {
            j2 += s as i64;
            t.push(j2);
        }
        t
    };
    level.sort_by(|a, b| (a.1, trajectory(&a.0)).cmp(&(b.1, trajectory(&b.0))));
    let layout = TensorLayout::qubits(n);
    let mut multiplets = Vec::new();
    let mut lambda = 0usize;
    let mut prev_j2: Option<i64> = None;
    for (steps, j2, states) in level {
        if prev_j2 == Some(j2) {
            lambda += 1;
        } else {
            lambda = 0;
            prev_j2 = Some(j2);
        }
        let published_flip = n == 3 && j2 == 1 && lambda == 1;
        let normalized: Vec<StateVector> = states
            .into_iter()
            .map(|v| {
                let v = if published_flip {
                    v.map(|x| -x)
                } else {
                    let sign = v
                        .iter()
                        .find(|x| x.norm() > 1e-12)
                        .map(|x| if x.re < 0.0 { -1.0 } else { 1.0 })
                        .unwrap_or(1.0);
                    v.map(|x| x * c(sign, 0.0))
                };
                StateVector::new(v, layout.clone()).expect("tower state normalized")
            })
            .collect();
        multiplets.push(Multiplet {
            twice_j: j2,
            lambda,
            steps,
            states: normalized,
        });
    }
    Ok(SpinTowerBasis {
        n_qubits: n,
        multiplets,
    })
}

/// The two-dimensional J = 0 code on four qubits: |0̄⟩ = |s⟩₁₂|s⟩₃₄ and
/// |1̄⟩ the symmetric triplet-pair combination.
pub fn four_qubit_dfs() -> CodeSpace {
    let tower = spin_tower(4).unwrap();
    let zero = tower.state(0, 0, 0).unwrap().clone();
    let one = tower.state(0, 1, 0).unwrap().clone();
    CodeSpace::from_states(
        4,
        &[zero, one],
        vec![
            ColumnLabel::Spin {
                twice_j: 0,
                lambda: 0,
                twice_m: 0,
            },
            ColumnLabel::Spin {
                twice_j: 0,
                lambda: 1,
                twice_m: 0,
            },
        ],
    )
    .unwrap()
}

/// Permutation matrix swapping qubits i and j (1-based).
pub fn exchange_op(n: usize, i: usize, j: usize) -> Result<ComplexMatrix> {
    if i < 1 || j <= i || j > n {
        return Err(CodeError::BadQubitPair { i, j, n });
    }
    let d = 1usize << n;
    // Qubit k (1-based) occupies bit n−k of the basis index.
    let bi = n - i;
    let bj = n - j;
    Ok(ComplexMatrix::from_fn(d, d, |row, col| {
        let x = (col >> bi) & 1;
        let y = (col >> bj) & 1;
        let swapped = (col & !((1 << bi) | (1 << bj))) | (y << bi) | (x << bj);
        if row == swapped {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    }))
}

/// Exchange-generated logical Paulis on the four-qubit J = 0 code:
/// Z̄ = −E₁₂, X̄ = (E₂₃ − E₁₃)/√3, Ȳ = (i/2)[X̄, Z̄].
pub fn logical_paulis_4qubit() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let e12 = exchange_op(4, 1, 2).unwrap();
    let e13 = exchange_op(4, 1, 3).unwrap();
    let e23 = exchange_op(4, 2, 3).unwrap();
    let zbar = -&e12;
    let xbar = (&e23 - &e13).scale_re(1.0 / 3f64.sqrt());
    let comm = &(&xbar * &zbar) - &(&zbar * &xbar);
    let ybar = comm.scale(c(0.0, 0.5));
    (zbar, xbar, ybar)
}

/// The three-qubit noiseless subsystem: the four J = ½ states ordered
/// (λ=0, m=−½), (λ=0, m=+½), (λ=1, m=−½), (λ=1, m=+½). Logical information
/// lives in λ, the gauge in m.
pub fn three_qubit_ns_code() -> CodeSpace {
    let tower = spin_tower(3).unwrap();
    let order = [(0usize, -1i64), (0, 1), (1, -1), (1, 1)];
    let states: Vec<StateVector> = order
        .iter()
        .map(|&(lambda, twice_m)| tower.state(1, lambda, twice_m).unwrap().clone())
        .collect();
    let labels = order
        .iter()
        .map(|&(lambda, twice_m)| ColumnLabel::Spin {
            twice_j: 1,
            lambda,
            twice_m,
        })
        .collect();
    CodeSpace::from_states(3, &states, labels).unwrap()
}

/// Logical Pauli pair (Z̄ᵢ, X̄ᵢ) per qubit pair: Z̄ᵢ = Z on qubit 2i−1,
/// X̄ᵢ = X⊗X on the pair, acting on 2·n_pairs physical qubits.
pub fn pairwise_logical_ops(n_pairs: usize) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    assert!(n_pairs >= 1);
    let n = 2 * n_pairs;
    (0..n_pairs)
        .map(|i| {
            let zbar = paulis::on_qubit(&paulis::z(), 2 * i, n);
            let xbar = &paulis::on_qubit(&paulis::x(), 2 * i, n)
                * &paulis::on_qubit(&paulis::x(), 2 * i + 1, n);
            (zbar, xbar)
        })
        .collect()
}

/// Codewords |ψ_r⟩ = (|r⟩ + |r̄⟩)/√2 over even-weight strings r (r̄ the
/// bitwise complement), fixed by {I, X⊗ⁿ, Z⊗ⁿ} and by Y⊗ⁿ up to the sign iⁿ.
/// Representatives are the lexicographically smaller member of each {r, r̄}
/// pair, in ascending order.
pub fn even_weight_stabilized_code(n: usize) -> Result<CodeSpace> {
    if n % 2 != 0 || n < 2 {
        return Err(CodeError::OddN(n));
    }
    let d = 1usize << n;
    let mask = d - 1;
    let mut reps: Vec<usize> = (0..d)
        .filter(|r| r.count_ones() % 2 == 0 && *r < (!r & mask))
        .collect();
    reps.sort_unstable();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let layout = TensorLayout::qubits(n);
    let states: Vec<StateVector> = reps
        .iter()
        .map(|&r| {
            let mut v = DVector::zeros(d);
            v[r] = c(s, 0.0);
            v[!r & mask] = c(s, 0.0);
            StateVector::new(v, layout.clone()).unwrap()
        })
        .collect();
    let labels = reps
        .iter()
        .map(|&r| ColumnLabel::Word(format!("{r:0n$b}", n = n)))
        .collect();
    CodeSpace::from_states(n, &states, labels)
}

/// Logical Paulis on [`even_weight_stabilized_code`]: for logical qubit
/// j = 1..n−2, X̄ⱼ = X₁X_{j+1} and Z̄ⱼ = Z_{j+1}Z_n.
pub fn even_weight_logical_ops(n: usize) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    if n % 2 != 0 || n < 2 {
        return Err(CodeError::OddN(n));
    }
    Ok((1..=n.saturating_sub(2))
        .map(|j| {
            let zbar = &paulis::on_qubit(&paulis::z(), j, n)
                * &paulis::on_qubit(&paulis::z(), n - 1, n);
            let xbar =
                &paulis::on_qubit(&paulis::x(), 0, n) * &paulis::on_qubit(&paulis::x(), j, n);
            (zbar, xbar)
        })
        .collect())
}

/// Outcome of checking a code against the coupling operators of a
/// Hamiltonian model.
#[derive(Clone, Debug)]
pub struct HamiltonianDfsReport {
    pub ok: bool,
    /// Per-coupling candidate eigenvalue c_α = ⟨γ₀|S_α|γ₀⟩.
    pub c_alphas: Vec<C64>,
    /// Per-coupling residual ‖S_α P − c_α P‖.
    pub coupling_residuals: Vec<f64>,
    /// ‖(I − PP†) H_S P‖ — leakage induced by the system Hamiltonian.
    pub system_leakage: f64,
}

/// Checks that every coupling operator has the code columns as eigenvectors
/// with a common per-coupling eigenvalue, and that H_S keeps the code space
/// invariant.
pub fn dfs_check_hamiltonian(
    model: &HamiltonianModel,
    code: &CodeSpace,
    tol: f64,
) -> Result<HamiltonianDfsReport> {
    let p = code.isometry();
    if p.rows() != model.system_dim() {
        return Err(CodeError::DimensionMismatch(format!(
            "code on dim {} vs model system dim {}",
            p.rows(),
            model.system_dim()
        )));
    }
    let gamma0 = p.column(0);
    let mut c_alphas = Vec::new();
    let mut coupling_residuals = Vec::new();
    for (s, _) in &model.couplings {
        let sg = s.apply(&gamma0);
        let c_alpha: C64 = gamma0.iter().zip(sg.iter()).map(|(a, b)| a.conj() * b).sum();
        let residual = op_norm(&(&(s * p) - &p.scale(c_alpha)));
        c_alphas.push(c_alpha);
        coupling_residuals.push(residual);
    }
    let q_proj = &ComplexMatrix::identity(p.rows()) - &code.projector();
    let system_leakage = op_norm(&(&q_proj * &(&model.h_s * p)));
    let ok = coupling_residuals.iter().all(|&r| r < tol) && system_leakage < tol;
    Ok(HamiltonianDfsReport {
        ok,
        c_alphas,
        coupling_residuals,
        system_leakage,
    })
}

/// Outcome of checking a code against a Kraus channel: each operator must
/// act on the code block as g_α·U for one shared unitary U, with no leakage.
#[derive(Clone, Debug)]
pub struct KrausDfsReport {
    pub ok: bool,
    pub g_alphas: Vec<C64>,
    pub common_unitary: ComplexMatrix,
    /// max over α of ‖Q†K_αP‖ and ‖P†K_αQ‖.
    pub leakage: f64,
    /// max over α of ‖P†K_αP − g_α U‖.
    pub proportionality: f64,
    /// |Σ|g_α|² − 1|.
    pub weight_defect: f64,
}

pub fn dfs_check_kraus(
    ch: &crate::models::KrausChannel,
    code: &CodeSpace,
    tol: f64,
) -> Result<KrausDfsReport> {
    let p = code.isometry();
    if ch.dim() != p.rows() {
        return Err(CodeError::DimensionMismatch(format!(
            "channel dim {} vs code physical dim {}",
            ch.dim(),
            p.rows()
        )));
    }
    let q = code.complement();
    let mut leakage: f64 = 0.0;
    let mut blocks = Vec::new();
    for k in ch.ops() {
        leakage = leakage.max(op_norm(&(&q.dagger() * &(k * p))));
        leakage = leakage.max(op_norm(&(&p.dagger() * &(k * &q))));
        blocks.push(&p.dagger() * &(k * p));
    }
    let largest = blocks
        .iter()
        .max_by(|a, b| a.frobenius_norm().total_cmp(&b.frobenius_norm()))
        .unwrap();
    let u = largest.polar_unitary()?;
    let d_code = code.dim() as f64;
    let mut g_alphas = Vec::new();
    let mut proportionality: f64 = 0.0;
    for m in &blocks {
        let g = u.hs_inner(m) / c(d_code, 0.0);
        proportionality = proportionality.max(op_norm(&(m - &u.scale(g))));
        g_alphas.push(g);
    }
    let weight: f64 = g_alphas.iter().map(|g| g.norm_sqr()).sum();
    let weight_defect = (weight - 1.0).abs();
    let ok = leakage < tol && proportionality < tol && weight_defect < tol;
    Ok(KrausDfsReport {
        ok,
        g_alphas,
        common_unitary: u,
        leakage,
        proportionality,
        weight_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;
    use crate::models::{build_model, CouplingTemplate, HamiltonianModel, KrausChannel};

    fn state_matches(sv: &StateVector, expected: &[(usize, f64)], dim: usize) -> bool {
        let mut v = vec![0.0; dim];
        for &(idx, amp) in expected {
            v[idx] = amp;
        }
        (0..dim).all(|i| (sv.amplitudes()[i] - c(v[i], 0.0)).norm() < 1e-12)
    }

    #[test]
    fn collective_ops_two_qubits() {
        let ops = collective_spin_ops(2, false);
        // S_z = Z⊗I + I⊗Z has eigenvalues {2, 0, 0, −2}.
        let evs = ops.s_z.hermitian_eigenvalues();
        let expect = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in evs.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // S_x = S₊ + S₋ and S_y = i(S₊ − S₋) in the unit convention.
        let sx = &ops.s_plus + &ops.s_minus;
        assert!((&sx - &ops.s_x).max_abs_entry() < 1e-12);
        let sy = (&ops.s_plus - &ops.s_minus).scale(c(0.0, 1.0));
        assert!((&sy - &ops.s_y).max_abs_entry() < 1e-12);
        // [S⃗², S_z] = 0.
        let comm = &(&ops.s_sq * &ops.s_z) - &(&ops.s_z * &ops.s_sq);
        assert!(comm.max_abs_entry() < 1e-12);
    }

    #[test]
    fn sl2_commutator_half_spin() {
        let ops = collective_spin_ops(2, true);
        // [S₋, S₊] = S_z with unit-normalized S_z = 2·(halved S_z).
        let comm = &(&ops.s_minus * &ops.s_plus) - &(&ops.s_plus * &ops.s_minus);
        assert!((&comm - &ops.s_z.scale_re(2.0)).max_abs_entry() < 1e-12);
    }

    #[test]
    fn single_spin_casimir() {
        let ops = collective_spin_ops(1, true);
        let expect = ComplexMatrix::identity(2).scale_re(0.75);
        assert!((&ops.s_sq - &expect).max_abs_entry() < 1e-12);
    }

    #[test]
    fn dephasing_dfs_dimensions() {
        let spaces = dephasing_dfs_enumerate(2);
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![1, 2, 1]);
        // The dim-2 space (c_z = 0) spans {|01⟩, |10⟩}.
        let mid = &spaces[1];
        assert_eq!(mid.labels()[0], ColumnLabel::Weight(0));
        assert!((mid.isometry().get(1, 0) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((mid.isometry().get(2, 1) - c(1.0, 0.0)).norm() < 1e-14);

        let dims3: Vec<usize> = dephasing_dfs_enumerate(3).iter().map(|s| s.dim()).collect();
        assert_eq!(dims3, vec![1, 3, 3, 1]);
        let four = dephasing_dfs_enumerate(4);
        // c_z = 0 sits in the middle with dimension C(4,2) = 6.
        assert_eq!(four[2].dim(), 6);
        assert_eq!(four[2].labels()[0], ColumnLabel::Weight(0));
    }

    #[test]
    fn bratteli_counts() {
        assert_eq!(bratteli_paths(3, 1), 2); // n_{1/2} at N=3
        assert_eq!(bratteli_paths(4, 0), 2); // two singlet routes at N=4
        assert_eq!(bratteli_paths(6, 0), 5); // Catalan-type d₆
        assert_eq!(bratteli_paths(3, 0), 0); // infeasible parity
        for n in 1..=10usize {
            let mut total = 0u128;
            for j2 in 0..=(n as i64) {
                let paths = bratteli_paths(n, j2);
                assert_eq!(paths, multiplicity_closed_form(n, j2));
                total += paths * (j2 as u128 + 1);
            }
            assert_eq!(total, 1u128 << n); // Σ n_J (2J+1) = 2^n
        }
    }

    #[test]
    fn tower_singlet_and_triplet() {
        let tower = spin_tower(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Singlet (|01⟩ − |10⟩)/√2.
        let singlet = tower.state(0, 0, 0).unwrap();
        assert!(state_matches(singlet, &[(1, s), (2, -s)], 4));
        // Triplet m = +1 is |00⟩ (|0⟩ = spin-up).
        let top = tower.state(2, 0, 2).unwrap();
        assert!(state_matches(top, &[(0, 1.0)], 4));
        let mid = tower.state(2, 0, 0).unwrap();
        assert!(state_matches(mid, &[(1, s), (2, s)], 4));
    }

    #[test]
    fn tower_three_qubit_published_states() {
        let tower = spin_tower(3).unwrap();
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let s6 = 1.0 / 6f64.sqrt();
        // λ = 0 (singlet route): (|011⟩−|101⟩)/√2 and (|010⟩−|100⟩)/√2.
        assert!(state_matches(tower.state(1, 0, -1).unwrap(), &[(3, s2), (5, -s2)], 8));
        assert!(state_matches(tower.state(1, 0, 1).unwrap(), &[(2, s2), (4, -s2)], 8));
        // λ = 1 (triplet route): (2|110⟩−|011⟩−|101⟩)/√6 and (|010⟩+|100⟩−2|001⟩)/√6.
        assert!(state_matches(
            tower.state(1, 1, -1).unwrap(),
            &[(6, 2.0 * s6), (3, -s6), (5, -s6)],
            8
        ));
        assert!(state_matches(
            tower.state(1, 1, 1).unwrap(),
            &[(2, s6), (4, s6), (1, -2.0 * s6)],
            8
        ));
    }

    #[test]
    fn tower_orthonormal_complete_eigenbasis() {
        for n in 1..=5usize {
            let tower = spin_tower(n).unwrap();
            assert_eq!(tower.total_states(), 1 << n);
            let ops = collective_spin_ops(n, true);
            let mut all: Vec<&StateVector> = Vec::new();
            for mult in &tower.multiplets {
                let j = mult.twice_j as f64 / 2.0;
                let mut m = -mult.twice_j;
                for sv in &mult.states {
                    // S⃗² eigenvalue J(J+1), S_z eigenvalue m.
                    let v = sv.amplitudes();
                    let s2v = ops.s_sq.apply(v);
                    let target = v.map(|x| x * c(j * (j + 1.0), 0.0));
                    assert!((s2v - target).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-10);
                    let szv = ops.s_z.apply(v);
                    let target = v.map(|x| x * c(m as f64 / 2.0, 0.0));
                    assert!((szv - target).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-10);
                    all.push(sv);
                    m += 2;
                }
            }
            for (i, a) in all.iter().enumerate() {
                for (k, b) in all.iter().enumerate() {
                    let ip = a.inner(b);
                    let expect = if i == k { 1.0 } else { 0.0 };
                    assert!((ip - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tower_multiplicities_match_path_counts() {
        for n in 1..=6usize {
            let tower = spin_tower(n).unwrap();
            for j2 in 0..=(n as i64) {
                let count = tower.multiplets.iter().filter(|m| m.twice_j == j2).count();
                assert_eq!(count as u128, bratteli_paths(n, j2));
            }
        }
    }

    #[test]
    fn four_qubit_code_published_amplitudes() {
        let code = four_qubit_dfs();
        let iso = code.isometry();
        // |0̄⟩ = ½(|0101⟩ − |0110⟩ − |1001⟩ + |1010⟩)
        let zero_expect: [(usize, f64); 4] = [(0b0101, 0.5), (0b0110, -0.5), (0b1001, -0.5), (0b1010, 0.5)];
        for i in 0..16 {
            let want = zero_expect
                .iter()
                .find(|&&(idx, _)| idx == i)
                .map(|&(_, a)| a)
                .unwrap_or(0.0);
            assert!((iso.get(i, 0) - c(want, 0.0)).norm() < 1e-12, "row {i}");
        }
        // |1̄⟩ = (1/√3)(|1100⟩+|0011⟩−½|0101⟩−½|0110⟩−½|1001⟩−½|1010⟩)
        let s3 = 1.0 / 3f64.sqrt();
        let one_expect: [(usize, f64); 6] = [
            (0b1100, s3),
            (0b0011, s3),
            (0b0101, -0.5 * s3),
            (0b0110, -0.5 * s3),
            (0b1001, -0.5 * s3),
            (0b1010, -0.5 * s3),
        ];
        for i in 0..16 {
            let want = one_expect
                .iter()
                .find(|&&(idx, _)| idx == i)
                .map(|&(_, a)| a)
                .unwrap_or(0.0);
            assert!((iso.get(i, 1) - c(want, 0.0)).norm() < 1e-12, "row {i}");
        }
        // Both columns are annihilated by all collective spin components.
        let ops = collective_spin_ops(4, false);
        for op in [&ops.s_plus, &ops.s_minus, &ops.s_z] {
            assert!(op_norm(&(op * iso)) < 1e-12);
        }
    }

    #[test]
    fn exchange_basics() {
        let e = exchange_op(2, 1, 2).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]);
        assert!((&e - &expect).max_abs_entry() < 1e-15);
        // Involution and Heisenberg form ½(S⃗ᵢ·S⃗ⱼ + I).
        assert!((&(&e * &e) - &ComplexMatrix::identity(4)).max_abs_entry() < 1e-15);
        let heisenberg = {
            let mut h = ComplexMatrix::identity(4);
            for op in [paulis::x(), paulis::y(), paulis::z()] {
                h = &h + &tensor(&op, &op);
            }
            h.scale_re(0.5)
        };
        assert!((&e - &heisenberg).max_abs_entry() < 1e-12);
        assert!(exchange_op(2, 2, 2).is_err());
    }

    #[test]
    fn exchange_group_identities() {
        for n in 3..=4usize {
            // E_ij E_jk E_ij = E_ik — conjugating a transposition.
            for i in 1..=n {
                for j in (i + 1)..=n {
                    for k in (j + 1)..=n {
                        let eij = exchange_op(n, i, j).unwrap();
                        let ejk = exchange_op(n, j, k).unwrap();
                        let eik = exchange_op(n, i, k).unwrap();
                        let lhs = &(&eij * &ejk) * &eij;
                        assert!((&lhs - &eik).max_abs_entry() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn exchange_commutes_with_collective_coupling() {
        let ops = collective_spin_ops(3, false);
        for i in 1..=3usize {
            for j in (i + 1)..=3 {
                let e = exchange_op(3, i, j).unwrap();
                for s in [&ops.s_x, &ops.s_y, &ops.s_z] {
                    let comm = &(&e * s) - &(s * &e);
                    assert!(comm.max_abs_entry() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn four_qubit_logical_paulis() {
        let (zbar, xbar, ybar) = logical_paulis_4qubit();
        let code = four_qubit_dfs();
        let p = code.isometry();
        let zero = p.column(0);
        let one = p.column(1);
        // Z̄|0̄⟩ = |0̄⟩, Z̄|1̄⟩ = −|1̄⟩.
        let z0 = zbar.apply(&zero);
        assert!((&z0 - &zero).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-12);
        let z1 = zbar.apply(&one);
        assert!((z1 + &one).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-12);
        // X̄|0̄⟩ = |1̄⟩ up to 1e-12 (unit overlap, no residual).
        let x0 = xbar.apply(&zero);
        assert!((&x0 - &one).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-12);
        // Restricted to the code, {X̄, Z̄} = 0 and Ȳ = iX̄Z̄ acts as a Pauli.
        let anti = &(&xbar * &zbar) + &(&zbar * &xbar);
        assert!(op_norm(&(&(&p.dagger() * &anti) * p)) < 1e-12);
        let y_res = &(&p.dagger() * &(&ybar * &ybar)) * p;
        assert!((&y_res - &ComplexMatrix::identity(2)).max_abs_entry() < 1e-12);
    }

    #[test]
    fn three_qubit_ns_exchange_action() {
        let code = three_qubit_ns_code();
        let p = code.isometry();
        // E₁₂ restricted = diag(−1,−1,1,1) = −σᶻ⊗I in the (λ, m) ordering.
        let e12 = exchange_op(3, 1, 2).unwrap();
        let r12 = &(&p.dagger() * &(&e12 * p)) - &ComplexMatrix::zeros(4, 4);
        let expect = ComplexMatrix::from_real_rows(&[
            vec![-1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]);
        assert!((&r12 - &expect).max_abs_entry() < 1e-12);
        // (E₁₃ − E₂₃)/√3 restricted = σˣ⊗I.
        let e13 = exchange_op(3, 1, 3).unwrap();
        let e23 = exchange_op(3, 2, 3).unwrap();
        let xlog = (&e13 - &e23).scale_re(1.0 / 3f64.sqrt());
        let rx = &p.dagger() * &(&xlog * p);
        let expect = tensor(&paulis::x(), &ComplexMatrix::identity(2));
        assert!((&rx - &expect).max_abs_entry() < 1e-12);
        // Dimension bookkeeping 2·2 + 1·4 = 8.
        assert_eq!(code.dim(), 4);
        assert_eq!(bratteli_paths(3, 1) as usize * 2 + bratteli_paths(3, 3) as usize * 4, 8);
    }

    #[test]
    fn pairwise_logicals() {
        let ops = pairwise_logical_ops(2);
        assert_eq!(ops.len(), 2);
        let (zbar, xbar) = &ops[0];
        // On the first pair: Z̄|01⟩ = |01⟩, Z̄|10⟩ = −|10⟩, X̄|01⟩ = |10⟩.
        let v01 = StateVector::from_bits(&[0, 1, 0, 1]);
        let v10_first = StateVector::from_bits(&[1, 0, 0, 1]);
        let z01 = zbar.apply(v01.amplitudes());
        assert!((&z01 - v01.amplitudes()).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-14);
        let z10 = zbar.apply(v10_first.amplitudes());
        assert!((z10 + v10_first.amplitudes()).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-14);
        let x01 = xbar.apply(v01.amplitudes());
        assert!((&x01 - v10_first.amplitudes()).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-14);
        // Disjoint supports commute.
        let (z1, _) = &ops[0];
        let (_, x2) = &ops[1];
        let comm = &(z1 * x2) - &(x2 * z1);
        assert!(comm.max_abs_entry() < 1e-14);
    }

    #[test]
    fn even_weight_code_small() {
        let code2 = even_weight_stabilized_code(2).unwrap();
        assert_eq!(code2.dim(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((code2.isometry().get(0, 0) - c(s, 0.0)).norm() < 1e-14);
        assert!((code2.isometry().get(3, 0) - c(s, 0.0)).norm() < 1e-14);

        let code4 = even_weight_stabilized_code(4).unwrap();
        assert_eq!(code4.dim(), 4);
        // (|0011⟩+|1100⟩)/√2 appears as a codeword.
        let found = (0..4).any(|j| {
            (code4.isometry().get(0b0011, j) - c(s, 0.0)).norm() < 1e-14
                && (code4.isometry().get(0b1100, j) - c(s, 0.0)).norm() < 1e-14
        });
        assert!(found);
        assert!(even_weight_stabilized_code(3).is_err());

        // X⊗ⁿ and Z⊗ⁿ fix every codeword; Y⊗ⁿ fixes up to the sign iⁿ.
        for n in [2usize, 4, 6] {
            let code = even_weight_stabilized_code(n).unwrap();
            let p = code.isometry();
            for axis in [1u8, 3] {
                let g = paulis::string(&vec![axis; n]);
                assert!(op_norm(&(&(&g * p) - p)) < 1e-12);
            }
            let y = paulis::string(&vec![2u8; n]);
            let sign = if n % 4 == 0 { 1.0 } else { -1.0 };
            assert!(op_norm(&(&(&y * p) - &p.scale_re(sign))) < 1e-12);
        }
    }

    #[test]
    fn even_weight_logical_action() {
        let n = 4;
        let code = even_weight_stabilized_code(n).unwrap();
        let p = code.isometry();
        let proj = code.projector();
        for (zbar, xbar) in even_weight_logical_ops(n).unwrap() {
            // Both preserve the code space...
            for op in [&zbar, &xbar] {
                let leak = &(op * &proj) - &(&proj * &(op * &proj));
                assert!(op_norm(&leak) < 1e-12);
            }
            // ...and anticommute on it (logical Pauli pair).
            let anti = &(&zbar * &xbar) + &(&xbar * &zbar);
            assert!(op_norm(&(&(&p.dagger() * &anti) * p)) < 1e-12);
        }
        // X₁X₂ realizes logical X on the first logical qubit: it permutes
        // codewords and flips the Z̄₁ = Z₂Z₄ eigenvalue.
        let ops = even_weight_logical_ops(n).unwrap();
        let (z1, x1) = &ops[0];
        let z_in = &p.dagger() * &(z1 * p);
        let x_in = &p.dagger() * &(x1 * p);
        let anti = &(&z_in * &x_in) + &(&x_in * &z_in);
        assert!(anti.max_abs_entry() < 1e-12);
        // |ψ_0011⟩ has Z̄₁ = −1 (logical one), |ψ_0000⟩ has +1 (logical zero).
        let col_of = |bits: usize| {
            (0..p.cols())
                .find(|&j| p.get(bits, j).norm() > 0.5)
                .unwrap()
        };
        assert!((z_in.get(col_of(0b0000), col_of(0b0000)) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((z_in.get(col_of(0b0011), col_of(0b0011)) - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hamiltonian_check_dephasing_and_decoherence() {
        // Collective dephasing on 2 qubits: the c_z = 0 space passes with c = 0.
        let m = build_model(CouplingTemplate::CollectiveDephasing, 2, 2, 1.0, 0.5, 1).unwrap();
        let spaces = dephasing_dfs_enumerate(2);
        let rep = dfs_check_hamiltonian(&m, &spaces[1], 1e-9).unwrap();
        assert!(rep.ok);
        assert!(rep.c_alphas[0].norm() < 1e-12);

        // Collective decoherence: the singlet passes with all c_α = 0 ...
        let md = build_model(CouplingTemplate::CollectiveDecoherence, 2, 2, 1.0, 0.5, 1).unwrap();
        let tower = spin_tower(2).unwrap();
        let singlet = CodeSpace::from_states(
            2,
            &[tower.state(0, 0, 0).unwrap().clone()],
            vec![ColumnLabel::Unlabeled],
        )
        .unwrap();
        let rep = dfs_check_hamiltonian(&md, &singlet, 1e-9).unwrap();
        assert!(rep.ok);
        for ca in &rep.c_alphas {
            assert!(ca.norm() < 1e-12);
        }
        // ... but the triplet subspace does not.
        let triplet = CodeSpace::from_states(
            2,
            &[
                tower.state(2, 0, -2).unwrap().clone(),
                tower.state(2, 0, 0).unwrap().clone(),
                tower.state(2, 0, 2).unwrap().clone(),
            ],
            vec![ColumnLabel::Unlabeled; 3],
        )
        .unwrap();
        let rep = dfs_check_hamiltonian(&md, &triplet, 1e-9).unwrap();
        assert!(!rep.ok);
    }

    #[test]
    fn tower_singlets_pass_collective_decoherence() {
        for n in [2usize, 4] {
            let model = build_model(CouplingTemplate::CollectiveDecoherence, n, 2, 1.0, 0.5, 7).unwrap();
            let tower = spin_tower(n).unwrap();
            for mult in tower.multiplets.iter().filter(|m| m.twice_j == 0) {
                let code = CodeSpace::from_states(
                    n,
                    &[mult.states[0].clone()],
                    vec![ColumnLabel::Unlabeled],
                )
                .unwrap();
                let rep = dfs_check_hamiltonian(&model, &code, 1e-9).unwrap();
                assert!(rep.ok);
                for ca in &rep.c_alphas {
                    assert!(ca.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn kraus_check_accepts_and_rejects() {
        let p = 0.3_f64;
        let id2 = ComplexMatrix::identity(2);
        // {√(1−p)·III, √p·ZZI} on Span{|00⟩,|11⟩}⊗qubit: a DFS with U = I.
        let iii = ComplexMatrix::identity(8);
        let zzi = tensor(&tensor(&paulis::z(), &paulis::z()), &id2);
        let ch = KrausChannel::new(vec![iii.scale_re((1.0 - p).sqrt()), zzi.scale_re(p.sqrt())]).unwrap();
        // Code columns: |000⟩,|001⟩,|110⟩,|111⟩.
        let cols = [0b000usize, 0b001, 0b110, 0b111];
        let iso = ComplexMatrix::from_fn(8, 4, |i, j| {
            if i == cols[j] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let code = CodeSpace::new(3, iso, vec![ColumnLabel::Unlabeled; 4]).unwrap();
        let rep = dfs_check_kraus(&ch, &code, 1e-9).unwrap();
        assert!(rep.ok);
        assert!((rep.g_alphas[0] - c((1.0 - p).sqrt(), 0.0)).norm() < 1e-10);
        assert!((rep.g_alphas[1].norm() - p.sqrt()).abs() < 1e-10);
        assert!((&rep.common_unitary - &ComplexMatrix::identity(4)).max_abs_entry() < 1e-9);

        // {√(1−p) I⊗I, √p Z⊗I} on Span{|00⟩,|01⟩}: the first qubit is fixed
        // at |0⟩, so Z⊗I acts as +1 on the whole block — a valid DFS.
        let ch2 = KrausChannel::new(vec![
            tensor(&id2, &id2).scale_re((1.0 - p).sqrt()),
            tensor(&paulis::z(), &id2).scale_re(p.sqrt()),
        ])
        .unwrap();
        let iso2 = ComplexMatrix::from_fn(4, 2, |i, j| {
            if i == j {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let code2 = CodeSpace::new(2, iso2, vec![ColumnLabel::Unlabeled; 2]).unwrap();
        let rep2 = dfs_check_kraus(&ch2, &code2, 1e-9).unwrap();
        assert!(rep2.ok);
    }

    #[test]
    fn kraus_check_rejects_mixed_block() {
        // Code Span{|00⟩, |10⟩}: K₁ = √p Z⊗I restricted is √p·diag(1,−1),
        // K₀ restricted is √(1−p)·I — not multiples of one unitary.
        let p = 0.4_f64;
        let id2 = ComplexMatrix::identity(2);
        let ch = KrausChannel::new(vec![
            tensor(&id2, &id2).scale_re((1.0 - p).sqrt()),
            tensor(&paulis::z(), &id2).scale_re(p.sqrt()),
        ])
        .unwrap();
        let cols = [0b00usize, 0b10];
        let iso = ComplexMatrix::from_fn(4, 2, |i, j| {
            if i == cols[j] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let code = CodeSpace::new(2, iso, vec![ColumnLabel::Unlabeled; 2]).unwrap();
        let rep = dfs_check_kraus(&ch, &code, 1e-9).unwrap();
        assert!(!rep.ok);
        assert!(rep.proportionality > 1e-3);
    }

    #[test]
    fn identity_channel_passes_any_code() {
        let ch = KrausChannel::new(vec![ComplexMatrix::identity(16)]).unwrap();
        let code = four_qubit_dfs();
        let rep = dfs_check_kraus(&ch, &code, 1e-9).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn code_text_round_trip() {
        let code = four_qubit_dfs();
        let text = code.to_text();
        let back = CodeSpace::from_text(4, &text).unwrap();
        assert!((back.isometry() - code.isometry()).max_abs_entry() < 1e-15);
    }

    #[test]
    fn hs_dfs_model_dimension_mismatch() {
        let m = HamiltonianModel::new(1, 2, None, None, vec![]).unwrap();
        let code = four_qubit_dfs();
        assert!(dfs_check_hamiltonian(&m, &code, 1e-9).is_err());
    }
}
