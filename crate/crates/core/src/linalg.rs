//! Dense complex linear algebra: tensor products, partial trace,
//! Hermitian/unitary matrix functions, norms, and comparison utilities.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub type C64 = num_complex::Complex<f64>;

/// Largest total dimension we support (6 system qubits times a bath of
/// dimension 64). Asserted at construction.
pub const MAX_DIM: usize = 4096;

/// Default tolerance for structural predicates (Hermitian, unitary, PSD).
pub const STRUCT_TOL: f64 = 1e-10;
/// Default tolerance for algebraic identities on well-conditioned small matrices.
pub const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian within tolerance {0}")]
    NotHermitian(f64),
    #[error("matrix is not unitary within tolerance {0}")]
    NotUnitary(f64),
    #[error("factor index {index} out of range for {nfactors} factors")]
    IndexOutOfRange { index: usize, nfactors: usize },
    #[error("eigenphase within {0} of the principal-branch cut at ±π")]
    BranchAmbiguity(f64),
    #[error("layout dims {layout} do not match dimension {dim}")]
    LayoutMismatch { layout: usize, dim: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix in row-major entry order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.rows(), self.cols())
    }
}

impl ComplexMatrix {
    pub fn from_dmatrix(inner: DMatrix<C64>) -> Self {
        assert!(
            inner.nrows() <= MAX_DIM && inner.ncols() <= MAX_DIM,
            "matrix dimension {}x{} exceeds supported maximum {}",
            inner.nrows(),
            inner.ncols(),
            MAX_DIM
        );
        Self { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_dmatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_dmatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Row-major construction from nested slices.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        Self::from_fn(nr, nc, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        Self::from_fn(nr, nc, |i, j| c(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn dagger(&self) -> Self {
        Self::from_dmatrix(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_dmatrix(self.inner.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_dmatrix(self.inner.conjugate())
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_dmatrix(self.inner.map(|x| x * s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    /// Hilbert-Schmidt inner product Tr(A† B).
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.inner * v
    }

    pub fn column(&self, j: usize) -> DVector<C64> {
        self.inner.column(j).into_owned()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.dagger()).max_abs_entry() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let d = self.rows();
        (&(&self.dagger() * self) - &Self::identity(d)).max_abs_entry() <= tol
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        self.hermitian_eigenvalues().iter().all(|&x| x >= -tol)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let eig = self.inner.clone().symmetric_eigen();
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Eigendecomposition of a Hermitian matrix: returns (eigenvalues, V)
    /// with self = V diag(w) V†, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.inner.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let w: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let d = self.rows();
        let v = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
        (w, ComplexMatrix::from_dmatrix(v))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.inner.clone().svd(false, false);
        let mut v: Vec<f64> = svd.singular_values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v.reverse();
        v
    }

    /// Unitary polar factor: for A = U P with P positive semidefinite,
    /// returns U (computed as W V† from the SVD A = W Σ V†).
    pub fn polar_unitary(&self) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(
                "polar factor needs a square matrix".into(),
            ));
        }
        let svd = self.inner.clone().svd(true, true);
        let u = svd
            .u
            .ok_or_else(|| LinalgError::Numerical("SVD did not return U".into()))?;
        let vt = svd
            .v_t
            .ok_or_else(|| LinalgError::Numerical("SVD did not return V^T".into()))?;
        Ok(ComplexMatrix::from_dmatrix(u * vt))
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner + &rhs.inner)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner - &rhs.inner)
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner * &rhs.inner)
    }
}

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Ordered tensor-factor dimensions annotating a matrix or vector; system
/// factors precede the single bath factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    factor_dims: Vec<usize>,
}

impl TensorLayout {
    pub fn new(factor_dims: Vec<usize>) -> Self {
        assert!(
            factor_dims.iter().all(|&d| d >= 1),
            "factor dims must be positive"
        );
        assert!(!factor_dims.is_empty(), "layout needs at least one factor");
        Self { factor_dims }
    }

    /// n qubit factors followed by one bath factor.
    pub fn qubits_with_bath(n_qubits: usize, bath_dim: usize) -> Self {
        let mut dims = vec![2; n_qubits];
        dims.push(bath_dim);
        Self::new(dims)
    }

    pub fn qubits(n_qubits: usize) -> Self {
        Self::new(vec![2; n_qubits])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.total_dim() != dim {
            return Err(LinalgError::LayoutMismatch {
                layout: self.total_dim(),
                dim,
            });
        }
        Ok(())
    }
}

/// Pure state with tensor-factor layout; kept normalized to 1 within 1e-12.
#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    layout: TensorLayout,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>, layout: TensorLayout) -> Result<Self> {
        layout.check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LinalgError::Numerical(format!(
                "state norm {norm} is not 1 within 1e-12"
            )));
        }
        Ok(Self { amplitudes, layout })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amplitudes: DVector<C64>, layout: TensorLayout) -> Result<Self> {
        let norm = amplitudes.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(LinalgError::Numerical("cannot normalize zero vector".into()));
        }
        Self::new(amplitudes.map(|x| x / norm), layout)
    }

    pub fn basis_state(layout: TensorLayout, index: usize) -> Self {
        let d = layout.total_dim();
        let mut v = DVector::zeros(d);
        v[index] = c(1.0, 0.0);
        Self { amplitudes: v, layout }
    }

    /// Computational basis state |bits⟩ over qubit factors.
    pub fn from_bits(bits: &[u8]) -> Self {
        let idx = bits.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
        Self::basis_state(TensorLayout::qubits(bits.len()), idx)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.layout.factor_dims().to_vec();
        dims.extend_from_slice(other.layout.factor_dims());
        let d1 = self.dim();
        let d2 = other.dim();
        let mut v = DVector::zeros(d1 * d2);
        for i in 0..d1 {
            for j in 0..d2 {
                v[i * d2 + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        StateVector {
            amplitudes: v,
            layout: TensorLayout::new(dims),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix {
            matrix: m,
            layout: self.layout.clone(),
        }
    }
}

/// Density operator with tensor-factor layout. Hermitian, unit trace,
/// eigenvalues bounded below by -1e-10.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: TensorLayout,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, layout: TensorLayout) -> Result<Self> {
        layout.check_dim(matrix.rows())?;
        if !matrix.is_hermitian(1e-12) {
            return Err(LinalgError::NotHermitian(1e-12));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(LinalgError::Numerical(format!(
                "density trace {tr} is not 1 within 1e-12"
            )));
        }
        if matrix.hermitian_eigenvalues().iter().any(|&x| x < -1e-10) {
            return Err(LinalgError::Numerical(
                "density matrix has eigenvalue below -1e-10".into(),
            ));
        }
        Ok(Self { matrix, layout })
    }

    pub fn maximally_mixed(layout: TensorLayout) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
            layout,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.layout.factor_dims().to_vec();
        dims.extend_from_slice(other.layout.factor_dims());
        DensityMatrix {
            matrix: tensor(&self.matrix, &other.matrix),
            layout: TensorLayout::new(dims),
        }
    }

    /// Conjugation rho -> U rho U† without revalidating invariants.
    pub fn conjugated(&self, u: &ComplexMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: &(u * &self.matrix) * &u.dagger(),
            layout: self.layout.clone(),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.layout, keep)?;
        let dims: Vec<usize> = keep
            .iter()
            .map(|&k| self.layout.factor_dims()[k])
            .collect();
        Ok(DensityMatrix {
            matrix: m,
            layout: TensorLayout::new(dims),
        })
    }

    /// Raw constructor for internal use where invariants are preserved by
    /// construction (e.g. channel application).
    pub(crate) fn from_parts(matrix: ComplexMatrix, layout: TensorLayout) -> Self {
        Self { matrix, layout }
    }
}

/// Kronecker product with a's indices major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Kronecker product of a list, left to right.
pub fn tensor_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!ms.is_empty());
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = tensor(&acc, m);
    }
    acc
}

fn compose_index(dims: &[usize], keep: &[usize], rest: &[usize], ik: &[usize], ir: &[usize]) -> usize {
    let mut full = vec![0usize; dims.len()];
    for (pos, &f) in keep.iter().enumerate() {
        full[f] = ik[pos];
    }
    for (pos, &f) in rest.iter().enumerate() {
        full[f] = ir[pos];
    }
    let mut idx = 0;
    for (f, &d) in dims.iter().enumerate() {
        idx = idx * d + full[f];
    }
    idx
}

fn multi_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for prefix in &out {
            for k in 0..d {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Trace out the factors not listed in `keep`. Kept factors stay in their
/// original relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &TensorLayout,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    layout.check_dim(m.rows())?;
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(
            "partial trace needs a square matrix".into(),
        ));
    }
    let nf = layout.n_factors();
    for &k in keep {
        if k >= nf {
            return Err(LinalgError::IndexOutOfRange {
                index: k,
                nfactors: nf,
            });
        }
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let rest: Vec<usize> = (0..nf).filter(|f| !keep_sorted.contains(f)).collect();
    let dims = layout.factor_dims();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&f| dims[f]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&f| dims[f]).collect();
    let dk: usize = keep_dims.iter().product();
    let keep_idx = multi_indices(&keep_dims);
    let rest_idx = multi_indices(&rest_dims);
    let mut out = DMatrix::zeros(dk, dk);
    for (oi, ik) in keep_idx.iter().enumerate() {
        for (oj, jk) in keep_idx.iter().enumerate() {
            let mut s = c(0.0, 0.0);
            for ir in &rest_idx {
                let row = compose_index(dims, &keep_sorted, &rest, ik, ir);
                let col = compose_index(dims, &keep_sorted, &rest, jk, ir);
                s += m.get(row, col);
            }
            out[(oi, oj)] = s;
        }
    }
    Ok(ComplexMatrix::from_dmatrix(out))
}

/// exp(-i t h) for Hermitian h, via eigendecomposition; exactly unitary up
/// to rounding.
pub fn expm_skew_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !h.is_hermitian(STRUCT_TOL) {
        return Err(LinalgError::NotHermitian(STRUCT_TOL));
    }
    let (w, v) = h.hermitian_eigen();
    let d = h.rows();
    let phase = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let th = -t * w[i];
            c(th.cos(), th.sin())
        } else {
            c(0.0, 0.0)
        }
    });
    Ok(ComplexMatrix::from_dmatrix(
        v.inner() * phase * v.inner().adjoint(),
    ))
}

/// Principal-branch Hermitian logarithm of a unitary: returns H with
/// u = exp(-iH) and eigenphases in (-π, π).
///
/// Uses the complex Schur decomposition u = QTQ†; for a unitary (hence
/// normal) matrix T is diagonal, which is verified before the phases are
/// read off, so near-degenerate eigenvalue clusters cause no conditioning
/// trouble.
pub fn logm_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_unitary(STRUCT_TOL) {
        return Err(LinalgError::NotUnitary(STRUCT_TOL));
    }
    let d = u.rows();
    let schur = u
        .inner()
        .clone()
        .try_schur(1e-14, 0)
        .ok_or_else(|| LinalgError::Numerical("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut offdiag: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                offdiag = offdiag.max(t[(i, j)].norm());
            }
        }
    }
    if offdiag > 1e-9 {
        return Err(LinalgError::Numerical(format!(
            "failed to diagonalize unitary (off-diagonal residual {offdiag:.2e})"
        )));
    }
    let mut phases = Vec::with_capacity(d);
    for i in 0..d {
        let theta = -t[(i, i)].arg();
        if theta.abs() > std::f64::consts::PI - 1e-6 {
            return Err(LinalgError::BranchAmbiguity(1e-6));
        }
        phases.push(theta);
    }
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { c(phases[i], 0.0) } else { c(0.0, 0.0) });
    Ok(ComplexMatrix::from_dmatrix(&q * diag * q.adjoint()))
}

/// Largest singular value.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    m.singular_values()[0]
}

/// sqrt(1 - |Tr(u† v)| / d); zero iff u = e^{iφ} v.
pub fn distance_up_to_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() || !u.is_square() {
        return Err(LinalgError::DimensionMismatch(
            "phase distance needs square matrices of equal dimension".into(),
        ));
    }
    let d = u.rows() as f64;
    let overlap = (&u.dagger() * v).trace().norm() / d;
    Ok((1.0 - overlap).max(0.0).sqrt())
}

/// Single-qubit Paulis and small constructors.
pub mod paulis {
    use super::{c, tensor, tensor_all, ComplexMatrix};

    pub fn identity2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(s, 0.0)],
            vec![c(s, 0.0), c(-s, 0.0)],
        ])
    }

    /// Raising operator |1><0| (σ⁺|0⟩ = |1⟩ convention).
    pub fn raise() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
    }

    pub fn lower() -> ComplexMatrix {
        raise().dagger()
    }

    /// Single-qubit operator embedded at 0-based position `pos` of n qubits.
    pub fn on_qubit(op: &ComplexMatrix, pos: usize, n: usize) -> ComplexMatrix {
        assert!(pos < n);
        let mut acc = if pos == 0 {
            op.clone()
        } else {
            ComplexMatrix::identity(1 << pos)
        };
        if pos > 0 {
            acc = tensor(&acc, op);
        }
        let rest = n - pos - 1;
        if rest > 0 {
            acc = tensor(&acc, &ComplexMatrix::identity(1 << rest));
        }
        acc
    }

    /// Pauli string over n qubits; axes[i] in 0..=3 meaning I, X, Y, Z.
    pub fn string(axes: &[u8]) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = axes
            .iter()
            .map(|&a| match a {
                0 => identity2(),
                1 => x(),
                2 => y(),
                3 => z(),
                _ => panic!("axis out of range"),
            })
            .collect();
        let refs: Vec<&ComplexMatrix> = factors.iter().collect();
        tensor_all(&refs)
    }

    /// All 4^n Pauli strings with their axis labels, in lexicographic order.
    pub fn all_strings(n: usize) -> Vec<(Vec<u8>, ComplexMatrix)> {
        let mut out = Vec::with_capacity(1 << (2 * n));
        for code in 0..(1usize << (2 * n)) {
            let mut axes = vec![0u8; n];
            let mut rem = code;
            for i in (0..n).rev() {
                axes[i] = (rem % 4) as u8;
                rem /= 4;
            }
            out.push((axes.clone(), string(&axes)));
        }
        out
    }
}

/// Shared plain-text matrix format: a header line `rows cols` followed by
/// `rows` lines of whitespace-separated `re im` pairs, 17 significant digits.
/// Files may hold several matrices back to back.
pub mod textfmt {
    use super::{c, ComplexMatrix, LinalgError, Result};

    pub fn write_matrix(out: &mut String, m: &ComplexMatrix) {
        use std::fmt::Write;
        writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
        for i in 0..m.rows() {
            let mut row = String::new();
            for j in 0..m.cols() {
                let e = m.get(i, j);
                if j > 0 {
                    row.push(' ');
                }
                write!(row, "{:.16e} {:.16e}", e.re, e.im).unwrap();
            }
            out.push_str(&row);
            out.push('\n');
        }
    }

    pub fn to_text(ms: &[&ComplexMatrix]) -> String {
        let mut s = String::new();
        for m in ms {
            write_matrix(&mut s, m);
        }
        s
    }

    pub fn parse_matrices(text: &str) -> Result<Vec<ComplexMatrix>> {
        let mut tokens = text.split_whitespace().peekable();
        let mut out = Vec::new();
        while tokens.peek().is_some() {
            let rows: usize = tokens
                .next()
                .unwrap()
                .parse()
                .map_err(|e| LinalgError::Numerical(format!("bad row count: {e}")))?;
            let cols: usize = tokens
                .next()
                .ok_or_else(|| LinalgError::Numerical("missing column count".into()))?
                .parse()
                .map_err(|e| LinalgError::Numerical(format!("bad column count: {e}")))?;
            let mut entries = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                let re: f64 = tokens
                    .next()
                    .ok_or_else(|| LinalgError::Numerical("truncated matrix data".into()))?
                    .parse()
                    .map_err(|e| LinalgError::Numerical(format!("bad entry: {e}")))?;
                let im: f64 = tokens
                    .next()
                    .ok_or_else(|| LinalgError::Numerical("truncated matrix data".into()))?
                    .parse()
                    .map_err(|e| LinalgError::Numerical(format!("bad entry: {e}")))?;
                entries.push(c(re, im));
            }
            out.push(ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j]));
        }
        Ok(out)
    }
}
