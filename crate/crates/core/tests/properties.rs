//! Randomized property tests for the linear-algebra kernel and the model
//! layer: algebraic identities that must hold for arbitrary well-formed
//! inputs, not just the hand-picked cases in the unit tests.

use decofree::linalg::{
    expm_skew_hermitian, logm_unitary, op_norm, partial_trace, tensor, ComplexMatrix,
    DensityMatrix, TensorLayout, C64,
};
use decofree::models::{apply_channel, single_qubit_dephasing_kraus};
use proptest::prelude::*;

/// Strategy: a d×d complex matrix with entries in the unit square.
fn matrix(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |entries| {
        ComplexMatrix::from_fn(d, d, |i, j| {
            let (re, im) = entries[i * d + j];
            C64::new(re, im)
        })
    })
}

/// Strategy: a d×d Hermitian matrix.
fn hermitian(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(d).prop_map(|m| (&m + &m.dagger()).scale_re(0.5))
}

/// Strategy: a d×d unitary, as the exponential of a random Hermitian.
fn unitary(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(d).prop_map(|h| expm_skew_hermitian(&h, 1.0).expect("Hermitian generator"))
}

/// Strategy: a valid density matrix on the given tensor layout.
fn density(layout: TensorLayout) -> impl Strategy<Value = DensityMatrix> {
    let d = layout.total_dim();
    matrix(d).prop_map(move |a| {
        let psd = &a * &a.dagger();
        let tr = psd.trace().re + 1e-9; // strictly positive normalizer
        let psd = &psd + &ComplexMatrix::identity(d).scale_re(1e-9 / d as f64);
        DensityMatrix::new(psd.scale_re(1.0 / tr), layout.clone()).expect("valid density")
    })
}

proptest! {
    // tensor(A,B)·tensor(C,D) = tensor(AC,BD): the mixed-product property.
    #[test]
    fn tensor_mixed_product(
        a in matrix(2), b in matrix(3), cc in matrix(2), d in matrix(3)
    ) {
        let lhs = &tensor(&a, &b) * &tensor(&cc, &d);
        let rhs = tensor(&(&a * &cc), &(&b * &d));
        prop_assert!((&lhs - &rhs).max_abs_entry() < 1e-12);
    }

    // Partial trace preserves the trace, over any kept-factor subset.
    #[test]
    fn partial_trace_preserves_trace(m in matrix(12), keep_first in any::<bool>()) {
        let layout = TensorLayout::new(vec![3, 4]);
        let keep: &[usize] = if keep_first { &[0] } else { &[1] };
        let reduced = partial_trace(&m, &layout, keep).unwrap();
        let diff = reduced.trace() - m.trace();
        prop_assert!(diff.norm() < 1e-12);
    }

    // exp(−it₁H)·exp(−it₂H) = exp(−i(t₁+t₂)H).
    #[test]
    fn expm_group_law(h in hermitian(4), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let lhs = &expm_skew_hermitian(&h, t1).unwrap() * &expm_skew_hermitian(&h, t2).unwrap();
        let rhs = expm_skew_hermitian(&h, t1 + t2).unwrap();
        prop_assert!((&lhs - &rhs).max_abs_entry() < 1e-11);
    }

    // logm ∘ expm is the identity on Hermitian H with ‖H‖ < π.
    #[test]
    fn logm_inverts_expm(h in hermitian(3)) {
        let norm = op_norm(&h);
        prop_assume!(norm > 1e-6);
        let scaled = h.scale_re(3.0_f64 / norm.max(3.0)); // keep ‖H‖ ≤ 3 < π
        let u = expm_skew_hermitian(&scaled, 1.0).unwrap();
        let back = logm_unitary(&u).unwrap();
        prop_assert!((&back - &scaled).max_abs_entry() < 1e-10);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // ‖AB‖ ≤ ‖A‖‖B‖.
    #[test]
    fn op_norm_submultiplicative(a in matrix(4), b in matrix(4)) {
        prop_assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) + 1e-12);
    }
}

proptest! {
    // ‖UAV‖ = ‖A‖ for unitary U, V.
    #[test]
    fn op_norm_unitarily_invariant(a in matrix(3), u in unitary(3), v in unitary(3)) {
        let conj = &(&u * &a) * &v;
        prop_assert!((op_norm(&conj) - op_norm(&a)).abs() < 1e-10);
    }

    // Kraus channels preserve trace and Hermiticity.
    #[test]
    fn channel_preserves_trace_and_hermiticity(
        p in 0.0f64..1.0,
        rho in density(TensorLayout::qubits(1)),
    ) {
        let ch = single_qubit_dephasing_kraus(p).unwrap();
        let out = apply_channel(&ch, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().is_hermitian(1e-12));
    }

    // Density-matrix partial trace yields a valid reduced state.
    #[test]
    fn reduced_state_is_valid_density(rho in density(TensorLayout::new(vec![2, 3]))) {
        let reduced = rho.partial_trace(&[0]).unwrap();
        prop_assert_eq!(reduced.dim(), 2);
        prop_assert!((reduced.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(reduced.matrix().is_psd(1e-9));
    }
}
