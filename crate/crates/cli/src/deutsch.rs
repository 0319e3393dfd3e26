//! Deutsch's one-qubit oracle problem run through a dephasing channel,
//! unencoded and encoded into the two-qubit dephasing-free subspace.
//!
//! Unencoded: qubit 1 holds the query, qubit 2 the oracle ancilla; the
//! channel {√(1−p)·I, √p·Z₁} hits between the preparing Hadamards and the
//! oracle. Encoded: the query lives in Span{|00⟩, |11⟩} of qubits 1–2 with
//! qubit 3 as ancilla, and the error becomes √p·Z₁Z₂, which the code space
//! cannot see. The logical Hadamard and oracle are defined on the code
//! block and completed with the identity on its complement; the state never
//! leaves the block, so the completion choice is immaterial.

use anyhow::{bail, Result};
use decofree::linalg::{paulis, tensor, ComplexMatrix, DensityMatrix, TensorLayout, C64};
use decofree::models::{apply_channel, KrausChannel};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The four one-bit functions: two constant, two balanced.
pub const FUNCTIONS: [(&str, [u8; 2], bool); 4] = [
    ("f0 (const 0)", [0, 0], true),
    ("f1 (const 1)", [1, 1], true),
    ("f2 (identity)", [0, 1], false),
    ("f3 (negation)", [1, 0], false),
];

fn basis_density(dim: usize, index: usize, layout: TensorLayout) -> DensityMatrix {
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == index && j == index {
            c(1.0)
        } else {
            c(0.0)
        }
    });
    DensityMatrix::new(m, layout).expect("basis state is a valid density")
}

fn unencoded_oracle(f: [u8; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let x = (j >> 1) & 1;
        let y = j & 1;
        let target = (x << 1) | (y ^ f[x] as usize);
        if i == target {
            c(1.0)
        } else {
            c(0.0)
        }
    })
}

fn run_unencoded(p: f64, f: [u8; 2], constant: bool) -> f64 {
    let layout = TensorLayout::qubits(2);
    let rho1 = basis_density(4, 0b01, layout);
    let h2 = tensor(&paulis::hadamard(), &paulis::hadamard());
    let rho2 = rho1.conjugated(&h2);
    let channel = KrausChannel::new(vec![
        tensor(&paulis::identity2(), &paulis::identity2()).scale_re((1.0 - p).sqrt()),
        tensor(&paulis::z(), &paulis::identity2()).scale_re(p.sqrt()),
    ])
    .expect("dephasing channel is trace preserving");
    let rho3 = apply_channel(&channel, &rho2).expect("channel dims match");
    let u = &tensor(&paulis::hadamard(), &paulis::identity2()) * &unencoded_oracle(f);
    let rho4 = rho3.conjugated(&u);
    // Verdict: first qubit 0 ⇔ constant; misidentification is the mass on
    // the contradicting outcome.
    let wrong = ComplexMatrix::from_fn(4, 4, |i, j| {
        if i == j && ((i >> 1) & 1 == usize::from(constant)) {
            c(1.0)
        } else {
            c(0.0)
        }
    });
    (&wrong * rho4.matrix()).trace().re
}

/// Hadamard on the code block Span{|00⟩, |11⟩}, identity on its complement.
fn logical_hadamard_block() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0b00, 0b00) | (0b00, 0b11) | (0b11, 0b00) => c(s),
        (0b11, 0b11) => c(-s),
        (0b01, 0b01) | (0b10, 0b10) => c(1.0),
        _ => c(0.0),
    })
}

fn encoded_oracle(f: [u8; 2]) -> ComplexMatrix {
    // |x̄⟩|y⟩ → |x̄⟩|y ⊕ f(x)⟩ with |0̄⟩ = |00⟩, |1̄⟩ = |11⟩; identity on
    // the non-code block.
    ComplexMatrix::from_fn(8, 8, |i, j| {
        let code = (j >> 1) & 0b11;
        let y = j & 1;
        let target = match code {
            0b00 => (code << 1) | (y ^ f[0] as usize),
            0b11 => (code << 1) | (y ^ f[1] as usize),
            _ => j,
        };
        if i == target {
            c(1.0)
        } else {
            c(0.0)
        }
    })
}

fn run_encoded(p: f64, f: [u8; 2], constant: bool) -> f64 {
    let layout = TensorLayout::qubits(3);
    let rho1 = basis_density(8, 0b001, layout);
    let w_l = tensor(&logical_hadamard_block(), &paulis::hadamard());
    let rho2 = rho1.conjugated(&w_l);
    let id8 = ComplexMatrix::identity(8);
    let zz1 = tensor(&tensor(&paulis::z(), &paulis::z()), &paulis::identity2());
    let channel = KrausChannel::new(vec![
        id8.scale_re((1.0 - p).sqrt()),
        zz1.scale_re(p.sqrt()),
    ])
    .expect("dephasing channel is trace preserving");
    let rho3 = apply_channel(&channel, &rho2).expect("channel dims match");
    let rho4 = rho3.conjugated(&(&w_l * &encoded_oracle(f)));
    // Logical verdict: |0̄⟩ ⇔ constant.
    let wrong_code = if constant { 0b11 } else { 0b00 };
    let wrong = ComplexMatrix::from_fn(8, 8, |i, j| {
        if i == j && (i >> 1) & 0b11 == wrong_code {
            c(1.0)
        } else {
            c(0.0)
        }
    });
    (&wrong * rho4.matrix()).trace().re
}

/// Misidentification probability per oracle function.
pub fn deutsch_demo(p: f64, encoded: bool) -> Result<Vec<(String, f64)>> {
    if !(0.0..=1.0).contains(&p) {
        bail!("dephasing probability must lie in [0, 1], got {p}");
    }
    Ok(FUNCTIONS
        .iter()
        .map(|&(name, f, constant)| {
            let miss = if encoded {
                run_encoded(p, f, constant)
            } else {
                run_unencoded(p, f, constant)
            };
            (name.to_string(), miss)
        })
        .collect())
}
