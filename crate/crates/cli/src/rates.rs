//! Exact encoding-rate tables for the collective-dephasing subspace family
//! and the collective-decoherence (total-spin-0) family, with their
//! large-N asymptotes.
//!
//! Dimensions are exact integers: the dephasing family uses the central
//! binomial C(N, N/2); the decoherence family counts singlet paths,
//! d_N = N!/((N/2)!·(N/2+1)!).

use anyhow::{bail, Result};
use num_bigint::BigUint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateModel {
    Dephasing,
    Decoherence,
}

impl RateModel {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "dephasing" => Some(Self::Dephasing),
            "decoherence" => Some(Self::Decoherence),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RateRow {
    pub n: usize,
    /// Exact code dimension (largest protected block).
    pub dim: BigUint,
    /// Encoding rate log₂(dim)/N.
    pub rate: f64,
    /// Large-N asymptote: 1 − ½·log₂N/N (dephasing) or 1 − (3/2)·log₂N/N.
    pub asymptote: f64,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product::<BigUint>().max(BigUint::from(1u32))
}

/// log₂ of a positive big integer, accurate to double precision.
pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        let v: u64 = x.try_into().ok().and_then(|v: u64| Some(v)).unwrap_or(1);
        return (v as f64).log2();
    }
    // Keep the top 53 bits as a float mantissa; shift out the rest.
    let shift = bits - 53;
    let top: u64 = (x >> shift).try_into().expect("53 bits fit in u64");
    (top as f64).log2() + shift as f64
}

/// Exact dimension of the largest protected block for N qubits.
pub fn code_dimension(n: usize, model: RateModel) -> Result<BigUint> {
    if n == 0 || n % 2 != 0 {
        bail!("rate table needs even N ≥ 2, got {n}");
    }
    let half = n / 2;
    let dim = match model {
        // Central binomial: the c_z = 0 eigenspace.
        RateModel::Dephasing => factorial(n) / (factorial(half) * factorial(half)),
        // Singlet multiplicity: N!/((N/2)!·(N/2+1)!).
        RateModel::Decoherence => factorial(n) / (factorial(half) * factorial(half + 1)),
    };
    Ok(dim)
}

pub fn rate_row(n: usize, model: RateModel) -> Result<RateRow> {
    let dim = code_dimension(n, model)?;
    let rate = big_log2(&dim) / n as f64;
    let log_term = (n as f64).log2() / n as f64;
    let asymptote = match model {
        RateModel::Dephasing => 1.0 - 0.5 * log_term,
        RateModel::Decoherence => 1.0 - 1.5 * log_term,
    };
    Ok(RateRow {
        n,
        dim,
        rate,
        asymptote,
    })
}

/// All even N up to 16, then powers of two up to max_n.
pub fn rate_table(max_n: usize, model: RateModel) -> Result<Vec<RateRow>> {
    if max_n < 2 || max_n > 1024 {
        bail!("max N must lie in 2..=1024, got {max_n}");
    }
    let mut ns: Vec<usize> = (1..=8).map(|k| 2 * k).filter(|&n| n <= max_n).collect();
    let mut p = 32;
    while p <= max_n {
        ns.push(p);
        p *= 2;
    }
    ns.iter().map(|&n| rate_row(n, model)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoherence_dimensions_match_path_counts() {
        assert_eq!(code_dimension(4, RateModel::Decoherence).unwrap(), BigUint::from(2u32));
        assert_eq!(code_dimension(6, RateModel::Decoherence).unwrap(), BigUint::from(5u32));
        assert_eq!(code_dimension(8, RateModel::Decoherence).unwrap(), BigUint::from(14u32));
        for n in [2usize, 4, 6, 8, 10] {
            let exact = decofree::codes::bratteli_paths(n, 0);
            let formula: u64 = code_dimension(n, RateModel::Decoherence)
                .unwrap()
                .try_into()
                .unwrap();
            assert_eq!(formula as u128, exact, "n={n}");
        }
    }

    #[test]
    fn dephasing_n2_rate_half() {
        let row = rate_row(2, RateModel::Dephasing).unwrap();
        assert_eq!(row.dim, BigUint::from(2u32));
        assert!((row.rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rates_approach_asymptote() {
        for (n, tol) in [(64usize, 0.15), (256, 0.08), (1024, 0.05)] {
            for model in [RateModel::Dephasing, RateModel::Decoherence] {
                let row = rate_row(n, model).unwrap();
                let rel = (row.rate - row.asymptote).abs() / row.asymptote;
                assert!(rel < tol, "n={n} model={model:?} rate={} asym={}", row.rate, row.asymptote);
            }
        }
    }

    #[test]
    fn big_log2_accuracy() {
        let x = BigUint::from(1u32) << 200;
        assert!((big_log2(&x) - 200.0).abs() < 1e-12);
        assert!((big_log2(&BigUint::from(1024u32)) - 10.0).abs() < 1e-15);
    }

    #[test]
    fn table_shape_and_bounds() {
        let t = rate_table(1024, RateModel::Decoherence).unwrap();
        assert!(t.iter().any(|r| r.n == 1024));
        assert!(rate_table(0, RateModel::Dephasing).is_err());
        assert!(rate_row(5, RateModel::Dephasing).is_err());
    }
}
