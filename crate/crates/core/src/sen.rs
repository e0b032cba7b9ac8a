//! Closed-form torsion lengths from ramification data.
//!
//! For `G` with cyclic wild part of order `p^n`, breaks `b_1 < … < b_n` and
//! tame quotient of order `d`, the torsion of `H^1(G, R')` is
//! `⊕_l R/m^{n_l}` over `l ∈ [1, p^n)` with
//!
//! ```text
//! n_l = ⌊(l + i(l) + (d-1)p^n) / (d p^n)⌋,   i(l) = b_{v_p(l)+1}.
//! ```
//!
//! The same numbers arise in two steps: `ñ_l = ⌊(l + i(l)) / p^n⌋` for the
//! wild part alone, then `n_l = 1 + ⌊(ñ_l - 1)/d⌋` for `ñ_l ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::p_adic_valuation;
use crate::field::is_prime;

/// Largest `p^n` accepted.
pub const MAX_GROUP_ORDER: u64 = 1 << 20;

/// Multiset of lengths `n_l`, zeros dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionPartition {
    /// Descending.
    pub lengths: Vec<u64>,
    /// `(l, n_l)` for each contributing `l`, increasing in `l`.
    pub provenance: Vec<(u64, u64)>,
}

impl TorsionPartition {
    pub fn from_values(values: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let provenance: Vec<(u64, u64)> = values.into_iter().filter(|&(_, n)| n > 0).collect();
        let mut lengths: Vec<u64> = provenance.iter().map(|&(_, n)| n).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            lengths,
            provenance,
        }
    }

    /// Total length `Σ n_l`, the `k`-dimension of the module.
    pub fn length(&self) -> u64 {
        self.lengths.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }
}

fn group_order(p: u64, n: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::MalformedBreaks("n must be at least 1".into()));
    }
    p.checked_pow(n)
        .filter(|&q| q <= MAX_GROUP_ORDER)
        .ok_or_else(|| Error::MalformedBreaks(format!("{p}^{n} exceeds {MAX_GROUP_ORDER}")))
}

/// Checks the break sequence: `n` entries, `1 ≤ b_1 < … < b_n`, and
/// `b_{j+1} ≡ b_j (mod p^j)`.
pub fn validate_breaks(p: u64, n: u32, breaks: &[u64]) -> Result<()> {
    group_order(p, n)?;
    if breaks.len() != n as usize {
        return Err(Error::MalformedBreaks(format!(
            "expected {n} breaks, got {}",
            breaks.len()
        )));
    }
    if breaks[0] == 0 {
        return Err(Error::MalformedBreaks("breaks must be positive".into()));
    }
    for (j, w) in breaks.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::MalformedBreaks(format!(
                "breaks must increase strictly: {breaks:?}"
            )));
        }
        let modulus = p.pow(j as u32 + 1);
        if (w[1] - w[0]) % modulus != 0 {
            return Err(Error::MalformedBreaks(format!(
                "b_{} = {} is not congruent to b_{} = {} mod {modulus}",
                j + 2,
                w[1],
                j + 1,
                w[0]
            )));
        }
    }
    Ok(())
}

fn validate_tame(p: u64, d: u64) -> Result<()> {
    if d == 0 || num_gcd(d, p) != 1 {
        return Err(Error::NotCoprime { d, p });
    }
    Ok(())
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// `i(l) = b_{v_p(l)+1}` for `l ∈ [1, p^n)`; entry `l - 1` holds `i(l)`.
pub fn sen_i_function(p: u64, n: u32, breaks: &[u64]) -> Result<Vec<u64>> {
    validate_breaks(p, n, breaks)?;
    let order = p.pow(n);
    Ok((1..order)
        .map(|l| breaks[p_adic_valuation(l, p) as usize])
        .collect())
}

/// `n_l = ⌊(l + i(l) + (d-1)p^n) / (d p^n)⌋`.
pub fn sen_partition(p: u64, n: u32, d: u64, breaks: &[u64]) -> Result<TorsionPartition> {
    validate_tame(p, d)?;
    let i = sen_i_function(p, n, breaks)?;
    let q = p.pow(n);
    Ok(TorsionPartition::from_values(
        (1..q).map(|l| (l, (l + i[(l - 1) as usize] + (d - 1) * q) / (d * q))),
    ))
}

/// `ñ_l = ⌊(l + i(l)) / p^n⌋` for every `l ∈ [1, p^n)`, zeros included.
pub fn sen_intermediate(p: u64, n: u32, breaks: &[u64]) -> Result<Vec<(u64, u64)>> {
    let i = sen_i_function(p, n, breaks)?;
    let q = p.pow(n);
    Ok((1..q).map(|l| (l, (l + i[(l - 1) as usize]) / q)).collect())
}

/// `n_l = 1 + ⌊(ñ_l - 1)/d⌋` applied to the nonzero `ñ_l`.
pub fn kock_transform(p: u64, n: u32, d: u64, breaks: &[u64]) -> Result<TorsionPartition> {
    validate_tame(p, d)?;
    let inter = sen_intermediate(p, n, breaks)?;
    Ok(TorsionPartition::from_values(
        inter
            .into_iter()
            .filter(|&(_, t)| t > 0)
            .map(|(l, t)| (l, 1 + (t - 1) / d)),
    ))
}

/// The worked example for a single Artin–Schreier break `m = q·p + r`:
/// the displayed multiset against direct evaluation of the formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleComparison {
    pub p: u64,
    pub m: u64,
    pub q: u64,
    pub r: u64,
    /// `(q+1)^{×q} ∪ q^{×(p-r-1)}`, descending, zeros dropped.
    pub displayed: Vec<u64>,
    /// `sen_partition(p, 1, 1, [m])`, which equals
    /// `(q+1)^{×r} ∪ q^{×(p-1-r)}`.
    pub formula: Vec<u64>,
    pub agree: bool,
}

pub fn example_closed_form(p: u64, m: u64) -> Result<ExampleComparison> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 || m.is_multiple_of(p) {
        return Err(Error::NotCoprime { d: m, p });
    }
    let (q, r) = (m / p, m % p);
    let mut displayed: Vec<u64> = std::iter::repeat_n(q + 1, q as usize)
        .chain(std::iter::repeat_n(q, (p - r - 1) as usize))
        .filter(|&x| x > 0)
        .collect();
    displayed.sort_unstable_by(|a, b| b.cmp(a));
    let formula = sen_partition(p, 1, 1, &[m])?.lengths;
    Ok(ExampleComparison {
        p,
        m,
        q,
        r,
        agree: displayed == formula,
        displayed,
        formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn i_function_examples() {
        assert_eq!(sen_i_function(3, 1, &[4]).unwrap(), vec![4, 4]);
        assert_eq!(sen_i_function(2, 2, &[1, 3]).unwrap(), vec![1, 3, 1]);
        assert_eq!(sen_i_function(5, 1, &[2]).unwrap(), vec![2; 4]);
    }

    #[test]
    fn malformed_breaks() {
        assert!(sen_i_function(2, 2, &[1, 2]).is_err());
        assert!(sen_i_function(2, 2, &[3, 1]).is_err());
        assert!(sen_i_function(2, 1, &[0]).is_err());
        assert!(sen_i_function(2, 2, &[1]).is_err());
        assert!(sen_i_function(4, 1, &[1]).is_err());
        assert!(sen_partition(3, 1, 3, &[4]).is_err());
    }

    #[test]
    fn partition_examples() {
        let a = sen_partition(3, 1, 1, &[4]).unwrap();
        assert_eq!(a.lengths, vec![2, 1]);
        assert_eq!(a.provenance, vec![(1, 1), (2, 2)]);
        assert_eq!(sen_partition(2, 1, 3, &[3]).unwrap().lengths, vec![1]);
        let b = sen_partition(2, 2, 1, &[1, 3]).unwrap();
        assert_eq!(b.lengths, vec![1, 1]);
        assert_eq!(b.provenance, vec![(2, 1), (3, 1)]);
    }

    #[test]
    fn kock_examples() {
        assert_eq!(kock_transform(2, 1, 3, &[3]).unwrap().lengths, vec![1]);
        assert_eq!(
            sen_intermediate(3, 1, &[1]).unwrap(),
            vec![(1, 0), (2, 1)]
        );
        assert_eq!(kock_transform(3, 1, 2, &[1]).unwrap().lengths, vec![1]);
        assert_eq!(
            kock_transform(5, 1, 1, &[7]).unwrap(),
            sen_partition(5, 1, 1, &[7]).unwrap()
        );
    }

    #[test]
    fn worked_example() {
        let a = example_closed_form(2, 1).unwrap();
        assert_eq!((a.displayed.clone(), a.formula.clone(), a.agree), (vec![], vec![1], false));
        let b = example_closed_form(3, 4).unwrap();
        assert_eq!((b.displayed.clone(), b.formula.clone(), b.agree), (vec![2, 1], vec![2, 1], true));
        let c = example_closed_form(5, 7).unwrap();
        assert_eq!(c.displayed, vec![2, 1, 1]);
        assert_eq!(c.formula, vec![2, 2, 1, 1]);
        assert!(!c.agree);
    }

    #[test]
    fn formula_multiplicities() {
        for p in [2u64, 3, 5, 7] {
            for m in (1..40).filter(|m| m % p != 0) {
                let (q, r) = (m / p, m % p);
                let mut expect: Vec<u64> = std::iter::repeat_n(q + 1, r as usize)
                    .chain(std::iter::repeat_n(q, (p - 1 - r) as usize))
                    .filter(|&x| x > 0)
                    .collect();
                expect.sort_unstable_by(|a, b| b.cmp(a));
                assert_eq!(example_closed_form(p, m).unwrap().formula, expect);
            }
        }
    }

    proptest! {
        #[test]
        fn floor_identity(p in prop::sample::select(vec![2u64, 3, 5, 7, 11]), d in 1u64..=10, b in 1u64..=30) {
            prop_assume!(d % p != 0);
            prop_assert_eq!(sen_partition(p, 1, d, &[b]).unwrap(), kock_transform(p, 1, d, &[b]).unwrap());
        }

        #[test]
        fn monotone_in_breaks(d in 1u64..=6, b in 1u64..=20, extra in 1u64..=5) {
            prop_assume!(d % 3 != 0);
            let lo = sen_partition(3, 1, d, &[b]).unwrap();
            let hi = sen_partition(3, 1, d, &[b + extra]).unwrap();
            let at = |t: &TorsionPartition, l: u64| {
                t.provenance.iter().find(|x| x.0 == l).map_or(0, |x| x.1)
            };
            for l in 1..3 {
                prop_assert!(at(&lo, l) <= at(&hi, l));
            }
        }

        #[test]
        fn lengths_bounded(d in 1u64..=10, b in 1u64..=30) {
            prop_assume!(d % 2 != 0);
            let t = sen_partition(2, 1, d, &[b]).unwrap();
            prop_assert!(t.provenance.len() <= 1);
            for &x in &t.lengths {
                prop_assert!(x >= 1 && x <= (b + 1).div_ceil(d));
            }
        }
    }
}
