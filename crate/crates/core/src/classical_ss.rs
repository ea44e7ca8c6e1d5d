//! The classical ramp scheme on the same code pair: a uniformly random
//! h in L(G) with h(Q_i) = s_i, shares h(P_j).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::fqmat::{rref, solve_affine, MatError, MatrixFq, Solution};
use crate::scheme::CodePair;

/// Name of the generator used by [`deal`], recorded in share files.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng(rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassicalError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("secret has length {got}, expected L = {expected}")]
    SecretLength { got: usize, expected: usize },
    #[error("value {value} is not a field element (q = {q})")]
    ValueRange { value: u8, q: u32 },
    #[error("share index {index} out of range for n = {n}")]
    ShareIndex { index: usize, n: usize },
    #[error("share index {0} repeated")]
    RepeatedShare(usize),
    #[error("{indices} share indices but {values} values")]
    ValueCount { indices: usize, values: usize },
    #[error("share values are not the restriction of any codeword")]
    NotACodeword,
    #[error("enumerating {size} functions exceeds cap {cap}")]
    CapExceeded { size: u128, cap: u64 },
}

/// Share vector (h(P_1), ..., h(P_n)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    pub values: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    Secret(Vec<u8>),
    /// The shares are consistent with this many distinct secrets.
    Ambiguous {
        consistent_secrets: u128,
    },
}

fn check_values(cp: &CodePair, values: &[u8]) -> Result<(), ClassicalError> {
    let q = cp.field().order();
    match values.iter().find(|&&v| v as u32 >= q) {
        Some(&value) => Err(ClassicalError::ValueRange { value, q }),
        None => Ok(()),
    }
}

fn check_subset(cp: &CodePair, j: &[usize]) -> Result<(), ClassicalError> {
    let n = cp.n();
    let mut seen = vec![false; n];
    for &idx in j {
        if idx >= n {
            return Err(ClassicalError::ShareIndex { index: idx, n });
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(ClassicalError::RepeatedShare(idx));
        }
    }
    Ok(())
}

/// Deal shares of `secret`, choosing h uniformly among the functions that
/// take the secret values at Q_1..Q_L. Deterministic in `seed`.
pub fn deal(cp: &CodePair, secret: &[u8], seed: u64) -> Result<ShareVector, ClassicalError> {
    if secret.len() != cp.l() {
        return Err(ClassicalError::SecretLength {
            got: secret.len(),
            expected: cp.l(),
        });
    }
    check_values(cp, secret)?;
    // Monomial coefficients c with sum_m c_m m(Q_i) = s_i.
    let system = cp.monomial_evaluations_at_secrets().transpose();
    let coset = match solve_affine(&system, secret)? {
        Solution::Coset(c) => c,
        Solution::NoSolution => unreachable!("secret map is onto for a built code pair"),
    };
    let q = cp.field().order();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let coeffs: Vec<u8> = (0..coset.dimension())
        .map(|_| rng.random_range(0..q) as u8)
        .collect();
    let h = coset.member(&coeffs);
    Ok(ShareVector {
        values: cp.monomial_evaluations_at_shares().vec_mul(&h),
    })
}

/// Recover the secret from the shares indexed by `j` (0-based), or report
/// how many secrets remain consistent with them.
pub fn reconstruct(cp: &CodePair, j: &[usize], values: &[u8]) -> Result<Reconstruction, ClassicalError> {
    check_subset(cp, j)?;
    if j.len() != values.len() {
        return Err(ClassicalError::ValueCount {
            indices: j.len(),
            values: values.len(),
        });
    }
    check_values(cp, values)?;
    // Basis coordinates t with (t * g1)_J = values.
    let system = cp.g1().select_columns(j)?.transpose();
    let coset = solve_affine(&system, values)?
        .into_coset()
        .ok_or(ClassicalError::NotACodeword)?;
    let l = cp.l();
    let secret_part = coset.basis.select_columns(&(0..l).collect::<Vec<_>>())?;
    let free = rref(&secret_part).1;
    if free == 0 {
        Ok(Reconstruction::Secret(coset.offset[..l].to_vec()))
    } else {
        let q = cp.field().order() as u128;
        Ok(Reconstruction::Ambiguous {
            consistent_secrets: q.pow(free as u32),
        })
    }
}

/// Exact mutual information between a uniform secret and the shares in
/// `j`, in units of log_q, by counting the joint distribution over all of
/// L(G).
pub fn leakage_exact(cp: &CodePair, j: &[usize], cap: u64) -> Result<BigRational, ClassicalError> {
    check_subset(cp, j)?;
    let q = cp.field().order() as u64;
    let k = cp.dim_c1();
    let l = cp.l();
    let total = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(ClassicalError::CapExceeded { size: total, cap });
    }
    let total = total as u64;
    let punctured: MatrixFq = cp.g1().select_columns(j)?;

    let mut joint: HashMap<(Vec<u8>, Vec<u8>), u64> = HashMap::new();
    let mut by_secret: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut by_shares: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut t = vec![0u8; k];
    for _ in 0..total {
        let secret = t[..l].to_vec();
        let shares = punctured.vec_mul(&t);
        *joint.entry((secret.clone(), shares.clone())).or_default() += 1;
        *by_secret.entry(secret).or_default() += 1;
        *by_shares.entry(shares).or_default() += 1;
        for d in t.iter_mut() {
            *d += 1;
            if (*d as u64) < q {
                break;
            }
            *d = 0;
        }
    }

    let mut info = BigRational::zero();
    for ((s, y), &count) in &joint {
        let num = count as u128 * total as u128;
        let den = by_secret[s] as u128 * by_shares[y] as u128;
        let exponent =
            exact_log(num, den, q as u128).expect("probability ratios of a linear scheme are powers of q");
        info += BigRational::new(BigInt::from(count) * BigInt::from(exponent), BigInt::from(total));
    }
    Ok(info)
}

/// `e` with `num / den = base^e`, if it exists.
fn exact_log(num: u128, den: u128, base: u128) -> Option<i64> {
    let g = gcd(num, den);
    let (mut a, mut b) = (num / g, den / g);
    let mut e = 0i64;
    while a > 1 {
        if a % base != 0 {
            return None;
        }
        a /= base;
        e += 1;
    }
    while b > 1 {
        if b % base != 0 {
            return None;
        }
        b /= base;
        e -= 1;
    }
    (a == 1 && b == 1).then_some(e)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqmat::{projected_dim, DEFAULT_COSET_CAP};
    use crate::funcfield::CurveModel;
    use crate::gf::Field;
    use crate::scheme::SchemeParams;
    use std::collections::BTreeSet;

    fn rs() -> CodePair {
        let f = Field::with_default_modulus(5, 1).unwrap();
        CodePair::build(SchemeParams::with_default_places(CurveModel::rational(&f), 1, 3, 1).unwrap())
            .unwrap()
    }

    fn instance_a() -> CodePair {
        let f = Field::with_default_modulus(2, 2).unwrap();
        let c = CurveModel::hermitian(&f, 2).unwrap();
        CodePair::build(SchemeParams::with_default_places(c, 4, 6, 2).unwrap()).unwrap()
    }

    fn ratio(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rs_deal_covers_five_share_vectors() {
        let cp = rs();
        let f = cp.field().clone();
        for s in 0..5u8 {
            // shares of h = c1 + c2 x with c1 + 3 c2 = s, enumerated directly
            let expected: BTreeSet<Vec<u8>> = (0..5u8)
                .map(|c2| {
                    let c1 = f.sub(s, f.mul(3, c2));
                    (0..3u8).map(|x| f.add(c1, f.mul(c2, x))).collect()
                })
                .collect();
            assert_eq!(expected.len(), 5);
            let dealt: BTreeSet<Vec<u8>> = (0..200)
                .map(|seed| deal(&cp, &[s], seed).unwrap().values)
                .collect();
            assert_eq!(dealt, expected);
        }
    }

    #[test]
    fn deal_is_deterministic_and_singleton_when_c2_trivial() {
        let cp = rs();
        assert_eq!(deal(&cp, &[3], 9).unwrap(), deal(&cp, &[3], 9).unwrap());
        // u = 1, L = 2: dim L(G - Q1 - Q2) = 0
        let f = Field::with_default_modulus(5, 1).unwrap();
        let tight =
            CodePair::build(SchemeParams::with_default_places(CurveModel::rational(&f), 1, 3, 2).unwrap())
                .unwrap();
        assert_eq!(tight.dim_c2(), 0);
        let first = deal(&tight, &[1, 4], 0).unwrap();
        for seed in 1..20 {
            assert_eq!(deal(&tight, &[1, 4], seed).unwrap(), first);
        }
    }

    #[test]
    fn deal_errors() {
        let cp = rs();
        assert_eq!(
            deal(&cp, &[1, 2], 0).unwrap_err(),
            ClassicalError::SecretLength { got: 2, expected: 1 }
        );
        assert_eq!(
            deal(&cp, &[7], 0).unwrap_err(),
            ClassicalError::ValueRange { value: 7, q: 5 }
        );
    }

    #[test]
    fn rs_reconstruct() {
        let cp = rs();
        let shares = deal(&cp, &[4], 11).unwrap().values;
        assert_eq!(
            reconstruct(&cp, &[0, 1], &shares[..2]).unwrap(),
            Reconstruction::Secret(vec![4])
        );
        assert_eq!(
            reconstruct(&cp, &[0], &shares[..1]).unwrap(),
            Reconstruction::Ambiguous {
                consistent_secrets: 5
            }
        );
        // (0, 0, 1) is not on any line
        assert_eq!(
            reconstruct(&cp, &[0, 1, 2], &[0, 0, 1]).unwrap_err(),
            ClassicalError::NotACodeword
        );
        assert_eq!(
            reconstruct(&cp, &[0, 0], &[1, 1]).unwrap_err(),
            ClassicalError::RepeatedShare(0)
        );
        assert_eq!(
            reconstruct(&cp, &[5], &[1]).unwrap_err(),
            ClassicalError::ShareIndex { index: 5, n: 3 }
        );
    }

    #[test]
    fn instance_a_five_shares_determine_secret() {
        let cp = instance_a();
        for seed in 0..20u64 {
            let secret = vec![(seed % 4) as u8, (seed / 4 % 4) as u8];
            let shares = deal(&cp, &secret, seed).unwrap().values;
            for skip in 0..6 {
                let j: Vec<usize> = (0..6).filter(|&i| i != skip).collect();
                let vals: Vec<u8> = j.iter().map(|&i| shares[i]).collect();
                assert_eq!(
                    reconstruct(&cp, &j, &vals).unwrap(),
                    Reconstruction::Secret(secret.clone())
                );
            }
        }
    }

    #[test]
    fn exact_log_cases() {
        assert_eq!(exact_log(16, 1, 4), Some(2));
        assert_eq!(exact_log(1, 4, 4), Some(-1));
        assert_eq!(exact_log(8, 2, 4), Some(1));
        assert_eq!(exact_log(2, 1, 4), None);
    }

    #[test]
    fn leakage_matches_rank_difference() {
        for cp in [rs(), instance_a()] {
            let n = cp.n();
            for mask in 0u32..(1 << n) {
                let j: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let leak = leakage_exact(&cp, &j, DEFAULT_COSET_CAP).unwrap();
                let by_rank = projected_dim(cp.g1(), &j).unwrap() - projected_dim(cp.g2(), &j).unwrap();
                assert_eq!(leak, ratio(by_rank as i64), "J = {j:?}");
            }
        }
    }

    #[test]
    fn leakage_is_monotone() {
        let cp = instance_a();
        let leak = |mask: u32| {
            let j: Vec<usize> = (0..6).filter(|&i| mask >> i & 1 == 1).collect();
            leakage_exact(&cp, &j, DEFAULT_COSET_CAP).unwrap()
        };
        for mask in 0u32..64 {
            for extra in 0..6 {
                assert!(leak(mask) <= leak(mask | 1 << extra));
            }
        }
    }

    #[test]
    fn leakage_cap() {
        let cp = instance_a();
        assert_eq!(
            leakage_exact(&cp, &[0], 100).unwrap_err(),
            ClassicalError::CapExceeded { size: 256, cap: 100 }
        );
    }
}
