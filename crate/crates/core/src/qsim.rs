//! Exact simulation of the quantum scheme.
//!
//! A basis secret |s> is encoded as the uniform superposition over the
//! coset f(s) = (sum s_i h_i)(P) + C2. Every amplitude is 1/sqrt|C2| times
//! an indicator, so every entry of a reduced operator is a nonnegative
//! integer count over |C2|. Operators are kept sparse as such counts and
//! compared exactly.
//!
//! Two independent routes decide each security property:
//!
//! * fast: rank tests on the extended pair C1' > C2' (punctured dimension
//!   differences on J and on the complement plus appended columns);
//! * oracle: partial traces of the encoded matrix units |a><b| (tensored
//!   with the maximally mixed state on the remaining secret digits),
//!   checked for equality on the diagonal units and vanishing elsewhere.
//!   Linearity makes the matrix units a complete test set.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fqmat::DEFAULT_COSET_CAP;
use crate::fqmat::{
    enumerate_coset, kernel_basis, projected_dim, solve_affine, AffineCoset, MatError, MatrixFq,
};
use crate::scheme::{CodePair, SchemeError};

/// Default bound on q^max(|J|, n - |J|) for oracle computations.
pub const DEFAULT_OPERATOR_CAP: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QsimError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u64,
    },
    #[error("share index {index} out of range for n = {n}")]
    ShareIndex { index: usize, n: usize },
    #[error("secret has length {got}, expected L = {expected}")]
    SecretLength { got: usize, expected: usize },
    #[error("cosets of different sizes ({0} and {1})")]
    CosetSizeMismatch(u128, u128),
    #[error("fast and oracle paths disagree on {what}: fast = {fast}, oracle = {oracle}")]
    PathDisagreement { what: String, fast: bool, oracle: bool },
    #[error("share set {0:?} is not qualified")]
    NotQualified(Vec<usize>),
    #[error("decoder for {0:?} failed exact verification")]
    DecoderVerification(Vec<usize>),
}

/// Which route decides security questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fast,
    Oracle,
    Both,
}

impl Mode {
    pub fn runs_fast(self) -> bool {
        matches!(self, Mode::Fast | Mode::Both)
    }

    pub fn runs_oracle(self) -> bool {
        matches!(self, Mode::Oracle | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Mode::Fast),
            "oracle" => Ok(Mode::Oracle),
            "both" => Ok(Mode::Both),
            other => Err(format!("unknown mode {other:?} (expected fast, oracle or both)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fast => "fast",
            Mode::Oracle => "oracle",
            Mode::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest coset that may be enumerated.
    pub coset: u64,
    /// Largest q^max(|J|, n - |J|) for a reduced operator.
    pub operator: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            coset: DEFAULT_COSET_CAP,
            operator: DEFAULT_OPERATOR_CAP,
        }
    }
}

/// Uniform superposition over an affine coset of C2 inside C1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetState {
    pub coset: AffineCoset,
}

impl CosetState {
    pub fn size(&self) -> u128 {
        self.coset.size()
    }
}

pub fn encode_basis(cp: &CodePair, secret: &[u8]) -> Result<CosetState, QsimError> {
    if secret.len() != cp.l() {
        return Err(QsimError::SecretLength {
            got: secret.len(),
            expected: cp.l(),
        });
    }
    Ok(CosetState {
        coset: AffineCoset {
            offset: cp.coset_representative(secret),
            basis: cp.g2().clone(),
        },
    })
}

/// Exact operator on the shares in J: entry (a, b) is `counts[(a, b)] /
/// denominator`, indices being x_J read base q with J[0] most significant.
#[derive(Debug, Clone)]
pub struct SubsystemOperator {
    pub j: Vec<usize>,
    pub dim: u64,
    denominator: u64,
    counts: BTreeMap<(u64, u64), u64>,
}

impl PartialEq for SubsystemOperator {
    fn eq(&self, other: &Self) -> bool {
        self.j == other.j
            && self.dim == other.dim
            && self.counts.len() == other.counts.len()
            && self.counts.iter().all(|(k, &c)| {
                other.counts.get(k).is_some_and(|&d| {
                    c as u128 * other.denominator as u128 == d as u128 * self.denominator as u128
                })
            })
    }
}

impl SubsystemOperator {
    fn zero(j: &[usize], dim: u64, denominator: u64) -> Self {
        SubsystemOperator {
            j: j.to_vec(),
            dim,
            denominator,
            counts: BTreeMap::new(),
        }
    }

    pub fn entry(&self, a: u64, b: u64) -> BigRational {
        let c = self.counts.get(&(a, b)).copied().unwrap_or(0);
        BigRational::new(BigInt::from(c), BigInt::from(self.denominator))
    }

    /// Nonzero entries in (row, column) order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((u64, u64), BigRational)> + '_ {
        self.counts.iter().map(|(&k, &c)| {
            (
                k,
                BigRational::new(BigInt::from(c), BigInt::from(self.denominator)),
            )
        })
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn trace(&self) -> BigRational {
        let diag: u64 = self
            .counts
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(_, &c)| c)
            .sum();
        BigRational::new(BigInt::from(diag), BigInt::from(self.denominator))
    }

    /// Entries are real, so Hermitian means symmetric.
    pub fn is_hermitian(&self) -> bool {
        self.counts
            .iter()
            .all(|(&(a, b), c)| self.counts.get(&(b, a)) == Some(c))
    }

    /// Exact check by symmetric elimination restricted to the support.
    pub fn is_positive_semidefinite(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        let mut support: Vec<u64> = self.counts.keys().flat_map(|&(a, b)| [a, b]).collect();
        support.sort_unstable();
        support.dedup();
        let pos: HashMap<u64, usize> = support.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let s = support.len();
        let mut m = vec![vec![BigRational::zero(); s]; s];
        for (&(a, b), &c) in &self.counts {
            m[pos[&a]][pos[&b]] = BigRational::from_integer(BigInt::from(c));
        }
        let mut remaining: Vec<usize> = (0..s).collect();
        while !remaining.is_empty() {
            if remaining.iter().any(|&i| m[i][i].is_negative()) {
                return false;
            }
            let Some(at) = remaining.iter().position(|&i| m[i][i].is_positive()) else {
                // all remaining diagonal entries vanish: so must the rest
                return remaining
                    .iter()
                    .all(|&i| remaining.iter().all(|&j| m[i][j].is_zero()));
            };
            let k = remaining.swap_remove(at);
            let pivot = m[k][k].clone();
            for &i in &remaining {
                if m[i][k].is_zero() {
                    continue;
                }
                let factor = &m[i][k] / &pivot;
                for &j in &remaining {
                    let delta = &factor * &m[k][j];
                    m[i][j] -= delta;
                }
            }
        }
        true
    }

    /// `self += other`, rescaling to a common denominator.
    fn accumulate(&mut self, other: &SubsystemOperator) {
        debug_assert_eq!(self.dim, other.dim);
        if other.denominator != self.denominator {
            let (d1, d2) = (self.denominator, other.denominator);
            let l = lcm(d1, d2);
            for c in self.counts.values_mut() {
                *c *= l / d1;
            }
            self.denominator = l;
        }
        let scale = self.denominator / other.denominator;
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_default() += c * scale;
        }
    }

    fn scale_denominator(&mut self, factor: u64) {
        self.denominator *= factor;
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn check_subset(n: usize, j: &[usize]) -> Result<(), QsimError> {
    match j.iter().find(|&&i| i >= n) {
        Some(&index) => Err(QsimError::ShareIndex { index, n }),
        None => Ok(()),
    }
}

fn complement(n: usize, j: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !j.contains(i)).collect()
}

fn check_operator_cap(q: u32, n: usize, j_len: usize, caps: &Caps) -> Result<u64, QsimError> {
    let widest = j_len.max(n - j_len) as u32;
    let size = (q as u128).checked_pow(widest).unwrap_or(u128::MAX);
    if size > caps.operator as u128 {
        return Err(QsimError::CapExceeded {
            what: "reduced operator q^max(|J|, n-|J|)",
            size,
            cap: caps.operator,
        });
    }
    Ok((q as u64).pow(j_len as u32))
}

fn index_of(q: u64, digits: impl Iterator<Item = u8>) -> u64 {
    digits.fold(0u64, |acc, d| acc * q + d as u64)
}

/// Members of a coset state grouped by their traced-out part x_{J-bar};
/// each group lists the kept indices x_J.
struct Split {
    size: u128,
    groups: HashMap<Vec<u8>, Vec<u64>>,
}

fn split_state(
    state: &CosetState,
    j: &[usize],
    rest: &[usize],
    q: u64,
    caps: &Caps,
) -> Result<Split, QsimError> {
    let members = enumerate_coset(&state.coset, caps.coset).map_err(|e| match e {
        MatError::CapExceeded { size, cap } => QsimError::CapExceeded {
            what: "coset enumeration",
            size,
            cap,
        },
        other => QsimError::Matrix(other),
    })?;
    let mut groups: HashMap<Vec<u8>, Vec<u64>> = HashMap::new();
    for x in members {
        let key: Vec<u8> = rest.iter().map(|&i| x[i]).collect();
        groups
            .entry(key)
            .or_default()
            .push(index_of(q, j.iter().map(|&i| x[i])));
    }
    Ok(Split {
        size: state.size(),
        groups,
    })
}

fn reduce_split(ket: &Split, bra: &Split, j: &[usize], dim: u64) -> Result<SubsystemOperator, QsimError> {
    if ket.size != bra.size {
        return Err(QsimError::CosetSizeMismatch(ket.size, bra.size));
    }
    let mut op = SubsystemOperator::zero(j, dim, ket.size as u64);
    for (key, kept) in &ket.groups {
        if let Some(other) = bra.groups.get(key) {
            for &a in kept {
                for &b in other {
                    *op.counts.entry((a, b)).or_default() += 1;
                }
            }
        }
    }
    Ok(op)
}

/// Partial trace over the complement of J of |ket><bra|.
pub fn reduced_on_j(
    cp: &CodePair,
    ket: &CosetState,
    bra: &CosetState,
    j: &[usize],
    caps: &Caps,
) -> Result<SubsystemOperator, QsimError> {
    let n = cp.n();
    check_subset(n, j)?;
    let q = cp.field().order();
    let dim = check_operator_cap(q, n, j.len(), caps)?;
    let rest = complement(n, j);
    let a = split_state(ket, j, &rest, q as u64, caps)?;
    let b = split_state(bra, j, &rest, q as u64, caps)?;
    reduce_split(&a, &b, j, dim)
}

/// Reduced density operator of a coset state on J.
pub fn reduced_state(
    cp: &CodePair,
    state: &CosetState,
    j: &[usize],
    caps: &Caps,
) -> Result<SubsystemOperator, QsimError> {
    reduced_on_j(cp, state, state, j, caps)
}

/// All vectors of F_q^len in ascending base-q order (first digit most
/// significant).
fn all_vectors(q: u8, len: usize) -> Vec<Vec<u8>> {
    let count = (q as usize).pow(len as u32);
    (0..count)
        .map(|mut idx| {
            let mut v = vec![0u8; len];
            for d in v.iter_mut().rev() {
                *d = (idx % q as usize) as u8;
                idx /= q as usize;
            }
            v
        })
        .collect()
}

fn normalize_secret_set(cp: &CodePair, i_set: &[usize]) -> Result<Vec<usize>, QsimError> {
    let l = cp.l();
    if let Some(&index) = i_set.iter().find(|&&i| i >= l) {
        return Err(SchemeError::SecretIndex { index, l }.into());
    }
    let mut v = i_set.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Rank criterion on the extended pair for strong security w.r.t. (I, J).
pub fn strong_security_fast(cp: &CodePair, i_set: &[usize], j: &[usize]) -> Result<bool, QsimError> {
    check_subset(cp.n(), j)?;
    let i_set = normalize_secret_set(cp, i_set)?;
    let ext = cp.extended_pair(&i_set)?;
    let same_on_j = projected_dim(&ext.g1ext, j)? == projected_dim(&ext.g2ext, j)?;
    let mut outside: Vec<usize> = complement(cp.n(), j);
    outside.extend(ext.appended_columns());
    let gap = projected_dim(&ext.g1ext, &outside)? - projected_dim(&ext.g2ext, &outside)?;
    Ok(same_on_j && gap == i_set.len())
}

/// Matrix-unit sweep for strong security w.r.t. (I, J): the reduced
/// operator of |a><b| on the I digits, tensored with the maximally mixed
/// state on the other digits, must be the same for every a = b and vanish
/// for every a != b.
pub fn strong_security_oracle(
    cp: &CodePair,
    i_set: &[usize],
    j: &[usize],
    caps: &Caps,
) -> Result<bool, QsimError> {
    let n = cp.n();
    check_subset(n, j)?;
    let i_set = normalize_secret_set(cp, i_set)?;
    let l = cp.l();
    let q = cp.field().order();
    let dim = check_operator_cap(q, n, j.len(), caps)?;
    let rest = complement(n, j);
    let i_bar: Vec<usize> = (0..l).filter(|i| !i_set.contains(i)).collect();

    let assemble = |a: &[u8], t: &[u8]| -> Vec<u8> {
        let mut s = vec![0u8; l];
        for (&i, &v) in i_set.iter().zip(a) {
            s[i] = v;
        }
        for (&i, &v) in i_bar.iter().zip(t) {
            s[i] = v;
        }
        s
    };

    let heads = all_vectors(q as u8, i_set.len());
    let tails = all_vectors(q as u8, i_bar.len());
    // splits[a][t]
    let mut splits = Vec::with_capacity(heads.len());
    for a in &heads {
        let mut row = Vec::with_capacity(tails.len());
        for t in &tails {
            let state = encode_basis(cp, &assemble(a, t))?;
            row.push(split_state(&state, j, &rest, q as u64, caps)?);
        }
        splits.push(row);
    }

    let mixed = |a: usize, b: usize| -> Result<SubsystemOperator, QsimError> {
        let mut acc: Option<SubsystemOperator> = None;
        for (ket, bra) in splits[a].iter().zip(&splits[b]) {
            let term = reduce_split(ket, bra, j, dim)?;
            match acc.as_mut() {
                Some(sum) => sum.accumulate(&term),
                None => acc = Some(term),
            }
        }
        let mut sum = acc.expect("at least one tail vector");
        sum.scale_denominator(tails.len() as u64);
        Ok(sum)
    };

    let reference = mixed(0, 0)?;
    for a in 1..heads.len() {
        if mixed(a, a)? != reference {
            return Ok(false);
        }
    }
    for a in 0..heads.len() {
        for b in 0..heads.len() {
            if a != b && !mixed(a, b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn decide(
    what: impl FnOnce() -> String,
    mode: Mode,
    fast: impl FnOnce() -> Result<bool, QsimError>,
    oracle: impl FnOnce() -> Result<bool, QsimError>,
) -> Result<bool, QsimError> {
    match mode {
        Mode::Fast => fast(),
        Mode::Oracle => oracle(),
        Mode::Both => {
            let (f, o) = (fast()?, oracle()?);
            if f != o {
                return Err(QsimError::PathDisagreement {
                    what: what(),
                    fast: f,
                    oracle: o,
                });
            }
            Ok(f)
        }
    }
}

pub fn strong_security(
    cp: &CodePair,
    i_set: &[usize],
    j: &[usize],
    mode: Mode,
    caps: &Caps,
) -> Result<bool, QsimError> {
    decide(
        || format!("strong security for I = {i_set:?}, J = {j:?}"),
        mode,
        || strong_security_fast(cp, i_set, j),
        || strong_security_oracle(cp, i_set, j, caps),
    )
}

/// Both paths, default caps; disagreement is an error.
pub fn strong_security_exact(cp: &CodePair, i_set: &[usize], j: &[usize]) -> Result<bool, QsimError> {
    strong_security(cp, i_set, j, Mode::Both, &Caps::default())
}

fn full_secret(cp: &CodePair) -> Vec<usize> {
    (0..cp.l()).collect()
}

pub fn forbidden_fast(cp: &CodePair, j: &[usize]) -> Result<bool, QsimError> {
    strong_security_fast(cp, &full_secret(cp), j)
}

pub fn forbidden_oracle(cp: &CodePair, j: &[usize], caps: &Caps) -> Result<bool, QsimError> {
    strong_security_oracle(cp, &full_secret(cp), j, caps)
}

pub fn is_forbidden(cp: &CodePair, j: &[usize], mode: Mode, caps: &Caps) -> Result<bool, QsimError> {
    decide(
        || format!("forbidden J = {j:?}"),
        mode,
        || forbidden_fast(cp, j),
        || forbidden_oracle(cp, j, caps),
    )
}

pub fn is_forbidden_exact(cp: &CodePair, j: &[usize]) -> Result<bool, QsimError> {
    is_forbidden(cp, j, Mode::Both, &Caps::default())
}

/// J is qualified exactly when its complement is forbidden (pure-state
/// scheme).
pub fn is_qualified(cp: &CodePair, j: &[usize], mode: Mode, caps: &Caps) -> Result<bool, QsimError> {
    check_subset(cp.n(), j)?;
    is_forbidden(cp, &complement(cp.n(), j), mode, caps)
}

pub fn is_qualified_exact(cp: &CodePair, j: &[usize]) -> Result<bool, QsimError> {
    is_qualified(cp, j, Mode::Both, &Caps::default())
}

/// Invertible relabeling of the shares in J: `z = x_J * relabel`, where
/// `z[..L]` is the secret and `z[L..]` is left in a secret-independent
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderDescription {
    pub j: Vec<usize>,
    pub l: usize,
    pub relabel: MatrixFq,
}

impl DecoderDescription {
    /// Split relabeled coordinates into (secret block, junk block).
    pub fn apply(&self, x_j: &[u8]) -> (Vec<u8>, Vec<u8>) {
        let mut z = self.relabel.vec_mul(x_j);
        let junk = z.split_off(self.l);
        (z, junk)
    }

    /// Columns of `relabel` that read off the secret (|J| x L).
    pub fn secret_map(&self) -> MatrixFq {
        self.relabel
            .select_columns(&(0..self.l).collect::<Vec<_>>())
            .expect("l <= |J|")
    }
}

/// Build the relabeling for a qualified J and verify it exactly.
///
/// The secret block solves g1|_J * phi = [I_L; 0] (the secret is a
/// well-defined linear function of the J shares). The junk block
/// annihilates lifts of the unit secrets that vanish outside J, which
/// exist exactly when the complement carries no secret information.
pub fn synthesize_decoder(cp: &CodePair, j: &[usize], caps: &Caps) -> Result<DecoderDescription, QsimError> {
    let n = cp.n();
    check_subset(n, j)?;
    let mut j = j.to_vec();
    j.sort_unstable();
    j.dedup();
    let f = cp.field().clone();
    let (l, k) = (cp.l(), cp.dim_c1());
    let not_qualified = || QsimError::NotQualified(j.clone());

    let on_j = cp.g1().select_columns(&j)?;
    let mut phi_cols = Vec::with_capacity(l);
    for i in 0..l {
        let target: Vec<u8> = (0..k).map(|r| u8::from(r == i)).collect();
        let sol = solve_affine(&on_j, &target)?
            .into_coset()
            .ok_or_else(not_qualified)?;
        phi_cols.push(sol.offset);
    }

    let rest = complement(n, &j);
    let g2_rest_t = cp.g2().select_columns(&rest)?.transpose();
    let mut lifts = Vec::with_capacity(l);
    for i in 0..l {
        let rhs: Vec<u8> = rest.iter().map(|&c| f.neg(cp.g1().get(i, c))).collect();
        let w = solve_affine(&g2_rest_t, &rhs)?
            .into_coset()
            .ok_or_else(not_qualified)?;
        let mut t = vec![0u8; k];
        t[i] = 1;
        t[l..].copy_from_slice(&w.offset);
        let word = cp.codeword(&t);
        debug_assert!(rest.iter().all(|&c| word[c] == 0));
        lifts.push(j.iter().map(|&c| word[c]).collect::<Vec<u8>>());
    }
    let junk = kernel_basis(&MatrixFq::from_rows(&f, j.len(), &lifts));

    let mut relabel = MatrixFq::zeros(&f, j.len(), j.len());
    for (c, col) in phi_cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            relabel.set(r, c, v);
        }
    }
    for (c, row) in junk.row_vectors().iter().enumerate() {
        for (r, &v) in row.iter().enumerate() {
            relabel.set(r, l + c, v);
        }
    }
    let decoder = DecoderDescription {
        j: j.clone(),
        l,
        relabel,
    };
    if !verify_decoder(cp, &decoder, caps)? {
        return Err(QsimError::DecoderVerification(j));
    }
    Ok(decoder)
}

/// Exact check that the relabeling maps encode(s) to |s> tensor a fixed
/// state: after tracing out the junk block and the complement of J, the
/// image of |s><s'| must be exactly |s><s'| for all basis secrets s, s'.
pub fn verify_decoder(cp: &CodePair, d: &DecoderDescription, caps: &Caps) -> Result<bool, QsimError> {
    let n = cp.n();
    check_subset(n, &d.j)?;
    if d.relabel.rows() != d.j.len() || d.relabel.cols() != d.j.len() || d.relabel.rank() != d.j.len() {
        return Ok(false);
    }
    let q = cp.field().order() as u8;
    let rest = complement(n, &d.j);
    let secrets = all_vectors(q, cp.l());

    // For each secret: traced-out part (junk, x_rest) -> decoded secrets.
    let mut outputs: Vec<HashMap<Vec<u8>, Vec<Vec<u8>>>> = Vec::with_capacity(secrets.len());
    let mut size = 0u128;
    for s in &secrets {
        let state = encode_basis(cp, s)?;
        size = state.size();
        let members = enumerate_coset(&state.coset, caps.coset).map_err(|e| match e {
            MatError::CapExceeded { size, cap } => QsimError::CapExceeded {
                what: "coset enumeration",
                size,
                cap,
            },
            other => QsimError::Matrix(other),
        })?;
        let mut map: HashMap<Vec<u8>, Vec<Vec<u8>>> = HashMap::new();
        for x in members {
            let x_j: Vec<u8> = d.j.iter().map(|&i| x[i]).collect();
            let (secret, mut traced) = d.apply(&x_j);
            traced.extend(rest.iter().map(|&i| x[i]));
            map.entry(traced).or_default().push(secret);
        }
        outputs.push(map);
    }

    for (a, sa) in secrets.iter().enumerate() {
        for (b, sb) in secrets.iter().enumerate() {
            let mut block: BTreeMap<(&[u8], &[u8]), u128> = BTreeMap::new();
            for (key, xs) in &outputs[a] {
                if let Some(ys) = outputs[b].get(key) {
                    for x in xs {
                        for y in ys {
                            *block.entry((x.as_slice(), y.as_slice())).or_default() += 1;
                        }
                    }
                }
            }
            let expected: BTreeMap<(&[u8], &[u8]), u128> =
                [((sa.as_slice(), sb.as_slice()), size)].into_iter().collect();
            if block != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
