//! Secret-sharing instances: place assignment, the nested code pair
//! C2 < C1 and its I-extended variant, validity checks and the closed-form
//! access thresholds.

use serde::Serialize;
use thiserror::Error;

use crate::fqmat::{kernel_basis, rref, solve_affine, MatError, MatrixFq, Solution};
use crate::funcfield::{CurveError, CurveModel, Place, RRBasis};
use crate::gf::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error("need at least one share and one secret digit (n = {n}, L = {l})")]
    Empty { n: usize, l: usize },
    #[error("n + L = {needed} exceeds the {available} affine rational places of the curve")]
    TooFewPlaces { needed: usize, available: usize },
    #[error("place {0:?} is used more than once")]
    DuplicatePlace(Place),
    #[error("the place at infinity is in the support of G and cannot be used")]
    PlaceAtInfinity,
    #[error("place {0:?} is not on the curve")]
    NotOnCurve(Place),
    #[error("secret map is not onto: rank {rank} < L = {l}")]
    NotSurjective { rank: usize, l: usize },
    #[error("share map is not injective: rank {rank} < dim L(G) = {dim}")]
    NotInjective { rank: usize, dim: usize },
    #[error("secret index {index} out of range for L = {l}")]
    SecretIndex { index: usize, l: usize },
}

/// A one-point instance with G = u * Q_inf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub curve: CurveModel,
    pub u: u32,
    pub share_places: Vec<Place>,
    pub secret_places: Vec<Place>,
}

impl SchemeParams {
    /// Explicit place lists; validates distinctness and curve membership.
    pub fn new(
        curve: CurveModel,
        u: u32,
        share_places: Vec<Place>,
        secret_places: Vec<Place>,
    ) -> Result<Self, SchemeError> {
        let params = SchemeParams {
            curve,
            u,
            share_places,
            secret_places,
        };
        params.validate()?;
        Ok(params)
    }

    /// First `n` affine places in enumeration order as shares, the next `l`
    /// as secret places.
    pub fn with_default_places(curve: CurveModel, u: u32, n: usize, l: usize) -> Result<Self, SchemeError> {
        let affine = curve.affine_places();
        if n + l > affine.len() {
            return Err(SchemeError::TooFewPlaces {
                needed: n + l,
                available: affine.len(),
            });
        }
        let share_places = affine[..n].to_vec();
        let secret_places = affine[n..n + l].to_vec();
        SchemeParams::new(curve, u, share_places, secret_places)
    }

    pub fn n(&self) -> usize {
        self.share_places.len()
    }

    pub fn l(&self) -> usize {
        self.secret_places.len()
    }

    pub fn field(&self) -> &Field {
        self.curve.field()
    }

    fn validate(&self) -> Result<(), SchemeError> {
        let (n, l) = (self.n(), self.l());
        if n == 0 || l == 0 {
            return Err(SchemeError::Empty { n, l });
        }
        let available = self.curve.affine_places().len();
        if n + l > available {
            return Err(SchemeError::TooFewPlaces {
                needed: n + l,
                available,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in self.share_places.iter().chain(&self.secret_places) {
            if *p == Place::Infinity {
                return Err(SchemeError::PlaceAtInfinity);
            }
            if !self.curve.contains(p) {
                return Err(SchemeError::NotOnCurve(p.clone()));
            }
            if !seen.insert(p.clone()) {
                return Err(SchemeError::DuplicatePlace(p.clone()));
            }
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds::new(self.u, self.n(), self.l(), self.curve.genus())
    }
}

/// Generator data for C1 = {(h(P_1), ..., h(P_n)) : h in L(G)} and
/// C2 = {... : h in L(G - Q_1 - ... - Q_L)}.
///
/// L(G) carries a basis h_1..h_k in which h_i(Q_j) = [i == j] for i <= L
/// and h_i vanishes on every Q_j for i > L. Row i of `g1` is the share
/// vector of h_i, so a coefficient vector t over this basis has secret
/// `t[..L]` and codeword `t * g1`; `g2` is the tail of `g1`.
#[derive(Debug, Clone)]
pub struct CodePair {
    params: SchemeParams,
    basis: RRBasis,
    /// Rows: the basis h_i in monomial coordinates.
    coeffs: MatrixFq,
    /// Monomial evaluations at the share places (k x n).
    eval_p: MatrixFq,
    /// Monomial evaluations at the secret places (k x L).
    eval_q: MatrixFq,
    g1: MatrixFq,
    g2: MatrixFq,
}

impl CodePair {
    pub fn build(params: SchemeParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let curve = &params.curve;
        let f = curve.field().clone();
        let basis = curve.rr_basis(params.u)?;
        let k = basis.dimension();
        let (n, l) = (params.n(), params.l());

        let eval_matrix = |places: &[Place]| -> Result<MatrixFq, SchemeError> {
            let mut m = MatrixFq::zeros(&f, k, places.len());
            for (r, &mono) in basis.monomials.iter().enumerate() {
                for (c, p) in places.iter().enumerate() {
                    m.set(r, c, curve.evaluate(mono, p)?);
                }
            }
            Ok(m)
        };
        let eval_p = eval_matrix(&params.share_places)?;
        let eval_q = eval_matrix(&params.secret_places)?;

        // L = dim L(G) - dim L(G - sum Q): the map h -> (h(Q_i)) is onto.
        let q_rank = eval_q.rank();
        if q_rank != l {
            return Err(SchemeError::NotSurjective { rank: q_rank, l });
        }
        // dim L(G - sum P) = 0: the map h -> (h(P_j)) is one-to-one.
        let p_rank = eval_p.rank();
        if p_rank != k {
            return Err(SchemeError::NotInjective { rank: p_rank, dim: k });
        }

        let q_transposed = eval_q.transpose();
        let mut rows = Vec::with_capacity(k);
        for i in 0..l {
            let mut unit = vec![0u8; l];
            unit[i] = 1;
            match solve_affine(&q_transposed, &unit)? {
                Solution::Coset(c) => rows.push(c.offset),
                Solution::NoSolution => unreachable!("surjectivity checked above"),
            }
        }
        rows.extend(kernel_basis(&q_transposed).row_vectors());
        let coeffs = MatrixFq::from_rows(&f, k, &rows);

        let g1 = coeffs.mul(&eval_p)?;
        let g2 = g1.select_rows(&(l..k).collect::<Vec<_>>());
        debug_assert_eq!(g1.rank(), k);
        debug_assert_eq!(n, g1.cols());

        Ok(CodePair {
            params,
            basis,
            coeffs,
            eval_p,
            eval_q,
            g1,
            g2,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        self.params.field()
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn l(&self) -> usize {
        self.params.l()
    }

    pub fn rr_basis(&self) -> &RRBasis {
        &self.basis
    }

    /// dim L(G) = dim C1.
    pub fn dim_c1(&self) -> usize {
        self.g1.rows()
    }

    /// dim L(G - Q_1 - ... - Q_L) = dim C2.
    pub fn dim_c2(&self) -> usize {
        self.g2.rows()
    }

    pub fn g1(&self) -> &MatrixFq {
        &self.g1
    }

    pub fn g2(&self) -> &MatrixFq {
        &self.g2
    }

    /// Basis functions in monomial coordinates, one per row of `g1`.
    pub fn function_basis(&self) -> &MatrixFq {
        &self.coeffs
    }

    pub fn monomial_evaluations_at_shares(&self) -> &MatrixFq {
        &self.eval_p
    }

    pub fn monomial_evaluations_at_secrets(&self) -> &MatrixFq {
        &self.eval_q
    }

    /// Values of each basis function at the secret places (k x L);
    /// equals `[I_L; 0]` by construction.
    pub fn secret_evaluations(&self) -> MatrixFq {
        self.coeffs.mul(&self.eval_q).expect("k x k times k x L")
    }

    /// Codeword of the function with basis coordinates `t`.
    pub fn codeword(&self, t: &[u8]) -> Vec<u8> {
        self.g1.vec_mul(t)
    }

    /// Representative of the coset f(s): the codeword of sum s_i h_i.
    pub fn coset_representative(&self, secret: &[u8]) -> Vec<u8> {
        assert_eq!(secret.len(), self.l(), "secret length must be L");
        let mut t = secret.to_vec();
        t.resize(self.dim_c1(), 0);
        self.codeword(&t)
    }

    /// The pair C1' > C2' for the secret-index set `i_set` (0-based).
    pub fn extended_pair(&self, i_set: &[usize]) -> Result<ExtendedCodePair, SchemeError> {
        let l = self.l();
        if let Some(&bad) = i_set.iter().find(|&&i| i >= l) {
            return Err(SchemeError::SecretIndex { index: bad, l });
        }
        let i_bar: Vec<usize> = (0..l).filter(|i| !i_set.contains(i)).collect();
        let appended = self.secret_evaluations().select_columns(&i_bar)?;
        let g1ext = self.g1.hconcat(&appended)?;
        // Basis functions vanishing on every Q_i, i in I: the lifts for
        // indices outside I plus the whole of L(G - sum Q).
        let keep: Vec<usize> = i_bar.iter().copied().chain(l..self.dim_c1()).collect();
        let g2ext = g1ext.select_rows(&keep);
        let mut i_sorted = i_set.to_vec();
        i_sorted.sort_unstable();
        i_sorted.dedup();
        Ok(ExtendedCodePair {
            n: self.n(),
            i_set: i_sorted,
            i_bar,
            g1ext,
            g2ext,
        })
    }
}

/// C1' = {(x, s restricted to I-bar) : x in f(s)} and
/// C2' = {those with s restricted to I equal to 0}, each as a generator
/// whose columns are the n shares followed by the |I-bar| appended ones.
#[derive(Debug, Clone)]
pub struct ExtendedCodePair {
    pub n: usize,
    pub i_set: Vec<usize>,
    pub i_bar: Vec<usize>,
    pub g1ext: MatrixFq,
    pub g2ext: MatrixFq,
}

impl ExtendedCodePair {
    pub fn dim_c1(&self) -> usize {
        rref(&self.g1ext).1
    }

    pub fn dim_c2(&self) -> usize {
        rref(&self.g2ext).1
    }

    pub fn appended_columns(&self) -> std::ops::Range<usize> {
        self.n..self.n + self.i_bar.len()
    }
}

/// Closed-form thresholds for G = u Q_inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub deg_g: u32,
    pub n: usize,
    pub l: usize,
    pub genus: u32,
    /// Every J with |J| <= this is forbidden. Negative means vacuous.
    pub t_forbidden: i64,
    /// Every J with |J| >= this is qualified. Above n means vacuous.
    pub t_qualified: i64,
}

impl Thresholds {
    pub fn new(deg_g: u32, n: usize, l: usize, genus: u32) -> Self {
        let (u, n_i, l_i, g) = (deg_g as i64, n as i64, l as i64, genus as i64);
        let slack = u - l_i - 2 * g + 1;
        Thresholds {
            deg_g,
            n,
            l,
            genus,
            t_forbidden: slack.min(n_i - 1 - u),
            t_qualified: (1 + u).max(n_i - slack),
        }
    }

    /// Largest |J| for which strong security holds for every I with
    /// `|I-bar| = i_bar_size`.
    pub fn strong_bound(&self, i_bar_size: usize) -> i64 {
        i_bar_size as i64 + self.t_forbidden
    }

    pub fn forbidden_vacuous(&self) -> bool {
        self.t_forbidden < 0
    }

    pub fn qualified_vacuous(&self) -> bool {
        self.t_qualified > self.n as i64
    }

    pub fn guarantees_forbidden(&self, j_size: usize) -> bool {
        (j_size as i64) <= self.t_forbidden
    }

    pub fn guarantees_qualified(&self, j_size: usize) -> bool {
        (j_size as i64) >= self.t_qualified
    }

    pub fn guarantees_strong(&self, i_bar_size: usize, j_size: usize) -> bool {
        (j_size as i64) <= self.strong_bound(i_bar_size)
    }
}
