//! Function-field models with closed-form one-point Riemann-Roch bases.
//!
//! Two families are supported: the rational function field F_q(x) and the
//! Hermitian function field y^q0 + y = x^(q0+1) over F_(q0^2). In both, the
//! space of functions whose only pole is at the place at infinity, of order
//! at most u, has a monomial basis x^a y^b with pole order
//! `q0*a + (q0+1)*b` (rational: `a`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("hermitian curve with q0 = {q0} needs field order {}, got {q}", q0 * q0)]
    HermitianOrder { q0: u32, q: u32 },
    #[error("cannot evaluate a function at the place at infinity")]
    EvaluateAtInfinity,
    #[error("place {0:?} does not lie on the curve")]
    NotOnCurve(Place),
    #[error("Riemann-Roch count mismatch for u = {u}: {got} monomials, expected {expected}")]
    RiemannRoch { u: u32, got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveKind {
    Rational,
    Hermitian { q0: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    kind: CurveKind,
    field: Field,
}

/// Rational place: an affine point (`[x]` or `[x, y]`) or the unique
/// place at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Affine(Vec<u8>),
    Infinity,
}

impl Place {
    pub fn coords(&self) -> Option<&[u8]> {
        match self {
            Place::Affine(c) => Some(c),
            Place::Infinity => None,
        }
    }
}

/// Monomial x^a y^b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
}

/// Basis of L(u Q_inf) as monomials sorted by pole order at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRBasis {
    pub u: u32,
    pub monomials: Vec<Monomial>,
}

impl RRBasis {
    pub fn dimension(&self) -> usize {
        self.monomials.len()
    }
}

impl CurveModel {
    pub fn new(kind: CurveKind, field: &Field) -> Result<Self, CurveError> {
        if let CurveKind::Hermitian { q0 } = kind {
            if q0 < 2 || q0.checked_mul(q0) != Some(field.order()) {
                return Err(CurveError::HermitianOrder { q0, q: field.order() });
            }
        }
        Ok(CurveModel {
            kind,
            field: field.clone(),
        })
    }

    pub fn rational(field: &Field) -> Self {
        CurveModel {
            kind: CurveKind::Rational,
            field: field.clone(),
        }
    }

    pub fn hermitian(field: &Field, q0: u32) -> Result<Self, CurveError> {
        CurveModel::new(CurveKind::Hermitian { q0 }, field)
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn genus(&self) -> u32 {
        match self.kind {
            CurveKind::Rational => 0,
            CurveKind::Hermitian { q0 } => q0 * (q0 - 1) / 2,
        }
    }

    /// Pole order of x^a y^b at the place at infinity.
    pub fn pole_order(&self, m: Monomial) -> u32 {
        match self.kind {
            CurveKind::Rational => m.a,
            CurveKind::Hermitian { q0 } => q0 * m.a + (q0 + 1) * m.b,
        }
    }

    pub fn contains(&self, place: &Place) -> bool {
        match (self.kind, place) {
            (_, Place::Infinity) => true,
            (CurveKind::Rational, Place::Affine(c)) => c.len() == 1 && (c[0] as u32) < self.field.order(),
            (CurveKind::Hermitian { q0 }, Place::Affine(c)) => {
                c.len() == 2
                    && c.iter().all(|&v| (v as u32) < self.field.order())
                    && self.hermitian_lhs(c[1], q0) == self.field.pow(c[0], q0 as u64 + 1)
            }
        }
    }

    fn hermitian_lhs(&self, y: u8, q0: u32) -> u8 {
        self.field.add(self.field.pow(y, q0 as u64), y)
    }

    /// All rational places: affine points in lexicographic order of their
    /// coordinate representations, then the place at infinity.
    pub fn rational_places(&self) -> Vec<Place> {
        let q = self.field.order();
        let mut places: Vec<Place> = match self.kind {
            CurveKind::Rational => (0..q).map(|x| Place::Affine(vec![x as u8])).collect(),
            CurveKind::Hermitian { q0 } => {
                let mut pts = Vec::new();
                for x in 0..q {
                    let rhs = self.field.pow(x as u8, q0 as u64 + 1);
                    for y in 0..q {
                        if self.hermitian_lhs(y as u8, q0) == rhs {
                            pts.push(Place::Affine(vec![x as u8, y as u8]));
                        }
                    }
                }
                pts
            }
        };
        places.push(Place::Infinity);
        places
    }

    pub fn affine_places(&self) -> Vec<Place> {
        let mut places = self.rational_places();
        places.pop();
        places
    }

    /// `1 + q + g * floor(2 sqrt q)`.
    pub fn hasse_weil_bound(&self) -> u64 {
        let q = self.field.order() as u64;
        let two_sqrt_q = (0..).take_while(|k: &u64| k * k <= 4 * q).last().unwrap_or(0);
        1 + q + self.genus() as u64 * two_sqrt_q
    }

    /// Monomial basis of L(u Q_inf), checked against Riemann-Roch when
    /// `u >= 2g - 1`.
    pub fn rr_basis(&self, u: u32) -> Result<RRBasis, CurveError> {
        let mut monomials = match self.kind {
            CurveKind::Rational => (0..=u).map(|a| Monomial { a, b: 0 }).collect::<Vec<_>>(),
            CurveKind::Hermitian { q0 } => {
                let mut v = Vec::new();
                for b in 0..q0 {
                    let yb = (q0 + 1) * b;
                    if yb > u {
                        break;
                    }
                    for a in 0..=(u - yb) / q0 {
                        v.push(Monomial { a, b });
                    }
                }
                v
            }
        };
        monomials.sort_by_key(|&m| (self.pole_order(m), m.b));
        let g = self.genus();
        if u + 1 >= 2 * g {
            let expected = (u + 1 - g) as usize;
            if monomials.len() != expected {
                return Err(CurveError::RiemannRoch {
                    u,
                    got: monomials.len(),
                    expected,
                });
            }
        }
        Ok(RRBasis { u, monomials })
    }

    /// Value of x^a y^b at an affine place.
    pub fn evaluate(&self, m: Monomial, place: &Place) -> Result<u8, CurveError> {
        let Place::Affine(c) = place else {
            return Err(CurveError::EvaluateAtInfinity);
        };
        if !self.contains(place) {
            return Err(CurveError::NotOnCurve(place.clone()));
        }
        let xa = self.field.pow(c[0], m.a as u64);
        let yb = match self.kind {
            CurveKind::Rational => {
                if m.b == 0 {
                    1
                } else {
                    return Err(CurveError::NotOnCurve(place.clone()));
                }
            }
            CurveKind::Hermitian { .. } => self.field.pow(c[1], m.b as u64),
        };
        Ok(self.field.mul(xa, yb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Field::with_default_modulus(2, 2).unwrap()
    }

    fn herm(p: u32, m: u32, q0: u32) -> CurveModel {
        CurveModel::hermitian(&Field::with_default_modulus(p, m).unwrap(), q0).unwrap()
    }

    #[test]
    fn hermitian_2_places() {
        let c = herm(2, 2, 2);
        let places = c.rational_places();
        assert_eq!(places.len(), 9);
        assert_eq!(places.last(), Some(&Place::Infinity));
        assert!(c.contains(&Place::Affine(vec![0, 1])));
        // y^2 + y = x^3 over F4: x = 0 gives y in {0, 1}; x != 0 gives x^3 = 1 and y in {w, w^2}
        let expected: Vec<Place> = [[0, 0], [0, 1], [1, 2], [1, 3], [2, 2], [2, 3], [3, 2], [3, 3]]
            .iter()
            .map(|c| Place::Affine(c.to_vec()))
            .collect();
        assert_eq!(&places[..8], &expected[..]);
    }

    #[test]
    fn rational_places_over_f5() {
        let c = CurveModel::rational(&Field::with_default_modulus(5, 1).unwrap());
        assert_eq!(c.rational_places().len(), 6);
        assert_eq!(c.hasse_weil_bound(), 6);
    }

    #[test]
    fn genus_and_bounds() {
        assert_eq!(CurveModel::rational(&f4()).genus(), 0);
        assert_eq!(herm(2, 2, 2).genus(), 1);
        assert_eq!(herm(2, 2, 2).hasse_weil_bound(), 9);
        let h3 = herm(3, 2, 3);
        assert_eq!(h3.genus(), 3);
        assert_eq!(h3.hasse_weil_bound(), 28);
        for (c, q0) in [(herm(2, 2, 2), 2u64), (h3, 3)] {
            assert_eq!(c.rational_places().len() as u64, q0.pow(3) + 1);
            assert_eq!(c.rational_places().len() as u64, c.hasse_weil_bound());
        }
    }

    #[test]
    fn hermitian_needs_square_order() {
        let f8 = Field::with_default_modulus(2, 3).unwrap();
        assert!(matches!(
            CurveModel::hermitian(&f8, 2),
            Err(CurveError::HermitianOrder { q0: 2, q: 8 })
        ));
    }

    #[test]
    fn rr_basis_examples() {
        let c = herm(2, 2, 2);
        let mons = |u| {
            c.rr_basis(u)
                .unwrap()
                .monomials
                .iter()
                .map(|m| (m.a, m.b))
                .collect::<Vec<_>>()
        };
        // 1, x, y, x^2 have pole orders 0, 2, 3, 4
        assert_eq!(mons(4), vec![(0, 0), (1, 0), (0, 1), (2, 0)]);
        assert_eq!(mons(5), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)]);
        assert_eq!(mons(0), vec![(0, 0)]);
        assert_eq!(mons(1), vec![(0, 0)]);
        let r = CurveModel::rational(&f4());
        assert_eq!(
            r.rr_basis(1).unwrap().monomials,
            vec![Monomial { a: 0, b: 0 }, Monomial { a: 1, b: 0 }]
        );
    }

    #[test]
    fn rr_dimension_steps() {
        for c in [herm(2, 2, 2), herm(3, 2, 3), herm(2, 4, 4)] {
            let g = c.genus();
            let mut prev = 0usize;
            for u in 0..=20 {
                let d = c.rr_basis(u).unwrap().dimension();
                let step = d - prev;
                if u > 0 {
                    assert!(step <= 1);
                    if u >= 2 * g {
                        assert_eq!(step, 1, "u = {u}");
                    }
                } else {
                    assert_eq!(d, 1);
                }
                if u + 1 >= 2 * g {
                    assert_eq!(d as u32, u + 1 - g);
                }
                prev = d;
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let c = herm(2, 2, 2);
        let p01 = Place::Affine(vec![0, 1]);
        assert_eq!(c.evaluate(Monomial { a: 0, b: 1 }, &p01).unwrap(), 1);
        for p in c.affine_places() {
            assert_eq!(c.evaluate(Monomial { a: 0, b: 0 }, &p).unwrap(), 1);
        }
        // x^3 at (w, w): w^3 = 1
        assert_eq!(
            c.evaluate(Monomial { a: 3, b: 0 }, &Place::Affine(vec![2, 2]))
                .unwrap(),
            1
        );
        assert_eq!(
            c.evaluate(Monomial { a: 0, b: 0 }, &Place::Infinity).unwrap_err(),
            CurveError::EvaluateAtInfinity
        );
        assert!(matches!(
            c.evaluate(Monomial { a: 0, b: 0 }, &Place::Affine(vec![1, 0])),
            Err(CurveError::NotOnCurve(_))
        ));
    }

    #[test]
    fn evaluation_is_multiplicative() {
        let c = herm(3, 2, 3);
        let f = c.field().clone();
        for p in c.affine_places() {
            for a1 in 0..4 {
                for b1 in 0..3 {
                    for a2 in 0..4 {
                        for b2 in 0..3 {
                            let m1 = Monomial { a: a1, b: b1 };
                            let m2 = Monomial { a: a2, b: b2 };
                            let prod = Monomial {
                                a: a1 + a2,
                                b: b1 + b2,
                            };
                            assert_eq!(
                                c.evaluate(prod, &p).unwrap(),
                                f.mul(c.evaluate(m1, &p).unwrap(), c.evaluate(m2, &p).unwrap())
                            );
                        }
                    }
                }
            }
        }
    }
}
