//! Exact arithmetic in small finite fields GF(p^m), p^m <= 256.
//!
//! An element is stored as its coefficient vector over GF(p) packed base-p
//! into a `u8` (coefficient of x^i is digit i). All four operations are
//! answered from precomputed tables.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds {MAX_ORDER}")]
    TooLarge { p: u32, m: u32 },
    #[error("modulus must have {expected} coefficients (degree {m}), got {got}")]
    ModulusLength { expected: usize, m: u32, got: usize },
    #[error("modulus coefficient {0} is not in [0, p)")]
    ModulusCoefficient(u32),
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus {0:?} is reducible over GF(p)")]
    Reducible(Vec<u32>),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("representation {repr} out of range for field of order {q}")]
    OutOfRange { repr: u32, q: u32 },
}

/// Description of a field: characteristic, degree and a monic irreducible
/// modulus given low-degree coefficient first (`modulus[m] == 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// Spec with the default modulus for `(p, m)`.
    ///
    /// F4: x^2+x+1, F8: x^3+x+1, F9: x^2+1, F16: x^4+x+1. Other orders use
    /// the first monic irreducible polynomial in base-p order of its lower
    /// coefficients.
    pub fn with_default_modulus(p: u32, m: u32) -> Result<Self, GfError> {
        check_params(p, m)?;
        let modulus = match (p, m) {
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (3, 2) => vec![1, 0, 1],
            (2, 4) => vec![1, 1, 0, 0, 1],
            _ => first_irreducible(p, m),
        };
        Ok(FieldSpec { p, m, modulus })
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.m)
    }
}

fn check_params(p: u32, m: u32) -> Result<(), GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if m == 0 {
        return Err(GfError::ZeroDegree);
    }
    match p.checked_pow(m) {
        Some(q) if q <= MAX_ORDER => Ok(()),
        _ => Err(GfError::TooLarge { p, m }),
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

// Polynomials over GF(p), coefficient of x^i at index i.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead = *b.last().expect("nonzero divisor");
    let lead_inv = (1..p).find(|x| x * lead % p == 1).expect("p prime");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = r[r.len() - 1] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - coef * bi % p) % p;
        }
        r = trim(r);
    }
    r
}

/// Monic polynomial of the given degree whose lower coefficients are the
/// base-p digits of `index`.
fn monic_from_index(p: u32, degree: u32, mut index: u32) -> Vec<u32> {
    let mut poly = Vec::with_capacity(degree as usize + 1);
    for _ in 0..degree {
        poly.push(index % p);
        index /= p;
    }
    poly.push(1);
    poly
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = (modulus.len() - 1) as u32;
    (1..=m / 2)
        .all(|d| (0..p.pow(d)).all(|idx| !poly_rem(modulus, &monic_from_index(p, d, idx), p).is_empty()))
}

fn first_irreducible(p: u32, m: u32) -> Vec<u32> {
    (0..p.pow(m))
        .map(|idx| monic_from_index(p, m, idx))
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

struct Tables {
    spec: FieldSpec,
    q: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// A constructed field with lookup tables. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}; {:?})",
            self.0.spec.p, self.0.spec.m, self.0.spec.modulus
        )
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, GfError> {
        check_params(spec.p, spec.m)?;
        let (p, m) = (spec.p, spec.m);
        if spec.modulus.len() != m as usize + 1 {
            return Err(GfError::ModulusLength {
                expected: m as usize + 1,
                m,
                got: spec.modulus.len(),
            });
        }
        if let Some(&c) = spec.modulus.iter().find(|&&c| c >= p) {
            return Err(GfError::ModulusCoefficient(c));
        }
        if spec.modulus[m as usize] != 1 {
            return Err(GfError::NotMonic);
        }
        if !is_irreducible(&spec.modulus, p) {
            return Err(GfError::Reducible(spec.modulus));
        }

        let q = spec.order();
        let qs = q as usize;
        let digits = |mut r: u32| -> Vec<u32> {
            (0..m)
                .map(|_| {
                    let d = r % p;
                    r /= p;
                    d
                })
                .collect()
        };
        let pack = |v: &[u32]| -> u8 { v.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u8 };

        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = pack(&sum);

                let mut prod = vec![0u32; 2 * m as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut red = poly_rem(&prod, &spec.modulus, p);
                red.resize(m as usize, 0);
                mul[a as usize * qs + b as usize] = pack(&red);
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Ok(Field(Arc::new(Tables {
            spec,
            q,
            add,
            mul,
            neg,
            inv,
        })))
    }

    pub fn with_default_modulus(p: u32, m: u32) -> Result<Self, GfError> {
        Field::new(FieldSpec::with_default_modulus(p, m)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn characteristic(&self) -> u32 {
        self.0.spec.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q as usize + b as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.0.inv[a as usize])
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8, GfError> {
        self.inv(b)
            .map(|ib| self.mul(a, ib))
            .ok_or(GfError::DivisionByZero)
    }

    /// `a^e` by square-and-multiply, with `0^0 = 1`.
    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element(&self, repr: u32) -> Result<FieldElement, GfError> {
        if repr >= self.0.q {
            return Err(GfError::OutOfRange { repr, q: self.0.q });
        }
        Ok(FieldElement {
            field: self.clone(),
            repr: repr as u8,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            repr: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            repr: 1,
        }
    }

    /// All elements in ascending representation order.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.0.q)
            .map(|r| FieldElement {
                field: self.clone(),
                repr: r as u8,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element tied to its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    repr: u8,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr)
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn repr(&self) -> u8 {
        self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr == 0
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement, GfError> {
        if self.field != other.field {
            return Err(GfError::MixedFields);
        }
        let (a, b) = (self.repr, other.repr);
        let repr = match op {
            ArithOp::Add => self.field.add(a, b),
            ArithOp::Sub => self.field.sub(a, b),
            ArithOp::Mul => self.field.mul(a, b),
            ArithOp::Div => self.field.div(a, b)?,
        };
        Ok(FieldElement {
            field: self.field.clone(),
            repr,
        })
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.arith(other, ArithOp::Add)
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.arith(other, ArithOp::Div)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            repr: self.field.pow(self.repr, e),
        }
    }

    pub fn inverse(&self) -> Result<FieldElement, GfError> {
        self.field.one().div(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<Field> {
        [
            (2, 1),
            (3, 1),
            (2, 2),
            (5, 1),
            (7, 1),
            (2, 3),
            (3, 2),
            (2, 4),
            (11, 1),
            (13, 1),
        ]
        .iter()
        .map(|&(p, m)| Field::with_default_modulus(p, m).unwrap())
        .collect()
    }

    #[test]
    fn f4_tables_match_coefficient_arithmetic() {
        let f = Field::with_default_modulus(2, 2).unwrap();
        // omega = x (repr 2), omega^2 = x + 1 (repr 3)
        let w = f.element(2).unwrap();
        let w2 = f.element(3).unwrap();
        assert_eq!(w.add(&w2).unwrap(), f.one());
        assert_eq!(w.mul(&w).unwrap(), w2);
        // Addition is XOR of coefficient vectors in characteristic 2.
        for a in 0..4u8 {
            for b in 0..4u8 {
                assert_eq!(f.add(a, b), a ^ b);
            }
        }
        // Multiplication table of F4 with modulus x^2+x+1, computed by hand.
        let expected = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        for a in 0..4u8 {
            for b in 0..4u8 {
                assert_eq!(f.mul(a, b), expected[a as usize][b as usize]);
            }
        }
    }

    #[test]
    fn default_moduli() {
        assert_eq!(
            FieldSpec::with_default_modulus(2, 3).unwrap().modulus,
            vec![1, 1, 0, 1]
        );
        assert_eq!(
            FieldSpec::with_default_modulus(3, 2).unwrap().modulus,
            vec![1, 0, 1]
        );
        assert_eq!(
            FieldSpec::with_default_modulus(2, 4).unwrap().modulus,
            vec![1, 1, 0, 0, 1]
        );
        // Every admissible order gets a working default.
        for (p, m) in [
            (2, 5),
            (2, 6),
            (2, 7),
            (2, 8),
            (3, 3),
            (3, 4),
            (5, 2),
            (5, 3),
            (7, 2),
        ] {
            let f = Field::with_default_modulus(p, m).unwrap();
            assert_eq!(f.order(), p.pow(m));
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Field::with_default_modulus(4, 1).unwrap_err(),
            GfError::NotPrime(4)
        );
        assert_eq!(
            Field::with_default_modulus(2, 9).unwrap_err(),
            GfError::TooLarge { p: 2, m: 9 }
        );
        let reducible = FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 0, 1],
        };
        assert!(matches!(Field::new(reducible), Err(GfError::Reducible(_))));
        let not_monic = FieldSpec {
            p: 3,
            m: 2,
            modulus: vec![1, 0, 2],
        };
        assert_eq!(Field::new(not_monic).unwrap_err(), GfError::NotMonic);
        let short = FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 1],
        };
        assert!(matches!(Field::new(short), Err(GfError::ModulusLength { .. })));
    }

    #[test]
    fn division_and_mixed_field_errors() {
        let f4 = Field::with_default_modulus(2, 2).unwrap();
        let f5 = Field::with_default_modulus(5, 1).unwrap();
        let a = f4.element(2).unwrap();
        assert_eq!(a.div(&f4.zero()).unwrap_err(), GfError::DivisionByZero);
        assert_eq!(a.add(&f5.one()).unwrap_err(), GfError::MixedFields);
        assert!(f4.element(4).is_err());
    }

    #[test]
    fn pow_examples() {
        let f = Field::with_default_modulus(2, 2).unwrap();
        for a in 1..4u8 {
            assert_eq!(f.pow(a, 3), 1);
            assert_eq!(f.pow(a, 1), a);
        }
        assert_eq!(f.pow(0, 5), 0);
        assert_eq!(f.pow(0, 0), 1);
    }

    #[test]
    fn enumerate_orders() {
        let reprs = |p, m| {
            Field::with_default_modulus(p, m)
                .unwrap()
                .elements()
                .iter()
                .map(|e| e.repr())
                .collect::<Vec<_>>()
        };
        assert_eq!(reprs(2, 1), vec![0, 1]);
        assert_eq!(reprs(2, 2), vec![0, 1, 2, 3]);
        assert_eq!(reprs(3, 2).len(), 9);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            let q = f.order() as u8;
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                    assert_eq!(f.pow(a, f.order() as u64 - 1), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    // Frobenius
                    let p = f.characteristic() as u64;
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
