//! Exact arithmetic in small finite fields `F_q`, `q = p^m <= 64`.
//!
//! Every operation is a table lookup, so arithmetic is exact and branch-free.
//! Extension fields are built over a fixed Conway polynomial per `(p, m)`,
//! which pins the element encoding: an element is the integer
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` for the residue
//! `c_0 + c_1 x + ... + c_{m-1} x^{m-1}`. In particular `0` is the additive
//! and `1` the multiplicative identity in every field, and encodings are
//! stable across runs and file formats.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u16 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// An element of a specific `F_q`, tagged with the field order.
///
/// The tag makes cross-field mixing detectable: since field tables are
/// deterministic per order, two fields with the same `q` are the same field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    q: u8,
}

impl FieldElement {
    /// Canonical integer encoding in `[0, q)`.
    pub fn value(self) -> u8 {
        self.value
    }

    /// Order of the field this element belongs to.
    pub fn order(self) -> u8 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_F{}", self.value, self.q)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

struct FieldTables {
    q: u8,
    p: u8,
    m: u8,
    add: Vec<u8>,         // q*q, row-major
    mul: Vec<u8>,         // q*q, row-major
    inv: Vec<u8>,         // q entries; inv[0] is an unused sentinel
    neg: Vec<u8>,         // q entries
    irreducible: Vec<u8>, // coefficients c_0..c_m; empty when m == 1
}

/// A small finite field `F_q` with table-driven arithmetic.
///
/// Cheap to clone (the tables are shared). Immutable after construction, so
/// values may be used freely across threads.
#[derive(Clone)]
pub struct Field {
    tables: Arc<FieldTables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.tables.q == other.tables.q
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.tables.q)
    }
}

/// Conway polynomials for the extension fields with `p^m <= 64`, as
/// coefficient lists `c_0..c_m` over `F_p`.
fn conway_coefficients(p: u8, m: u8) -> Option<&'static [u8]> {
    match (p, m) {
        (2, 2) => Some(&[1, 1, 1]),
        (2, 3) => Some(&[1, 1, 0, 1]),
        (2, 4) => Some(&[1, 1, 0, 0, 1]),
        (2, 5) => Some(&[1, 0, 1, 0, 0, 1]),
        (2, 6) => Some(&[1, 1, 0, 1, 1, 0, 1]),
        (3, 2) => Some(&[2, 2, 1]),
        (3, 3) => Some(&[1, 2, 0, 1]),
        (5, 2) => Some(&[2, 4, 1]),
        (7, 2) => Some(&[3, 6, 1]),
        _ => None,
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Digits of `value` base `p`, least significant first, padded to length `m`.
fn to_digits(value: u8, p: u8, m: u8) -> Vec<u8> {
    let mut v = value;
    (0..m)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn from_digits(digits: &[u8], p: u8) -> u8 {
    digits.iter().rev().fold(0u8, |acc, &d| acc * p + d)
}

/// Multiply two residues (digit vectors) modulo the irreducible polynomial.
fn poly_mul_mod(a: &[u8], b: &[u8], modulus: &[u8], p: u8) -> Vec<u8> {
    let m = a.len();
    let mut prod = vec![0u16; 2 * m - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u16 * bj as u16) % p as u16;
        }
    }
    // reduce: x^m = -(c_0 + c_1 x + ... + c_{m-1} x^{m-1})
    for deg in (m..2 * m - 1).rev() {
        let coeff = prod[deg];
        if coeff == 0 {
            continue;
        }
        prod[deg] = 0;
        for t in 0..m {
            let sub = (coeff * modulus[t] as u16) % p as u16;
            prod[deg - m + t] = (prod[deg - m + t] + p as u16 - sub) % p as u16;
        }
    }
    prod[..m].iter().map(|&c| c as u8).collect()
}

impl Field {
    /// Build `F_{p^m}`. Fails on non-prime `p` or `p^m > 64`.
    pub fn new(p: u64, m: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::NotPrimePower(1));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or_else(|| FieldError::OrderTooLarge(p.saturating_pow(m)))?;
        let (q, p, m) = (q as u8, p as u8, m as u8);

        let irreducible: Vec<u8> = if m == 1 {
            Vec::new()
        } else {
            conway_coefficients(p, m)
                .expect("all (p, m) with p^m <= 64 are covered")
                .to_vec()
        };

        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            for b in 0..q {
                let (s, pr) = if m == 1 {
                    (
                        ((a as u16 + b as u16) % p as u16) as u8,
                        ((a as u16 * b as u16) % p as u16) as u8,
                    )
                } else {
                    let da = to_digits(a, p, m);
                    let db = to_digits(b, p, m);
                    let sum: Vec<u8> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                    let prod = poly_mul_mod(&da, &db, &irreducible, p);
                    (from_digits(&sum, p), from_digits(&prod, p))
                };
                add[a as usize * qs + b as usize] = s;
                mul[a as usize * qs + b as usize] = pr;
            }
        }

        let mut neg = vec![0u8; qs];
        for a in 0..q {
            neg[a as usize] = (0..q)
                .find(|&b| add[a as usize * qs + b as usize] == 0)
                .expect("additive inverse exists");
        }
        let mut inv = vec![0u8; qs];
        for a in 1..q {
            inv[a as usize] = (1..q)
                .find(|&b| mul[a as usize * qs + b as usize] == 1)
                .expect("multiplicative inverse exists (irreducible modulus)");
        }

        Ok(Field {
            tables: Arc::new(FieldTables {
                q,
                p,
                m,
                add,
                mul,
                inv,
                neg,
                irreducible,
            }),
        })
    }

    /// Build the field of a given order, factoring `q` into `p^m`.
    pub fn with_order(q: u64) -> Result<Field, FieldError> {
        if q > MAX_ORDER as u64 {
            return Err(FieldError::OrderTooLarge(q));
        }
        if q < 2 {
            return Err(FieldError::NotPrimePower(q));
        }
        let p = (2..=q)
            .find(|&d| q.is_multiple_of(d))
            .expect("q >= 2 has a factor");
        let mut m = 0u32;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            m += 1;
        }
        if rest != 1 {
            return Err(FieldError::NotPrimePower(q));
        }
        Field::new(p, m)
    }

    pub fn order(&self) -> u8 {
        self.tables.q
    }

    pub fn characteristic(&self) -> u8 {
        self.tables.p
    }

    pub fn extension_degree(&self) -> u8 {
        self.tables.m
    }

    pub fn is_prime_field(&self) -> bool {
        self.tables.m == 1
    }

    /// Coefficients `c_0..c_m` of the defining polynomial; empty for `m = 1`.
    pub fn irreducible_poly(&self) -> &[u8] {
        &self.tables.irreducible
    }

    /// The element with canonical encoding `value`. Panics if out of range.
    pub fn element(&self, value: u8) -> FieldElement {
        assert!(
            value < self.tables.q,
            "value {} out of range for F_{}",
            value,
            self.tables.q
        );
        FieldElement {
            value,
            q: self.tables.q,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.tables.q).map(|v| self.element(v))
    }

    fn check(&self, x: FieldElement) -> usize {
        assert_eq!(
            x.q, self.tables.q,
            "element of F_{} used with F_{}",
            x.q, self.tables.q
        );
        x.value as usize
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (i, j) = (self.check(a), self.check(b));
        self.element(self.tables.add[i * self.tables.q as usize + j])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (i, j) = (self.check(a), self.check(b));
        self.element(self.tables.mul[i * self.tables.q as usize + j])
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let i = self.check(a);
        self.element(self.tables.neg[i])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let i = self.check(a);
        if i == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.element(self.tables.inv[i]))
    }

    /// `a^e` by repeated squaring; `a^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u32) -> FieldElement {
        let mut base = a;
        let mut e = e;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Orders with all of whose fields we exhaustively verify the axioms.
    const SMALL_ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 13];

    fn axioms(field: &Field) {
        let q = field.order();
        let els: Vec<FieldElement> = field.elements().collect();
        // identities and inverses
        for &a in &els {
            assert_eq!(field.add(a, field.zero()), a);
            assert_eq!(field.mul(a, field.one()), a);
            assert_eq!(field.add(a, field.neg(a)), field.zero());
            if !a.is_zero() {
                let ai = field.inv(a).unwrap();
                assert_eq!(field.mul(a, ai), field.one());
                // unique inverse: exactly one b with a*b = 1
                let count = els
                    .iter()
                    .filter(|&&b| field.mul(a, b) == field.one())
                    .count();
                assert_eq!(count, 1);
            }
        }
        // commutativity
        for &a in &els {
            for &b in &els {
                assert_eq!(field.add(a, b), field.add(b, a));
                assert_eq!(field.mul(a, b), field.mul(b, a));
            }
        }
        // associativity + distributivity over all triples
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    assert_eq!(field.add(field.add(a, b), c), field.add(a, field.add(b, c)));
                    assert_eq!(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)));
                    assert_eq!(
                        field.mul(a, field.add(b, c)),
                        field.add(field.mul(a, b), field.mul(a, c))
                    );
                }
            }
        }
        assert_eq!(q as usize, els.len());
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for &q in &SMALL_ORDERS {
            let field = Field::with_order(q).unwrap();
            axioms(&field);
        }
        axioms(&Field::new(2, 4).unwrap()); // F_16
    }

    #[test]
    fn larger_orders_construct() {
        for q in [16u64, 25, 27, 32, 49, 64] {
            let field = Field::with_order(q).unwrap();
            assert_eq!(field.order() as u64, q);
            // spot-check an inverse round trip
            let a = field.element((q - 1) as u8);
            assert_eq!(field.mul(a, field.inv(a).unwrap()), field.one());
        }
    }

    #[test]
    fn characteristic_two_addition() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.add(f2.one(), f2.one()), f2.zero());
    }

    #[test]
    fn f4_generator_relation() {
        // In F_4 over x^2 + x + 1, the residue x (encoding 2) squares to x + 1.
        let f4 = Field::new(2, 2).unwrap();
        let x = f4.element(2);
        assert_eq!(f4.mul(x, x), f4.element(3));
        assert_eq!(f4.mul(f4.element(2), f4.element(3)), f4.one());
    }

    #[test]
    fn prime_field_inverses() {
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.inv(f5.element(2)).unwrap(), f5.element(3));
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.inv(f3.element(2)).unwrap(), f3.element(2));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(
            Field::new(2, 7).unwrap_err(),
            FieldError::OrderTooLarge(128)
        );
        assert_eq!(
            Field::with_order(6).unwrap_err(),
            FieldError::NotPrimePower(6)
        );
        assert_eq!(
            Field::with_order(65).unwrap_err(),
            FieldError::OrderTooLarge(65)
        );
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let f7 = Field::new(7, 1).unwrap();
        assert_eq!(f7.inv(f7.zero()).unwrap_err(), FieldError::ZeroInverse);
    }

    #[test]
    fn neg_matches_sub_from_zero() {
        for &q in &SMALL_ORDERS {
            let field = Field::with_order(q).unwrap();
            for a in field.elements() {
                assert_eq!(field.neg(a), field.sub(field.zero(), a));
                if !a.is_zero() {
                    let ai = field.inv(a).unwrap();
                    assert_eq!(field.inv(ai).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for &q in &SMALL_ORDERS {
            let field = Field::with_order(q).unwrap();
            let p = field.characteristic() as u32;
            for a in field.elements() {
                for b in field.elements() {
                    let lhs = field.pow(field.add(a, b), p);
                    let rhs = field.add(field.pow(a, p), field.pow(b, p));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    #[should_panic(expected = "element of F_3 used with F_2")]
    fn cross_field_mixing_panics() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let _ = f2.add(f2.one(), f3.one());
    }
}
