//! Dense state-vector simulation of qudit registers for prime `q`.
//!
//! Basis labels are read big-endian: qudit 1 is the most significant digit,
//! so a ket written left to right transcribes directly into an amplitude
//! index. Generalized Paulis come from symplectic vectors under the
//! convention `X|j> = |j+1 mod q>`, `Z|j> = w^j |j>` with `w = e^{2 pi i/q}`,
//! each tensor factor ordered X-then-Z: `X^a Z^b |j> = w^{b j} |j+a>`.
//!
//! Operator phases are the one thing the classical description leaves open.
//! For q = 2 a factor pair `(a_t, b_t) = (1, 1)` makes the literal product
//! `XZ` square to `-I`, so stabilizer generators are rescaled by
//! `i^{sum_t a_t b_t}` before use; the corrected operators have order `q`
//! and a well-defined `+1` eigenspace. Odd `q` needs no correction.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::symplectic::{self, StabilizerCode, SymplecticVector};

/// Default numerical tolerance for state comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Gram-Schmidt cutoff separating genuinely null residuals (rounding noise,
/// ~1e-13) from real ones: nonzero stabilizer projections have norm^2 at
/// least q^-n, which is >= 2^-24 at the supported sizes.
const NULL_CUTOFF: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("amplitude vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("local dimension {0} is not prime")]
    NonPrimeDimension(u8),
    #[error("state on {got} qudits where {expected} were expected")]
    QuditCountMismatch { expected: usize, got: usize },
    #[error("local dimensions differ: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("cannot normalize a numerically zero state")]
    ZeroState,
    #[error("invalid logical operators: {0}")]
    InvalidLogicals(#[from] symplectic::CodeError),
    #[error("stabilizer projector annihilated every basis seed (inconsistent phases)")]
    ProjectorVanishes,
    #[error("synthesized codewords are not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),
}

fn is_prime_u8(n: u8) -> bool {
    n >= 2 && (2..n).all(|d| !n.is_multiple_of(d))
}

/// `q`-th root of unity to the power `t`. Exact for `q = 2`, where every
/// phase is `+-1` and golden data stays bit-clean.
fn omega_pow(q: u8, t: i64) -> Complex64 {
    let r = t.rem_euclid(q as i64);
    if q == 2 {
        return if r == 0 {
            Complex64::ONE
        } else {
            -Complex64::ONE
        };
    }
    let angle = TAU * r as f64 / q as f64;
    Complex64::new(angle.cos(), angle.sin())
}

// ---------------------------------------------------------------------------
// states
// ---------------------------------------------------------------------------

/// A dense state vector on `m` qudits of prime local dimension `q`.
///
/// `m = 0` is allowed and describes the empty register: a single complex
/// scalar, the multiplicative unit of the tensor product.
#[derive(Clone, Debug)]
pub struct QuditState {
    q: u8,
    m: usize,
    amps: Vec<Complex64>,
    tol: f64,
}

impl QuditState {
    pub fn new(q: u8, m: usize, amps: Vec<Complex64>) -> Result<QuditState, StateError> {
        if !is_prime_u8(q) {
            return Err(StateError::NonPrimeDimension(q));
        }
        let expected = (q as usize).pow(m as u32);
        if amps.len() != expected {
            return Err(StateError::WrongLength {
                expected,
                got: amps.len(),
            });
        }
        Ok(QuditState {
            q,
            m,
            amps,
            tol: DEFAULT_TOL,
        })
    }

    /// `|0...0>`.
    pub fn zero(q: u8, m: usize) -> QuditState {
        let mut amps = vec![Complex64::ZERO; (q as usize).pow(m as u32)];
        amps[0] = Complex64::ONE;
        QuditState::new(q, m, amps).expect("valid by construction")
    }

    /// Computational basis state with the given digits (qudit 1 first).
    pub fn basis(q: u8, digits: &[u8]) -> QuditState {
        let m = digits.len();
        let mut amps = vec![Complex64::ZERO; (q as usize).pow(m as u32)];
        amps[digits_to_index(q, digits)] = Complex64::ONE;
        QuditState::new(q, m, amps).expect("valid by construction")
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> QuditState {
        self.tol = tol;
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuditState) -> Complex64 {
        assert_eq!(self.q, other.q, "local dimensions differ");
        assert_eq!(self.m, other.m, "qudit counts differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= self.tol
    }

    pub fn scaled(&self, c: Complex64) -> QuditState {
        let amps = self.amps.iter().map(|a| a * c).collect();
        QuditState {
            amps,
            ..self.clone()
        }
    }

    pub fn normalized(&self) -> Result<QuditState, StateError> {
        let n = self.norm();
        if n <= NULL_CUTOFF {
            return Err(StateError::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// `sum_i coeffs[i] * states[i]`.
    pub fn superpose(states: &[QuditState], coeffs: &[Complex64]) -> QuditState {
        assert_eq!(states.len(), coeffs.len());
        let first = &states[0];
        let mut amps = vec![Complex64::ZERO; first.dim()];
        for (s, &c) in states.iter().zip(coeffs) {
            assert_eq!(s.q, first.q);
            assert_eq!(s.m, first.m);
            for (out, a) in amps.iter_mut().zip(&s.amps) {
                *out += c * a;
            }
        }
        QuditState {
            q: first.q,
            m: first.m,
            amps,
            tol: first.tol,
        }
    }

    /// Tensor product with `self`'s qudits first.
    pub fn tensor(&self, other: &QuditState) -> QuditState {
        assert_eq!(self.q, other.q, "local dimensions differ");
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        QuditState {
            q: self.q,
            m: self.m + other.m,
            amps,
            tol: self.tol.min(other.tol),
        }
    }

    /// Assemble a state on `|pos_a| + |pos_b|` qudits placing `a`'s digits at
    /// the (1-based, ascending) global positions `pos_a` and `b`'s at `pos_b`.
    /// The two position sets must partition `1..=m`.
    pub fn interleave(
        a: &QuditState,
        pos_a: &[usize],
        b: &QuditState,
        pos_b: &[usize],
    ) -> QuditState {
        assert_eq!(a.q, b.q, "local dimensions differ");
        assert_eq!(a.m, pos_a.len());
        assert_eq!(b.m, pos_b.len());
        let m = a.m + b.m;
        let q = a.q;
        let mut amps = vec![Complex64::ZERO; (q as usize).pow(m as u32)];
        let mut digits = vec![0u8; m];
        for (ia, amp_a) in a.amps.iter().enumerate() {
            let da = index_to_digits(q, a.m, ia);
            for (&p, &d) in pos_a.iter().zip(&da) {
                digits[p - 1] = d;
            }
            for (ib, amp_b) in b.amps.iter().enumerate() {
                let db = index_to_digits(q, b.m, ib);
                for (&p, &d) in pos_b.iter().zip(&db) {
                    digits[p - 1] = d;
                }
                amps[digits_to_index(q, &digits)] = amp_a * amp_b;
            }
        }
        QuditState {
            q,
            m,
            amps,
            tol: a.tol.min(b.tol),
        }
    }

    /// Partial inner product `<phi|_I self`: contract `phi` against the
    /// qudits at the (1-based, ascending) positions `positions`, leaving an
    /// unnormalized state on the remaining qudits. The squared norm of the
    /// result is the Born probability of outcome `phi` on those qudits.
    pub fn contract(&self, phi: &QuditState, positions: &[usize]) -> QuditState {
        assert_eq!(self.q, phi.q, "local dimensions differ");
        assert_eq!(phi.m, positions.len(), "positions must cover phi's qudits");
        assert!(
            positions.iter().all(|&p| p >= 1 && p <= self.m),
            "positions out of range"
        );
        let rest: Vec<usize> = (1..=self.m).filter(|p| !positions.contains(p)).collect();
        let q = self.q;
        let mut out = vec![Complex64::ZERO; (q as usize).pow(rest.len() as u32)];
        let mut digits = vec![0u8; self.m];
        for (ip, amp_phi) in phi.amps.iter().enumerate() {
            if *amp_phi == Complex64::ZERO {
                continue;
            }
            let dp = index_to_digits(q, phi.m, ip);
            for (&p, &d) in positions.iter().zip(&dp) {
                digits[p - 1] = d;
            }
            for (ir, slot) in out.iter_mut().enumerate() {
                let dr = index_to_digits(q, rest.len(), ir);
                for (&p, &d) in rest.iter().zip(&dr) {
                    digits[p - 1] = d;
                }
                *slot += amp_phi.conj() * self.amps[digits_to_index(q, &digits)];
            }
        }
        QuditState {
            q,
            m: rest.len(),
            amps: out,
            tol: self.tol,
        }
    }

    /// Reduced density matrix on the (1-based, ascending) qudits in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> DensityMatrix {
        let rest: Vec<usize> = (1..=self.m).filter(|p| !keep.contains(p)).collect();
        let q = self.q;
        let dim = (q as usize).pow(keep.len() as u32);
        let rest_dim = (q as usize).pow(rest.len() as u32);
        let mut mat = DMatrix::from_element(dim, dim, Complex64::ZERO);
        let mut digits = vec![0u8; self.m];
        let index_of = |kd: &[u8], rd: &[u8], digits: &mut Vec<u8>| {
            for (&p, &d) in keep.iter().zip(kd) {
                digits[p - 1] = d;
            }
            for (&p, &d) in rest.iter().zip(rd) {
                digits[p - 1] = d;
            }
            digits_to_index(q, digits)
        };
        for r in 0..dim {
            let rd = index_to_digits(q, keep.len(), r);
            for c in 0..dim {
                let cd = index_to_digits(q, keep.len(), c);
                let mut acc = Complex64::ZERO;
                for e in 0..rest_dim {
                    let ed = index_to_digits(q, rest.len(), e);
                    let ri = index_of(&rd, &ed, &mut digits);
                    let ci = index_of(&cd, &ed, &mut digits);
                    acc += self.amps[ri] * self.amps[ci].conj();
                }
                mat[(r, c)] = acc;
            }
        }
        DensityMatrix {
            q,
            m: keep.len(),
            mat,
        }
    }

    /// Apply a `q^r x q^r` matrix to the qudits at the (1-based, ascending)
    /// positions `positions`, identity elsewhere.
    pub fn apply_matrix_at(&self, u: &DMatrix<Complex64>, positions: &[usize]) -> QuditState {
        let r = positions.len();
        let q = self.q;
        let block = (q as usize).pow(r as u32);
        assert_eq!(u.nrows(), block, "matrix does not match the register");
        assert_eq!(u.ncols(), block, "matrix must be square");
        let rest: Vec<usize> = (1..=self.m).filter(|p| !positions.contains(p)).collect();
        let rest_dim = (q as usize).pow(rest.len() as u32);
        let mut amps = vec![Complex64::ZERO; self.dim()];
        let mut digits = vec![0u8; self.m];
        for e in 0..rest_dim {
            let ed = index_to_digits(q, rest.len(), e);
            for (&p, &d) in rest.iter().zip(&ed) {
                digits[p - 1] = d;
            }
            // gather the register amplitudes, multiply, scatter back
            let full_index = |t: usize, digits: &mut Vec<u8>| {
                let td = index_to_digits(q, r, t);
                for (&p, &d) in positions.iter().zip(&td) {
                    digits[p - 1] = d;
                }
                digits_to_index(q, digits)
            };
            let x: Vec<Complex64> = (0..block)
                .map(|t| self.amps[full_index(t, &mut digits)])
                .collect();
            for row in 0..block {
                let mut acc = Complex64::ZERO;
                for (col, xv) in x.iter().enumerate() {
                    acc += u[(row, col)] * xv;
                }
                amps[full_index(row, &mut digits)] = acc;
            }
        }
        QuditState {
            q,
            m: self.m,
            amps,
            tol: self.tol,
        }
    }

    /// Largest amplitude deviation from `other` after aligning global phase.
    pub fn max_deviation_up_to_phase(&self, other: &QuditState) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > NULL_CUTOFF {
            overlap / overlap.norm()
        } else {
            Complex64::ONE
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    /// Equality up to a global phase, within `tol`.
    pub fn approx_eq_up_to_phase(&self, other: &QuditState, tol: f64) -> bool {
        self.max_deviation_up_to_phase(other) <= tol
    }
}

/// Big-endian digits of `index` (qudit 1 first).
pub fn index_to_digits(q: u8, m: usize, index: usize) -> Vec<u8> {
    let mut digits = vec![0u8; m];
    let mut rem = index;
    for d in digits.iter_mut().rev() {
        *d = (rem % q as usize) as u8;
        rem /= q as usize;
    }
    digits
}

/// Big-endian index of a digit string (qudit 1 first).
pub fn digits_to_index(q: u8, digits: &[u8]) -> usize {
    digits
        .iter()
        .fold(0usize, |acc, &d| acc * q as usize + d as usize)
}

// ---------------------------------------------------------------------------
// Pauli operators
// ---------------------------------------------------------------------------

/// A generalized Pauli `phase * (X^{a_1} Z^{b_1} ⊗ ... ⊗ X^{a_m} Z^{b_m})`,
/// applied as a permutation-plus-phase in `O(q^m)` without materializing a
/// matrix.
#[derive(Clone, Debug)]
pub struct PauliOperator {
    q: u8,
    m: usize,
    x_part: Vec<u8>,
    z_part: Vec<u8>,
    phase: Complex64,
}

impl PauliOperator {
    /// Interpret a symplectic vector `(a_1, b_1, ..., a_n, b_n)` over a prime
    /// field as `X^{a_1} Z^{b_1} ⊗ ...` with unit scalar phase.
    pub fn from_symplectic(v: &SymplecticVector) -> Result<PauliOperator, StateError> {
        let field = v.field();
        if !field.is_prime_field() {
            return Err(StateError::NonPrimeDimension(field.order()));
        }
        let m = v.n();
        let x_part = (1..=m).map(|j| v.x_at(j).value()).collect();
        let z_part = (1..=m).map(|j| v.z_at(j).value()).collect();
        Ok(PauliOperator {
            q: field.order(),
            m,
            x_part,
            z_part,
            phase: Complex64::ONE,
        })
    }

    pub fn identity(q: u8, m: usize) -> PauliOperator {
        PauliOperator {
            q,
            m,
            x_part: vec![0; m],
            z_part: vec![0; m],
            phase: Complex64::ONE,
        }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x_part(&self) -> &[u8] {
        &self.x_part
    }

    pub fn z_part(&self) -> &[u8] {
        &self.z_part
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn scaled(&self, phase: Complex64) -> PauliOperator {
        PauliOperator {
            phase: self.phase * phase,
            ..self.clone()
        }
    }

    /// Rescale so the operator has order exactly `q`. For `q = 2` the literal
    /// product `X^a Z^b` squares to `(-1)^{a.b} I`, so multiply by
    /// `i^{sum_t a_t b_t}`; odd prime `q` already has order `q`.
    pub fn order_corrected(&self) -> PauliOperator {
        if self.q != 2 {
            return self.clone();
        }
        let overlap: u32 = self
            .x_part
            .iter()
            .zip(&self.z_part)
            .map(|(&a, &b)| (a * b) as u32)
            .sum();
        let i_pow = match overlap % 4 {
            0 => Complex64::ONE,
            1 => Complex64::I,
            2 => -Complex64::ONE,
            _ => -Complex64::I,
        };
        self.scaled(i_pow)
    }

    /// Operator product `self * other`, scalar phase tracked:
    /// `(X^a Z^b)(X^c Z^d) = w^{b.c} X^{a+c} Z^{b+d}` per factor.
    pub fn compose(&self, other: &PauliOperator) -> PauliOperator {
        assert_eq!(self.q, other.q, "local dimensions differ");
        assert_eq!(self.m, other.m, "qudit counts differ");
        let q = self.q;
        let mut t: i64 = 0;
        let mut x_part = Vec::with_capacity(self.m);
        let mut z_part = Vec::with_capacity(self.m);
        for i in 0..self.m {
            t += self.z_part[i] as i64 * other.x_part[i] as i64;
            x_part.push((self.x_part[i] + other.x_part[i]) % q);
            z_part.push((self.z_part[i] + other.z_part[i]) % q);
        }
        PauliOperator {
            q,
            m: self.m,
            x_part,
            z_part,
            phase: self.phase * other.phase * omega_pow(q, t),
        }
    }

    /// Drop the tensor factors outside `positions` (1-based, ascending),
    /// keeping the scalar phase. The operator must act as the identity on
    /// every dropped qudit.
    pub fn restricted_to(&self, positions: &[usize]) -> PauliOperator {
        for p in 1..=self.m {
            if !positions.contains(&p) {
                assert_eq!(
                    (self.x_part[p - 1], self.z_part[p - 1]),
                    (0, 0),
                    "operator is not the identity on dropped qudit {p}"
                );
            }
        }
        PauliOperator {
            q: self.q,
            m: positions.len(),
            x_part: positions.iter().map(|&p| self.x_part[p - 1]).collect(),
            z_part: positions.iter().map(|&p| self.z_part[p - 1]).collect(),
            phase: self.phase,
        }
    }

    /// Apply to a state: `X^a Z^b |j> = w^{b j} |j + a>` per factor, times
    /// the scalar phase. Norm-preserving.
    pub fn apply(&self, psi: &QuditState) -> QuditState {
        assert_eq!(self.q, psi.q, "local dimensions differ");
        assert_eq!(self.m, psi.m, "qudit counts differ");
        let q = self.q;
        let mut amps = vec![Complex64::ZERO; psi.dim()];
        for (idx, amp) in psi.amps.iter().enumerate() {
            if *amp == Complex64::ZERO {
                continue;
            }
            let digits = index_to_digits(q, self.m, idx);
            let mut t: i64 = 0;
            let mut new_digits = Vec::with_capacity(self.m);
            for ((&j, &a), &b) in digits.iter().zip(&self.x_part).zip(&self.z_part) {
                t += b as i64 * j as i64;
                new_digits.push((j + a) % q);
            }
            let target = digits_to_index(q, &new_digits);
            amps[target] += self.phase * omega_pow(q, t) * amp;
        }
        QuditState {
            q,
            m: self.m,
            amps,
            tol: psi.tol,
        }
    }
}

// ---------------------------------------------------------------------------
// density matrices
// ---------------------------------------------------------------------------

/// A density matrix on `m` qudits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    q: u8,
    m: usize,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &QuditState) -> DensityMatrix {
        let dim = psi.dim();
        let mat = DMatrix::from_fn(dim, dim, |r, c| psi.amps[r] * psi.amps[c].conj());
        DensityMatrix {
            q: psi.q,
            m: psi.m,
            mat,
        }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// `Tr(rho^2)`, real for Hermitian input.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|e| e.norm_sqr()).sum()
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with(&self, psi: &QuditState) -> f64 {
        assert_eq!(self.dim(), psi.dim(), "dimension mismatch");
        let mut acc = Complex64::ZERO;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                acc += psi.amps[r].conj() * self.mat[(r, c)] * psi.amps[c];
            }
        }
        acc.re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim)
            .all(|r| (r..dim).all(|c| (self.mat[(r, c)] - self.mat[(c, r)].conj()).norm() <= tol))
    }

    /// Positive semidefinite within `tol` (smallest eigenvalue `>= -tol`).
    pub fn is_psd(&self, tol: f64) -> bool {
        hermitian_eigenvalues(&self.mat).iter().all(|&l| l >= -tol)
    }

    /// `1/2 * ||rho - sigma||_1` via the eigenvalues of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let diff = &self.mat - &other.mat;
        0.5 * hermitian_eigenvalues(&diff)
            .iter()
            .map(|l| l.abs())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        (&self.mat - &other.mat)
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    /// Partial trace onto the (1-based, ascending) qudits in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> DensityMatrix {
        let rest: Vec<usize> = (1..=self.m).filter(|p| !keep.contains(p)).collect();
        let q = self.q;
        let dim = (q as usize).pow(keep.len() as u32);
        let rest_dim = (q as usize).pow(rest.len() as u32);
        let mut digits = vec![0u8; self.m];
        let index_of = |kd: &[u8], rd: &[u8], digits: &mut Vec<u8>| {
            for (&p, &d) in keep.iter().zip(kd) {
                digits[p - 1] = d;
            }
            for (&p, &d) in rest.iter().zip(rd) {
                digits[p - 1] = d;
            }
            digits_to_index(q, digits)
        };
        let mut mat = DMatrix::from_element(dim, dim, Complex64::ZERO);
        for r in 0..dim {
            let rd = index_to_digits(q, keep.len(), r);
            for c in 0..dim {
                let cd = index_to_digits(q, keep.len(), c);
                let mut acc = Complex64::ZERO;
                for e in 0..rest_dim {
                    let ed = index_to_digits(q, rest.len(), e);
                    acc += self.mat[(
                        index_of(&rd, &ed, &mut digits),
                        index_of(&cd, &ed, &mut digits),
                    )];
                }
                mat[(r, c)] = acc;
            }
        }
        DensityMatrix {
            q,
            m: keep.len(),
            mat,
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    if mat.nrows() == 0 {
        return Vec::new();
    }
    let eig = mat.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// A Haar-ish random unitary: QR of a complex Gaussian matrix with the
/// R-diagonal phases absorbed into Q.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..TAU);
        (-2.0 * u1.ln()).sqrt() * u2.cos()
    };
    let g = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(gauss(), gauss()));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::ONE
        };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

// ---------------------------------------------------------------------------
// codeword synthesis
// ---------------------------------------------------------------------------

/// The orthonormal codeword family `{psi(i)}` of a stabilizer code, indexed
/// by the big-endian integer encoding of the `k`-digit secret label, together
/// with the logical operators that generated it.
#[derive(Clone, Debug)]
pub struct CodewordFamily {
    q: u8,
    n: usize,
    k: usize,
    states: Vec<QuditState>,
    logical_x: Vec<SymplecticVector>,
    logical_z: Vec<SymplecticVector>,
}

impl CodewordFamily {
    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// All `q^k` codewords in label order.
    pub fn states(&self) -> &[QuditState] {
        &self.states
    }

    /// Codeword for a secret basis label.
    pub fn state(&self, label: usize) -> &QuditState {
        &self.states[label]
    }

    pub fn logical_x(&self) -> &[SymplecticVector] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[SymplecticVector] {
        &self.logical_z
    }

    /// Wrap externally supplied codewords (e.g. loaded from files) after
    /// checking they form an orthonormal family of valid codewords.
    pub fn from_states(
        code: &StabilizerCode,
        states: Vec<QuditState>,
    ) -> Result<CodewordFamily, StateError> {
        let expected = (code.q() as usize).pow(code.k() as u32);
        if states.len() != expected {
            return Err(StateError::WrongLength {
                expected,
                got: states.len(),
            });
        }
        let mut max_dev: f64 = 0.0;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expect = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                max_dev = max_dev.max((a.inner(b) - expect).norm());
            }
        }
        if max_dev > 1e-9 {
            return Err(StateError::NotOrthonormal(max_dev));
        }
        Ok(CodewordFamily {
            q: code.q(),
            n: code.n(),
            k: code.k(),
            states,
            logical_x: Vec::new(),
            logical_z: Vec::new(),
        })
    }
}

/// Order-corrected Pauli operators for a set of stabilizer vectors.
pub(crate) fn corrected_paulis(
    vectors: &[SymplecticVector],
) -> Result<Vec<PauliOperator>, StateError> {
    vectors
        .iter()
        .map(|v| Ok(PauliOperator::from_symplectic(v)?.order_corrected()))
        .collect()
}

/// The operators whose joint `+1` eigenspace is this crate's realization of
/// the code space: the order-corrected Paulis of the raw generators.
///
/// The raw generators matter: a different basis of the same subspace `C`
/// lifts to operators in a possibly different phase sector, i.e. a different
/// (equally valid) code space.
pub(crate) fn code_space_generators(
    code: &StabilizerCode,
) -> Result<Vec<PauliOperator>, StateError> {
    corrected_paulis(code.raw_generators())
}

/// Average a state over the cyclic group of one corrected generator:
/// `(1/q) sum_s P^s psi`, the projector onto its `+1` eigenspace.
fn project_onto_fixed(op: &PauliOperator, psi: &QuditState) -> QuditState {
    let q = op.q() as usize;
    let mut acc = psi.clone();
    let mut power = psi.clone();
    for _ in 1..q {
        power = op.apply(&power);
        acc = QuditState::superpose(&[acc, power.clone()], &[Complex64::ONE, Complex64::ONE]);
    }
    acc.scaled(Complex64::new(1.0 / q as f64, 0.0))
}

/// Project onto the joint `+1` eigenspace of all the given corrected
/// operators.
pub(crate) fn project_onto_code_space(ops: &[PauliOperator], psi: &QuditState) -> QuditState {
    let mut acc = psi.clone();
    for op in ops {
        acc = project_onto_fixed(op, &acc);
    }
    acc
}

/// First computational basis state (lexicographic) with a nonzero projection
/// onto the joint `+1` eigenspace, normalized.
pub(crate) fn projector_seed_state(
    q: u8,
    m: usize,
    ops: &[PauliOperator],
) -> Result<QuditState, StateError> {
    for seed in 0..(q as usize).pow(m as u32) {
        let basis = QuditState::basis(q, &index_to_digits(q, m, seed));
        let projected = project_onto_code_space(ops, &basis);
        if projected.norm() > NULL_CUTOFF {
            return projected.normalized();
        }
    }
    Err(StateError::ProjectorVanishes)
}

/// True iff every order-corrected generator fixes `psi`:
/// `||P'_g psi - psi|| <= tol` for each generator `g`.
pub fn verify_codeword(code: &StabilizerCode, psi: &QuditState) -> Result<bool, StateError> {
    if psi.q() != code.q() {
        return Err(StateError::DimensionMismatch(psi.q(), code.q()));
    }
    if psi.m() != code.n() {
        return Err(StateError::QuditCountMismatch {
            expected: code.n(),
            got: psi.m(),
        });
    }
    let ops = code_space_generators(code)?;
    let minus_one = -Complex64::ONE;
    for op in &ops {
        let moved = op.apply(psi);
        let residual = QuditState::superpose(&[moved, psi.clone()], &[Complex64::ONE, minus_one]);
        if residual.norm() > psi.tol() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Build the codeword family `{psi(i)}` of a prime-`q` stabilizer code.
///
/// The joint `+1` eigenspace of the corrected stabilizer generators together
/// with `k` logical-Z operators is one-dimensional; `psi(0)` is its
/// representative reached from the first viable computational seed, and
/// `psi(i)` is produced by the logical-X Paulis. When `logical_x` is omitted
/// a deterministic hyperbolic completion of the stabilizer supplies both sets.
pub fn synthesize_codewords(
    code: &StabilizerCode,
    logical_x: Option<&[SymplecticVector]>,
) -> Result<CodewordFamily, StateError> {
    let q = code.q();
    if !code.field().is_prime_field() {
        return Err(StateError::NonPrimeDimension(q));
    }
    let (xs, zs) = match logical_x {
        Some(xs) => {
            let zs = symplectic::logical_conjugates(code, xs)?;
            (xs.to_vec(), zs)
        }
        None => symplectic::logical_pairs(code),
    };

    let mut fixing = code_space_generators(code)?;
    fixing.extend(corrected_paulis(&zs)?);
    let psi0 = projector_seed_state(q, code.n(), &fixing)?;

    let x_ops = corrected_paulis(&xs)?;
    let k = code.k();
    let total = (q as usize).pow(k as u32);
    let mut states = Vec::with_capacity(total);
    for label in 0..total {
        let digits = index_to_digits(q, k, label);
        let mut state = psi0.clone();
        for (op, &e) in x_ops.iter().zip(&digits) {
            for _ in 0..e {
                state = op.apply(&state);
            }
        }
        states.push(state);
    }

    // the family must come out orthonormal; anything else means the phase
    // conventions were violated upstream
    let mut max_dev: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let expect = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            max_dev = max_dev.max((a.inner(b) - expect).norm());
        }
    }
    if max_dev > 1e-9 {
        return Err(StateError::NotOrthonormal(max_dev));
    }

    Ok(CodewordFamily {
        q,
        n: code.n(),
        k,
        states,
        logical_x: xs,
        logical_z: zs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::five_qubit;
    use crate::gf::Field;
    use crate::symplectic::{random_self_orthogonal_code, StabilizerCode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_basics() {
        let f2 = Field::new(2, 1).unwrap();
        // X: bit flip
        let x =
            PauliOperator::from_symplectic(&SymplecticVector::from_values(&f2, &[1, 0])).unwrap();
        let out = x.apply(&QuditState::basis(2, &[0]));
        assert_eq!(out.amps()[1], Complex64::ONE);
        // Z: phase flip on |1>
        let z =
            PauliOperator::from_symplectic(&SymplecticVector::from_values(&f2, &[0, 1])).unwrap();
        let out = z.apply(&QuditState::basis(2, &[1]));
        assert_eq!(out.amps()[1], -Complex64::ONE);
        // q=3, (1,1) acting on |0>: phase w^0 = 1 then shift
        let f3 = Field::new(3, 1).unwrap();
        let xz =
            PauliOperator::from_symplectic(&SymplecticVector::from_values(&f3, &[1, 1])).unwrap();
        let out = xz.apply(&QuditState::basis(3, &[0]));
        assert_eq!(out.amps()[1], Complex64::ONE);
    }

    #[test]
    fn pauli_from_non_prime_field_is_rejected() {
        let f4 = Field::with_order(4).unwrap();
        let v = SymplecticVector::from_values(&f4, &[1, 0]);
        assert!(matches!(
            PauliOperator::from_symplectic(&v),
            Err(StateError::NonPrimeDimension(4))
        ));
    }

    #[test]
    fn apply_identity_and_two_qubit_shift() {
        let f2 = Field::new(2, 1).unwrap();
        let id = PauliOperator::from_symplectic(&SymplecticVector::from_values(&f2, &[0, 0, 0, 0]))
            .unwrap();
        let psi = QuditState::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(id.apply(&psi).approx_eq_up_to_phase(&psi, 1e-12));

        let x1 = PauliOperator::from_symplectic(&SymplecticVector::from_values(&f2, &[1, 0, 0, 0]))
            .unwrap();
        let out = x1.apply(&QuditState::basis(2, &[0, 0]));
        assert!(out.approx_eq_up_to_phase(&QuditState::basis(2, &[1, 0]), 1e-12));
    }

    #[test]
    fn generators_fix_the_reference_codewords() {
        let code = five_qubit::code();
        let psi0 = five_qubit::psi0();
        for g in code.stabilizer().basis() {
            let op = PauliOperator::from_symplectic(g).unwrap().order_corrected();
            let moved = op.apply(&psi0);
            assert!(moved.approx_eq_up_to_phase(&psi0, 1e-12));
        }
        assert!(verify_codeword(&code, &psi0).unwrap());
        assert!(verify_codeword(&code, &five_qubit::psi1()).unwrap());
        assert!(!verify_codeword(&code, &QuditState::zero(2, 5)).unwrap());
    }

    #[test]
    fn pauli_norm_preservation_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in [2u8, 3, 5] {
            let f = Field::new(q as u64, 1).unwrap();
            let m = 3;
            let dim = (q as usize).pow(m as u32);
            for _ in 0..20 {
                let amps: Vec<Complex64> = (0..dim)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let psi = QuditState::new(q, m, amps).unwrap().normalized().unwrap();
                let vals: Vec<u8> = (0..2 * m).map(|_| rng.random_range(0..q)).collect();
                let op = PauliOperator::from_symplectic(&SymplecticVector::from_values(&f, &vals))
                    .unwrap();
                assert!((op.apply(&psi).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn commutation_tracks_the_symplectic_product() {
        // with the X-then-Z convention, P_u P_v = w^{<v,u>} P_v P_u
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in [2u8, 3, 5] {
            let f = Field::new(q as u64, 1).unwrap();
            let m = 2;
            let dim = (q as usize).pow(m as u32);
            for _ in 0..30 {
                let rand_vec = |rng: &mut ChaCha8Rng| {
                    let vals: Vec<u8> = (0..2 * m).map(|_| rng.random_range(0..q)).collect();
                    SymplecticVector::from_values(&f, &vals)
                };
                let u = rand_vec(&mut rng);
                let v = rand_vec(&mut rng);
                let pu = PauliOperator::from_symplectic(&u).unwrap();
                let pv = PauliOperator::from_symplectic(&v).unwrap();
                let sp = v.symplectic_product(&u).value();
                let w = omega_pow(q, sp as i64);
                for idx in 0..dim {
                    let basis = QuditState::basis(q, &index_to_digits(q, m, idx));
                    let lhs = pu.apply(&pv.apply(&basis));
                    let rhs = pv.apply(&pu.apply(&basis)).scaled(w);
                    let dev: f64 = lhs
                        .amps()
                        .iter()
                        .zip(rhs.amps())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    assert!(dev < 1e-12, "q={q} u={u:?} v={v:?} dev={dev}");
                }
            }
        }
    }

    #[test]
    fn contract_examples() {
        // |00> against |0> on qudit 1 leaves |0> with norm 1
        let zz = QuditState::basis(2, &[0, 0]);
        let out = zz.contract(&QuditState::basis(2, &[0]), &[1]);
        assert!((out.norm() - 1.0).abs() < 1e-12);
        assert_eq!(out.m(), 1);
        assert!(out.approx_eq_up_to_phase(&QuditState::basis(2, &[0]), 1e-12));
        // orthogonal outcome annihilates
        let out = zz.contract(&QuditState::basis(2, &[1]), &[1]);
        assert!(out.norm() < 1e-12);

        // the reference codeword contracts against |00> on shares {1,2} to a
        // norm-1/2 state proportional to (|000>-|110>-|011>+|101>)/2
        let psi0 = five_qubit::psi0();
        let out = psi0.contract(&QuditState::basis(2, &[0, 0]), &[1, 2]);
        assert!((out.norm() - 0.5).abs() < 1e-12);
        let expected = QuditState::superpose(
            &[
                QuditState::basis(2, &[0, 0, 0]),
                QuditState::basis(2, &[1, 1, 0]),
                QuditState::basis(2, &[0, 1, 1]),
                QuditState::basis(2, &[1, 0, 1]),
            ],
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(out
            .normalized()
            .unwrap()
            .approx_eq_up_to_phase(&expected, 1e-12));
    }

    #[test]
    fn contract_completeness_over_a_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = 8;
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let psi = QuditState::new(2, 3, amps).unwrap();
        let total: f64 = (0..4)
            .map(|t| {
                let phi = QuditState::basis(2, &index_to_digits(2, 2, t));
                psi.contract(&phi, &[1, 3]).norm().powi(2)
            })
            .sum();
        assert!((total - psi.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        // Bell pair reduces to I/2
        let bell = QuditState::superpose(
            &[QuditState::basis(2, &[0, 0]), QuditState::basis(2, &[1, 1])],
            &[c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)],
        );
        let rho = bell.partial_trace(&[1]);
        assert!((rho.trace() - Complex64::ONE).norm() < 1e-12);
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!(rho.is_hermitian(1e-12));
        assert!(rho.is_psd(1e-10));
        assert!((rho.fidelity_with(&QuditState::basis(2, &[0])) - 0.5).abs() < 1e-12);

        // product state reduces to a pure state
        let plus = QuditState::superpose(
            &[QuditState::basis(2, &[0]), QuditState::basis(2, &[1])],
            &[c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)],
        );
        let prod = plus.tensor(&QuditState::basis(2, &[1]));
        let rho = prod.partial_trace(&[1]);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.fidelity_with(&plus) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_partial_trace_matches_pure_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let amps: Vec<Complex64> = (0..8)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let psi = QuditState::new(2, 3, amps).unwrap().normalized().unwrap();
        let direct = psi.partial_trace(&[2]);
        let via_rho = DensityMatrix::from_pure(&psi).partial_trace(&[2]);
        assert!(direct.max_abs_diff(&via_rho) < 1e-12);
        assert!((via_rho.trace() - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn trace_distance_basics() {
        let zero = DensityMatrix::from_pure(&QuditState::basis(2, &[0]));
        let one = DensityMatrix::from_pure(&QuditState::basis(2, &[1]));
        assert!((zero.trace_distance(&one) - 1.0).abs() < 1e-12);
        assert!(zero.trace_distance(&zero) < 1e-12);
    }

    #[test]
    fn synthesis_trivial_identity_code() {
        let f2 = Field::new(2, 1).unwrap();
        let code = StabilizerCode::new(&f2, 1, vec![]).unwrap();
        let family = synthesize_codewords(&code, None).unwrap();
        assert_eq!(family.states().len(), 2);
        assert!(family
            .state(0)
            .approx_eq_up_to_phase(&QuditState::basis(2, &[0]), 1e-12));
        assert!(family
            .state(1)
            .approx_eq_up_to_phase(&QuditState::basis(2, &[1]), 1e-12));
    }

    #[test]
    fn synthesis_k_zero_single_state() {
        let f2 = Field::new(2, 1).unwrap();
        let gens = vec![
            SymplecticVector::from_values(&f2, &[1, 0, 1, 0]),
            SymplecticVector::from_values(&f2, &[0, 1, 0, 1]),
        ];
        let code = StabilizerCode::new(&f2, 2, gens).unwrap();
        assert_eq!(code.k(), 0);
        let family = synthesize_codewords(&code, None).unwrap();
        assert_eq!(family.states().len(), 1);
        assert!(verify_codeword(&code, family.state(0)).unwrap());
    }

    #[test]
    fn synthesis_spans_the_reference_code_space() {
        let code = five_qubit::code();
        let family = synthesize_codewords(&code, None).unwrap();
        assert_eq!(family.states().len(), 2);
        for s in family.states() {
            assert!(verify_codeword(&code, s).unwrap());
        }
        // the reference codewords lie in the synthesized span
        for reference in [five_qubit::psi0(), five_qubit::psi1()] {
            let residual_sq: f64 = 1.0
                - family
                    .states()
                    .iter()
                    .map(|s| s.inner(&reference).norm_sqr())
                    .sum::<f64>();
            assert!(residual_sq.abs() < 1e-10);
        }
    }

    #[test]
    fn synthesis_handles_xz_overlap_generators() {
        // a q=2 generator with odd X.Z overlap (a Y factor) squares to -I
        // uncorrected; synthesis must still find a +1 eigenspace
        let f2 = Field::new(2, 1).unwrap();
        let gens = vec![SymplecticVector::from_values(&f2, &[1, 1, 0, 0])];
        let code = StabilizerCode::new(&f2, 2, gens).unwrap();
        assert_eq!(code.k(), 1);
        let family = synthesize_codewords(&code, None).unwrap();
        assert_eq!(family.states().len(), 2);
        for s in family.states() {
            assert!(verify_codeword(&code, s).unwrap());
        }
    }

    #[test]
    fn synthesis_random_codes_are_orthonormal_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for q in [2u64, 3] {
            let f = Field::with_order(q).unwrap();
            for n in 2..=4usize {
                for k in 0..=n.min(2) {
                    let code = random_self_orthogonal_code(&f, n, k, &mut rng);
                    let family = synthesize_codewords(&code, None).unwrap();
                    assert_eq!(family.states().len(), (q as usize).pow(k as u32));
                    for s in family.states() {
                        assert!(verify_codeword(&code, s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn synthesis_with_supplied_logicals() {
        let code = five_qubit::code();
        let f = code.field().clone();
        let xbar = SymplecticVector::from_values(&f, &[1, 0, 1, 0, 1, 0, 1, 0, 1, 0]);
        let family = synthesize_codewords(&code, Some(std::slice::from_ref(&xbar))).unwrap();
        // psi(1) must be the transversal-X image of psi(0)
        let x5 = PauliOperator::from_symplectic(&xbar).unwrap();
        let moved = x5.apply(family.state(0));
        assert!(moved.approx_eq_up_to_phase(family.state(1), 1e-10));
    }

    #[test]
    fn interleave_assembles_positionally() {
        let a = QuditState::basis(2, &[1]);
        let b = QuditState::basis(2, &[0, 1]);
        let merged = QuditState::interleave(&a, &[2], &b, &[1, 3]);
        assert!(merged.approx_eq_up_to_phase(&QuditState::basis(2, &[0, 1, 1]), 1e-12));
        // empty register is the scalar unit
        let unit = QuditState::new(2, 0, vec![Complex64::ONE]).unwrap();
        let merged = QuditState::interleave(&unit, &[], &b, &[1, 2]);
        assert!(merged.approx_eq_up_to_phase(&b, 1e-12));
    }

    #[test]
    fn apply_matrix_at_a_single_position() {
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ],
        );
        let out = QuditState::basis(2, &[0, 0]).apply_matrix_at(&x, &[2]);
        assert!(out.approx_eq_up_to_phase(&QuditState::basis(2, &[0, 1]), 1e-12));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [2usize, 4, 9] {
            let u = random_unitary(dim, &mut rng);
            let id = u.adjoint() * &u;
            let dev = (0..dim)
                .flat_map(|r| (0..dim).map(move |c| (r, c)))
                .map(|(r, c)| {
                    let expect = if r == c {
                        Complex64::ONE
                    } else {
                        Complex64::ZERO
                    };
                    (id[(r, c)] - expect).norm()
                })
                .fold(0.0, f64::max);
            assert!(dev < 1e-10);
        }
    }

    #[test]
    fn state_constructor_validation() {
        assert!(matches!(
            QuditState::new(4, 1, vec![Complex64::ONE; 4]),
            Err(StateError::NonPrimeDimension(4))
        ));
        assert!(matches!(
            QuditState::new(2, 2, vec![Complex64::ONE; 3]),
            Err(StateError::WrongLength {
                expected: 4,
                got: 3
            })
        ));
    }
}
