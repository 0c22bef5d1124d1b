//! Subspace algebra over `F_q^{2n}` under the symplectic inner product.
//!
//! A vector `x = (a_1, b_1, ..., a_n, b_n)` pairs an X exponent `a_j` and a Z
//! exponent `b_j` per qudit; the interleaved order is also the wire and
//! storage order. The inner product of `x` and `y = (a'_1, b'_1, ...)` is
//! `sum_j a_j b'_j - a'_j b_j`. A stabilizer code is a self-orthogonal
//! subspace `C` under this form, and a share set `J` is qualified exactly
//! when `C_perp ∩ F_q^Jbar = C ∩ F_q^Jbar`, which reduces to one comparison
//! of canonical reduced row-echelon bases.
//!
//! Subspaces are stored in reduced row-echelon form, so two subspaces are
//! equal iff their stored bases are identical. Qudit indices are 1-based in
//! every public interface.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::gf::{Field, FieldElement};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("generators span a space of dimension {got}, expected {expected}")]
    RankDeficient { expected: usize, got: usize },
    #[error("generators {i} and {j} are not symplectic-orthogonal")]
    NotSelfOrthogonal { i: usize, j: usize },
    #[error("share index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("share index {index} listed twice")]
    DuplicateIndex { index: usize },
    #[error("expected {expected} logical operators, got {got}")]
    LogicalCountMismatch { expected: usize, got: usize },
    #[error("logical operator {i} does not commute with the stabilizer")]
    LogicalNotInDual { i: usize },
    #[error("logical operators {i} and {j} do not commute")]
    LogicalNotCommuting { i: usize, j: usize },
    #[error("logical operators are dependent modulo the stabilizer")]
    LogicalDependent,
}

/// A vector of `F_q^{2n}` in interleaved `(a_1, b_1, ..., a_n, b_n)` order.
#[derive(Clone, PartialEq, Eq)]
pub struct SymplecticVector {
    field: Field,
    coords: Vec<FieldElement>,
}

impl SymplecticVector {
    pub fn new(field: Field, coords: Vec<FieldElement>) -> Self {
        assert!(
            coords.len().is_multiple_of(2),
            "coordinate count must be even"
        );
        for &c in &coords {
            assert_eq!(
                c.order(),
                field.order(),
                "coordinate from a different field"
            );
        }
        SymplecticVector { field, coords }
    }

    /// Convenience constructor from raw integer values.
    pub fn from_values(field: &Field, values: &[u8]) -> Self {
        let coords = values.iter().map(|&v| field.element(v)).collect();
        SymplecticVector::new(field.clone(), coords)
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        SymplecticVector::new(field.clone(), vec![field.zero(); 2 * n])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn values(&self) -> Vec<u8> {
        self.coords.iter().map(|c| c.value()).collect()
    }

    /// X exponent on qudit `j` (1-based).
    pub fn x_at(&self, j: usize) -> FieldElement {
        self.coords[2 * (j - 1)]
    }

    /// Z exponent on qudit `j` (1-based).
    pub fn z_at(&self, j: usize) -> FieldElement {
        self.coords[2 * (j - 1) + 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Qudits (1-based) where `(a_j, b_j) != (0, 0)`.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|&j| !self.x_at(j).is_zero() || !self.z_at(j).is_zero())
            .collect()
    }

    /// The symplectic inner product `sum_j a_j b'_j - a'_j b_j`.
    pub fn symplectic_product(&self, other: &SymplecticVector) -> FieldElement {
        assert_eq!(self.field, other.field, "vectors from different fields");
        assert_eq!(self.n(), other.n(), "vectors of different lengths");
        let f = &self.field;
        let mut acc = f.zero();
        for j in 0..self.n() {
            let (a, b) = (self.coords[2 * j], self.coords[2 * j + 1]);
            let (ap, bp) = (other.coords[2 * j], other.coords[2 * j + 1]);
            acc = f.add(acc, f.sub(f.mul(a, bp), f.mul(ap, b)));
        }
        acc
    }

    /// Keep the `(a_j, b_j)` pairs for `j` in `keep` (1-based, ascending),
    /// producing a vector over `2|keep|` coordinates.
    pub fn project(&self, keep: &[usize]) -> SymplecticVector {
        let coords = keep
            .iter()
            .flat_map(|&j| [self.coords[2 * (j - 1)], self.coords[2 * (j - 1) + 1]])
            .collect();
        SymplecticVector::new(self.field.clone(), coords)
    }

    fn add_scaled(&self, other: &SymplecticVector, scale: FieldElement) -> SymplecticVector {
        let f = &self.field;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| f.add(a, f.mul(scale, b)))
            .collect();
        SymplecticVector::new(f.clone(), coords)
    }
}

impl fmt::Debug for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// row-level linear algebra over F_q
// ---------------------------------------------------------------------------

type Row = Vec<FieldElement>;

/// In-place reduced row echelon form; returns pivot column indices.
/// Zero rows are removed.
fn rref_rows(field: &Field, rows: &mut Vec<Row>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(src) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, src);
        let scale = field.inv(rows[r][col]).expect("pivot is nonzero");
        for c in &mut rows[r] {
            *c = field.mul(*c, scale);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = field.neg(row[col]);
                for (cell, &p) in row.iter_mut().zip(&pivot_row) {
                    let delta = field.mul(factor, p);
                    *cell = field.add(*cell, delta);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : rows * x = 0}` from an RREF matrix, one vector per free
/// column, in ascending free-column order.
fn nullspace_rows(field: &Field, rows: &[Row], pivots: &[usize], width: usize) -> Vec<Row> {
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![field.zero(); width];
            v[fc] = field.one();
            for (row, &p) in rows.iter().zip(pivots) {
                v[p] = field.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Solve `a * x = b` (rows of `a` paired with entries of `b`); returns the
/// solution with all free variables zero, or `None` if inconsistent.
fn solve_rows(field: &Field, a: &[Row], b: &[FieldElement], width: usize) -> Option<Row> {
    let mut aug: Vec<Row> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let pivots = rref_rows(field, &mut aug);
    if pivots.contains(&width) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![field.zero(); width];
    for (row, &p) in aug.iter().zip(&pivots) {
        x[p] = row[width];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// subspaces
// ---------------------------------------------------------------------------

/// A subspace of `F_q^{2n}` held as a canonical reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq)]
pub struct SymplecticSubspace {
    field: Field,
    n: usize,
    basis: Vec<SymplecticVector>,
}

impl SymplecticSubspace {
    /// Canonicalize the span of `vectors`; the empty span is the zero space.
    pub fn from_span(field: &Field, n: usize, vectors: &[SymplecticVector]) -> Self {
        let mut rows: Vec<Row> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.field(), field, "vector from a different field");
                assert_eq!(v.n(), n, "vector of a different length");
                v.coords().to_vec()
            })
            .collect();
        rref_rows(field, &mut rows);
        let basis = rows
            .into_iter()
            .map(|r| SymplecticVector::new(field.clone(), r))
            .collect();
        SymplecticSubspace {
            field: field.clone(),
            n,
            basis,
        }
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        SymplecticSubspace::from_span(field, n, &[])
    }

    /// The full space `F_q^{2n}`.
    pub fn full(field: &Field, n: usize) -> Self {
        let rows: Vec<SymplecticVector> = (0..2 * n)
            .map(|c| {
                let mut coords = vec![field.zero(); 2 * n];
                coords[c] = field.one();
                SymplecticVector::new(field.clone(), coords)
            })
            .collect();
        SymplecticSubspace::from_span(field, n, &rows)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical RREF basis rows.
    pub fn basis(&self) -> &[SymplecticVector] {
        &self.basis
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| {
                row.coords()
                    .iter()
                    .position(|c| !c.is_zero())
                    .expect("basis rows are nonzero")
            })
            .collect()
    }

    /// Membership test by reduction against the RREF basis.
    pub fn contains(&self, v: &SymplecticVector) -> bool {
        assert_eq!(v.n(), self.n, "vector of a different length");
        let f = &self.field;
        let mut rem = v.clone();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            let coeff = rem.coords()[p];
            if !coeff.is_zero() {
                rem = rem.add_scaled(row, f.neg(coeff));
            }
        }
        rem.is_zero()
    }

    /// `{x : <x, y> = 0 for all y in self}`; dimension is `2n - dim`.
    pub fn symplectic_dual(&self) -> SymplecticSubspace {
        let f = &self.field;
        let width = 2 * self.n;
        // <x, g> = 0 is the ordinary dot product of x with the twist of g
        // that swaps each (a_j, b_j) into (b_j, -a_j).
        let mut rows: Vec<Row> = self
            .basis
            .iter()
            .map(|g| {
                let c = g.coords();
                (0..width)
                    .map(|i| {
                        if i % 2 == 0 {
                            c[i + 1]
                        } else {
                            f.neg(c[i - 1])
                        }
                    })
                    .collect()
            })
            .collect();
        let pivots = rref_rows(f, &mut rows);
        let null = nullspace_rows(f, &rows, &pivots, width);
        let vectors: Vec<SymplecticVector> = null
            .into_iter()
            .map(|r| SymplecticVector::new(f.clone(), r))
            .collect();
        SymplecticSubspace::from_span(f, self.n, &vectors)
    }

    /// `self ∩ F_q^I`: the vectors whose `(a_j, b_j)` pairs vanish for every
    /// qudit outside `keep`. The result is still a subspace of `F_q^{2n}`.
    pub fn restrict(&self, keep: &[usize]) -> SymplecticSubspace {
        let f = &self.field;
        let outside: Vec<usize> = (1..=self.n).filter(|j| !keep.contains(j)).collect();
        if self.basis.is_empty() || outside.is_empty() {
            return self.clone();
        }
        // Combinations c of basis rows with c * B_outside = 0, i.e. the
        // nullspace of the transposed outside block.
        let dim = self.dim();
        let mut transposed: Vec<Row> = outside
            .iter()
            .flat_map(|&j| [2 * (j - 1), 2 * (j - 1) + 1])
            .map(|col| self.basis.iter().map(|row| row.coords()[col]).collect())
            .collect();
        let pivots = rref_rows(f, &mut transposed);
        let coeffs = nullspace_rows(f, &transposed, &pivots, dim);
        let vectors: Vec<SymplecticVector> = coeffs
            .iter()
            .map(|c| {
                let mut acc = SymplecticVector::zero(f, self.n);
                for (coeff, row) in c.iter().zip(&self.basis) {
                    acc = acc.add_scaled(row, *coeff);
                }
                acc
            })
            .collect();
        SymplecticSubspace::from_span(f, self.n, &vectors)
    }

    /// Coordinate projection `P_I(self)` onto the qudits in `keep`
    /// (1-based, ascending); the result lives over `|keep|` qudits.
    pub fn project(&self, keep: &[usize]) -> SymplecticSubspace {
        let vectors: Vec<SymplecticVector> = self.basis.iter().map(|v| v.project(keep)).collect();
        SymplecticSubspace::from_span(&self.field, keep.len(), &vectors)
    }
}

impl fmt::Debug for SymplecticSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, dim={})", self.n, self.dim())
    }
}

// ---------------------------------------------------------------------------
// stabilizer codes and share partitions
// ---------------------------------------------------------------------------

/// An `[[n, k]]` stabilizer code: a self-orthogonal subspace of `F_q^{2n}`
/// of dimension `n - k`, kept together with the generators it was built from.
#[derive(Clone)]
pub struct StabilizerCode {
    field: Field,
    n: usize,
    k: usize,
    stabilizer: SymplecticSubspace,
    dual: SymplecticSubspace,
    raw_generators: Vec<SymplecticVector>,
}

impl StabilizerCode {
    /// Validates rank (generators must be independent) and pairwise
    /// self-orthogonality; `k = n - #generators`.
    pub fn new(
        field: &Field,
        n: usize,
        generators: Vec<SymplecticVector>,
    ) -> Result<StabilizerCode, CodeError> {
        for (i, gi) in generators.iter().enumerate() {
            for (j, gj) in generators.iter().enumerate().skip(i) {
                if !gi.symplectic_product(gj).is_zero() {
                    return Err(CodeError::NotSelfOrthogonal { i: i + 1, j: j + 1 });
                }
            }
        }
        let stabilizer = SymplecticSubspace::from_span(field, n, &generators);
        if stabilizer.dim() != generators.len() {
            return Err(CodeError::RankDeficient {
                expected: generators.len(),
                got: stabilizer.dim(),
            });
        }
        let dual = stabilizer.symplectic_dual();
        Ok(StabilizerCode {
            field: field.clone(),
            n,
            k: n - generators.len(),
            stabilizer,
            dual,
            raw_generators: generators,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u8 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stabilizer(&self) -> &SymplecticSubspace {
        &self.stabilizer
    }

    /// The symplectic dual `C_perp` (dimension `n + k`).
    pub fn dual(&self) -> &SymplecticSubspace {
        &self.dual
    }

    /// Generators as supplied, before row reduction.
    pub fn raw_generators(&self) -> &[SymplecticVector] {
        &self.raw_generators
    }

    /// Qualified-set test: `C_perp ∩ F_q^Jbar == C ∩ F_q^Jbar`, decided by
    /// comparing canonical RREF bases.
    pub fn is_qualified(&self, partition: &SharePartition) -> bool {
        let jbar = partition.jbar();
        self.dual.restrict(jbar) == self.stabilizer.restrict(jbar)
    }

    /// Qualified flag plus the dimension bookkeeping for a candidate set.
    pub fn analyze(&self, partition: &SharePartition) -> AccessAnalysis {
        let dim_c_j = self.stabilizer.restrict(partition.j()).dim();
        let dim_c_jbar = self.stabilizer.restrict(partition.jbar()).dim();
        let qualified = self.is_qualified(partition);
        let ell = partition.j().len() as i64 - self.k as i64 - dim_c_j as i64;
        if qualified {
            let (jn, jbn) = (partition.j().len() as i64, partition.jbar().len() as i64);
            assert!(
                (0..=jbn).contains(&ell),
                "qualified set with ell = {ell} outside 0..={jbn}"
            );
            assert_eq!(
                dim_c_jbar as i64,
                jbn - ell,
                "dim C ∩ F_q^Jbar must equal |Jbar| - ell for a qualified set"
            );
            assert!(
                jn - self.k as i64 - jbn <= dim_c_j as i64 && dim_c_j as i64 <= jn - self.k as i64,
                "dimension bounds violated for a qualified set"
            );
        }
        AccessAnalysis {
            partition: partition.clone(),
            qualified,
            ell,
            dim_c_j,
            dim_c_jbar,
        }
    }
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}]]_{}", self.n, self.k, self.q())
    }
}

/// A candidate share set `J` together with its complement, both sorted and
/// 1-based.
#[derive(Clone, PartialEq, Eq)]
pub struct SharePartition {
    n: usize,
    j: Vec<usize>,
    jbar: Vec<usize>,
}

impl SharePartition {
    pub fn new(n: usize, j: &[usize]) -> Result<SharePartition, CodeError> {
        let mut sorted = j.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(CodeError::DuplicateIndex { index: w[0] });
            }
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i < 1 || i > n) {
            return Err(CodeError::IndexOutOfRange { index: bad, n });
        }
        let jbar = (1..=n).filter(|i| !sorted.contains(i)).collect();
        Ok(SharePartition { n, j: sorted, jbar })
    }

    /// Partition from a bitmask: bit `i` (from 0) selects share `i + 1`.
    pub fn from_mask(n: usize, mask: u64) -> SharePartition {
        let j: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        SharePartition::new(n, &j).expect("mask yields valid indices")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The candidate (holder) set, ascending.
    pub fn j(&self) -> &[usize] {
        &self.j
    }

    /// The complement (missing) set, ascending.
    pub fn jbar(&self) -> &[usize] {
        &self.jbar
    }
}

impl fmt::Debug for SharePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J={{")?;
        for (i, x) in self.j.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// The outcome of [`StabilizerCode::analyze`] for one candidate set.
///
/// `ell = |J| - k - dim C ∩ F_q^J`; for a qualified set it also equals
/// `|Jbar| - dim C ∩ F_q^Jbar` and counts the label qudits left over after
/// reconstruction. For non-qualified sets the same formula is reported as
/// informational (it may be negative).
#[derive(Clone, Debug)]
pub struct AccessAnalysis {
    pub partition: SharePartition,
    pub qualified: bool,
    pub ell: i64,
    pub dim_c_j: usize,
    pub dim_c_jbar: usize,
}

impl AccessAnalysis {
    /// Whether `ell` attains its maximum `|Jbar|` (the typical case).
    pub fn ell_saturates(&self) -> bool {
        self.ell == self.partition.jbar().len() as i64
    }
}

// ---------------------------------------------------------------------------
// logical operators
// ---------------------------------------------------------------------------

/// Coefficients expressing `v` over the given independent vectors, if `v`
/// lies in their span.
pub fn coordinates_in_span(
    vectors: &[SymplecticVector],
    v: &SymplecticVector,
) -> Option<Vec<FieldElement>> {
    if vectors.is_empty() {
        return v.is_zero().then(Vec::new);
    }
    let f = vectors[0].field();
    let width = vectors.len();
    // one equation per coordinate: sum_i c_i * vectors[i][coord] = v[coord]
    let a: Vec<Row> = (0..v.coords().len())
        .map(|coord| vectors.iter().map(|g| g.coords()[coord]).collect())
        .collect();
    solve_rows(f, &a, v.coords(), width)
}

/// A basis of a complement of `C` inside `C_perp`: the rows of the dual's
/// RREF basis whose pivots are not pivots of `C`.
fn quotient_complement(code: &StabilizerCode) -> Vec<SymplecticVector> {
    let stab_pivots = code.stabilizer.pivots();
    code.dual
        .basis()
        .iter()
        .zip(code.dual.pivots())
        .filter(|(_, p)| !stab_pivots.contains(p))
        .map(|(v, _)| v.clone())
        .collect()
}

/// Deterministic hyperbolic pairs `(x_j, z_j)` spanning a complement of `C`
/// in `C_perp`: `<x_i, z_j> = delta_ij`, all other pairings zero.
pub fn logical_pairs(code: &StabilizerCode) -> (Vec<SymplecticVector>, Vec<SymplecticVector>) {
    let f = code.field();
    let mut pool = quotient_complement(code);
    let mut xs = Vec::with_capacity(code.k());
    let mut zs = Vec::with_capacity(code.k());
    while !pool.is_empty() {
        let x = pool.remove(0);
        let pos = pool
            .iter()
            .position(|w| !x.symplectic_product(w).is_zero())
            .expect("nondegenerate form pairs every vector");
        let mut z = pool.remove(pos);
        let scale = f.inv(x.symplectic_product(&z)).expect("pairing is nonzero");
        z = SymplecticVector::zero(f, code.n()).add_scaled(&z, scale);
        for w in &mut pool {
            // make w orthogonal to the extracted pair
            let wz = w.symplectic_product(&z);
            let wx = w.symplectic_product(&x);
            *w = w.add_scaled(&x, f.neg(wz)).add_scaled(&z, wx);
        }
        xs.push(x);
        zs.push(z);
    }
    (xs, zs)
}

/// For user-chosen logical X operators, solve for conjugate Z partners:
/// `z_j` in `C_perp` with `<x_i, z_j> = delta_ij` and `<z_i, z_j> = 0`.
pub fn logical_conjugates(
    code: &StabilizerCode,
    xs: &[SymplecticVector],
) -> Result<Vec<SymplecticVector>, CodeError> {
    let f = code.field();
    if xs.len() != code.k() {
        return Err(CodeError::LogicalCountMismatch {
            expected: code.k(),
            got: xs.len(),
        });
    }
    for (i, x) in xs.iter().enumerate() {
        if !code.dual.contains(x) {
            return Err(CodeError::LogicalNotInDual { i: i + 1 });
        }
        for (j, y) in xs.iter().enumerate().skip(i + 1) {
            if !x.symplectic_product(y).is_zero() {
                return Err(CodeError::LogicalNotCommuting { i: i + 1, j: j + 1 });
            }
        }
    }
    // independence modulo C: stacking C's basis with xs must have full rank
    let mut stacked: Vec<SymplecticVector> = code.stabilizer.basis().to_vec();
    stacked.extend_from_slice(xs);
    let span = SymplecticSubspace::from_span(f, code.n(), &stacked);
    if span.dim() != code.stabilizer.dim() + xs.len() {
        return Err(CodeError::LogicalDependent);
    }

    let pool = quotient_complement(code);
    let dim = pool.len();
    let mut zs: Vec<SymplecticVector> = Vec::with_capacity(xs.len());
    for j in 0..xs.len() {
        // constraints on the coefficients c of z = sum c_t pool_t
        let mut a: Vec<Row> = Vec::new();
        let mut b: Vec<FieldElement> = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            a.push(pool.iter().map(|w| x.symplectic_product(w)).collect());
            b.push(if i == j { f.one() } else { f.zero() });
        }
        for z in &zs {
            a.push(pool.iter().map(|w| z.symplectic_product(w)).collect());
            b.push(f.zero());
        }
        let c = solve_rows(f, &a, &b, dim)
            .expect("conjugate partner exists for independent isotropic logicals");
        let mut z = SymplecticVector::zero(f, code.n());
        for (coeff, w) in c.iter().zip(&pool) {
            z = z.add_scaled(w, *coeff);
        }
        zs.push(z);
    }
    Ok(zs)
}

/// Sample a uniform-ish random self-orthogonal code of dimension `n - k` by
/// repeatedly drawing vectors from the symplectic dual of what has been
/// accepted so far.
pub fn random_self_orthogonal_code<R: Rng>(
    field: &Field,
    n: usize,
    k: usize,
    rng: &mut R,
) -> StabilizerCode {
    assert!(k <= n, "k must not exceed n");
    let q = field.order();
    let mut generators: Vec<SymplecticVector> = Vec::with_capacity(n - k);
    while generators.len() < n - k {
        let span = SymplecticSubspace::from_span(field, n, &generators);
        let dual = span.symplectic_dual();
        loop {
            let mut candidate = SymplecticVector::zero(field, n);
            for basis_vec in dual.basis() {
                let coeff = field.element(rng.random_range(0..q));
                candidate = candidate.add_scaled(basis_vec, coeff);
            }
            if !candidate.is_zero() && !span.contains(&candidate) {
                generators.push(candidate);
                break;
            }
        }
    }
    StabilizerCode::new(field, n, generators).expect("construction maintains the invariants")
}
