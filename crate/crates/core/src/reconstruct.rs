//! Unitary secret reconstruction on a qualified share set.
//!
//! For a qualified set `J` the encoded state factors through two orthonormal
//! families: an ONB `{phi(l)}` of the restricted code space on the missing
//! shares `Jbar`, and for each secret label `i` and outcome label `l` a
//! conditional state of the `J` shares obtained by contracting the codeword
//! `psi(i)` against `phi(l)`. All those contractions have the same norm
//! `q^{-ell/2}`, the normalized conditional states form an ONB of the
//! restricted code space on `J`, and every codeword expands as
//!
//! ```text
//! psi(i) = q^{-ell/2} * sum_l  phi(l) ⊗ cond(i, l)
//! ```
//!
//! The reconstruction unitary acts on the `J` qudits only and maps
//! `cond(i, l)` to `|l> ⊗ |i> ⊗ |0...0>`, so after applying it the secret
//! sits in a designated `k`-qudit register of `J`, unentangled from
//! everything else, and nothing was ever done to the missing shares.
//!
//! The output register order is label (`ell` qudits), then secret (`k`
//! qudits), then zero padding; `|J| >= ell + k` always holds, so the layout
//! exists for every qualified set.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{
    digits_to_index, index_to_digits, CodewordFamily, DensityMatrix, PauliOperator, QuditState,
    StateError,
};
use crate::symplectic::{AccessAnalysis, SharePartition, StabilizerCode};

const NULL_CUTOFF: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("share set {0} is not qualified: C_perp and C differ on the complement")]
    NotQualified(String),
    #[error("state-layer failure: {0}")]
    State(#[from] StateError),
    #[error("restricted code space yielded {got} basis states, expected {expected}")]
    BasisCountMismatch { expected: usize, got: usize },
    #[error("contraction for secret {secret}, outcome {outcome} is numerically zero")]
    ZeroContraction { secret: usize, outcome: usize },
    #[error(
        "contraction norms are not equal: secret {secret}, outcome {outcome} \
         gave {got:.6e}, expected {expected:.6e}"
    )]
    UnequalLengths {
        secret: usize,
        outcome: usize,
        expected: f64,
        got: f64,
    },
    #[error("secret has squared norm {0:.6e}, expected 1")]
    UnnormalizedSecret(f64),
    #[error("secret is on {got} qudits, expected {expected}")]
    SecretShapeMismatch { expected: usize, got: usize },
    #[error("codeword family has {got} states, expected {expected}")]
    CodewordCountMismatch { expected: usize, got: usize },
}

/// An orthonormal basis of the code space that the stabilizer restricted to
/// the missing shares defines on those `|Jbar|` qudits. It has exactly
/// `q^ell` members.
#[derive(Clone, Debug)]
pub struct ErasedCodeBasis {
    partition: SharePartition,
    ell: usize,
    states: Vec<QuditState>,
}

impl ErasedCodeBasis {
    pub fn partition(&self) -> &SharePartition {
        &self.partition
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn states(&self) -> &[QuditState] {
        &self.states
    }

    pub fn state(&self, label: usize) -> &QuditState {
        &self.states[label]
    }

    /// Mix the basis by a `q^ell x q^ell` unitary: the rotated family spans
    /// the same space and is again orthonormal.
    pub fn rotated(&self, u: &DMatrix<Complex64>) -> ErasedCodeBasis {
        let count = self.states.len();
        assert_eq!(u.nrows(), count, "rotation must match the basis size");
        assert_eq!(u.ncols(), count, "rotation must be square");
        let states = (0..count)
            .map(|col| {
                let coeffs: Vec<Complex64> = (0..count).map(|row| u[(row, col)]).collect();
                QuditState::superpose(&self.states, &coeffs)
            })
            .collect();
        ErasedCodeBasis {
            partition: self.partition.clone(),
            ell: self.ell,
            states,
        }
    }
}

/// Where the output registers live inside the qualified set, as global
/// 1-based qudit positions: the first `ell` qudits of `J` carry the outcome
/// label, the next `k` the secret, the rest are reset to `|0>`.
#[derive(Clone, Debug)]
pub struct RegisterLayout {
    label: Vec<usize>,
    secret: Vec<usize>,
    padding: Vec<usize>,
}

impl RegisterLayout {
    fn new(j: &[usize], ell: usize, k: usize) -> RegisterLayout {
        RegisterLayout {
            label: j[..ell].to_vec(),
            secret: j[ell..ell + k].to_vec(),
            padding: j[ell + k..].to_vec(),
        }
    }

    pub fn label_positions(&self) -> &[usize] {
        &self.label
    }

    pub fn secret_positions(&self) -> &[usize] {
        &self.secret
    }

    pub fn padding_positions(&self) -> &[usize] {
        &self.padding
    }
}

/// Operators on the `|Jbar|` register whose joint `+1` eigenspace is the
/// restricted code space *in the phase sector the global code actually
/// occupies*.
///
/// Each basis element of `C ∩ F_q^Jbar` is rebuilt as the word in the
/// corrected raw generator operators given by its coordinates over the raw
/// generators, with the product phase tracked exactly. The word fixes every
/// codeword (it is a product of operators that do), so its restriction to
/// `Jbar` fixes the reduced states; a naive per-element phase correction
/// would land in the wrong sector whenever the word phase is not `+1`.
fn restricted_stabilizer_ops(
    code: &StabilizerCode,
    jbar: &[usize],
) -> Result<Vec<PauliOperator>, StateError> {
    let raw_ops = crate::qstate::code_space_generators(code)?;
    let restricted = code.stabilizer().restrict(jbar);
    restricted
        .basis()
        .iter()
        .map(|v| {
            let coeffs = crate::symplectic::coordinates_in_span(code.raw_generators(), v)
                .expect("the restriction lies inside the stabilizer");
            let mut word = PauliOperator::identity(code.q(), code.n());
            for (op, c) in raw_ops.iter().zip(&coeffs) {
                for _ in 0..c.value() {
                    word = word.compose(op);
                }
            }
            Ok(word.restricted_to(jbar))
        })
        .collect()
}

/// Construct the erased-side basis: project computational basis states of
/// the `|Jbar|` register through the restricted stabilizer's code projector,
/// orthonormalize in lexicographic order, and keep the `q^ell` survivors.
pub fn build_erased_basis(
    code: &StabilizerCode,
    partition: &SharePartition,
    tol: f64,
) -> Result<ErasedCodeBasis, ReconstructError> {
    let analysis = code.analyze(partition);
    if !analysis.qualified {
        return Err(ReconstructError::NotQualified(format!("{partition:?}")));
    }
    let ell = analysis.ell as usize;
    let q = code.q();
    let jbar = partition.jbar();
    let expected = (q as usize).pow(ell as u32);

    if jbar.is_empty() {
        // the empty register: a single scalar state
        let unit = QuditState::new(q, 0, vec![Complex64::ONE])
            .map_err(ReconstructError::State)?
            .with_tol(tol);
        return Ok(ErasedCodeBasis {
            partition: partition.clone(),
            ell,
            states: vec![unit],
        });
    }

    let ops = restricted_stabilizer_ops(code, jbar)?;

    let m = jbar.len();
    let mut states: Vec<QuditState> = Vec::with_capacity(expected);
    for seed in 0..(q as usize).pow(m as u32) {
        if states.len() == expected {
            break;
        }
        let basis = QuditState::basis(q, &index_to_digits(q, m, seed));
        let mut candidate = crate::qstate::project_onto_code_space(&ops, &basis);
        for accepted in &states {
            let overlap = accepted.inner(&candidate);
            candidate = QuditState::superpose(
                &[candidate.clone(), accepted.clone()],
                &[Complex64::ONE, -overlap],
            );
        }
        if candidate.norm() > NULL_CUTOFF {
            states.push(candidate.normalized()?.with_tol(tol));
        }
    }
    if states.len() != expected {
        return Err(ReconstructError::BasisCountMismatch {
            expected,
            got: states.len(),
        });
    }
    Ok(ErasedCodeBasis {
        partition: partition.clone(),
        ell,
        states,
    })
}

/// Contract every codeword against every erased-basis state, check the
/// equal-length law, and normalize. Entry `secret * q^ell + outcome`.
pub fn build_conditional_basis(
    code: &StabilizerCode,
    partition: &SharePartition,
    codewords: &CodewordFamily,
    erased: &ErasedCodeBasis,
    tol: f64,
) -> Result<Vec<QuditState>, ReconstructError> {
    let q = code.q() as usize;
    let ell = erased.ell();
    let expected_norm = (q as f64).powi(-(ell as i32)).sqrt();
    let jbar = partition.jbar();

    let mut states = Vec::with_capacity(codewords.states().len() * erased.states().len());
    for (secret, psi) in codewords.states().iter().enumerate() {
        for (outcome, phi) in erased.states().iter().enumerate() {
            let contraction = psi.contract(phi, jbar);
            let norm = contraction.norm();
            if norm <= NULL_CUTOFF {
                return Err(ReconstructError::ZeroContraction { secret, outcome });
            }
            if (norm - expected_norm).abs() > tol {
                return Err(ReconstructError::UnequalLengths {
                    secret,
                    outcome,
                    expected: expected_norm,
                    got: norm,
                });
            }
            states.push(contraction.normalized()?.with_tol(tol));
        }
    }

    // the family is an ONB of the restricted code space on J
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
        return Err(ReconstructError::State(StateError::NotOrthonormal(max_dev)));
    }
    Ok(states)
}

/// A completed reconstruction: the bases, the register layout, and the dense
/// unitary on the `J` register. Immutable once built; reconstructing
/// different secrets reuses the same plan.
#[derive(Clone, Debug)]
pub struct ReconstructionPlan {
    code: StabilizerCode,
    partition: SharePartition,
    analysis: AccessAnalysis,
    codewords: CodewordFamily,
    erased: ErasedCodeBasis,
    conditional: Vec<QuditState>,
    layout: RegisterLayout,
    unitary: DMatrix<Complex64>,
    tol: f64,
}

impl ReconstructionPlan {
    /// Build with synthesized codewords and the deterministic erased basis.
    pub fn build(
        code: &StabilizerCode,
        partition: &SharePartition,
        tol: f64,
    ) -> Result<ReconstructionPlan, ReconstructError> {
        let codewords = crate::qstate::synthesize_codewords(code, None)?;
        let erased = build_erased_basis(code, partition, tol)?;
        ReconstructionPlan::build_with(code, partition, codewords, erased, tol)
    }

    /// Build from explicit codewords (e.g. loaded from files) and an explicit
    /// erased-side basis (e.g. a rotated one).
    pub fn build_with(
        code: &StabilizerCode,
        partition: &SharePartition,
        codewords: CodewordFamily,
        erased: ErasedCodeBasis,
        tol: f64,
    ) -> Result<ReconstructionPlan, ReconstructError> {
        let analysis = code.analyze(partition);
        if !analysis.qualified {
            return Err(ReconstructError::NotQualified(format!("{partition:?}")));
        }
        let q = code.q() as usize;
        let k = code.k();
        let ell = analysis.ell as usize;
        let expected_codewords = q.pow(k as u32);
        if codewords.states().len() != expected_codewords {
            return Err(ReconstructError::CodewordCountMismatch {
                expected: expected_codewords,
                got: codewords.states().len(),
            });
        }
        let expected_erased = q.pow(ell as u32);
        if erased.states().len() != expected_erased {
            return Err(ReconstructError::BasisCountMismatch {
                expected: expected_erased,
                got: erased.states().len(),
            });
        }

        let conditional = build_conditional_basis(code, partition, &codewords, &erased, tol)?;
        let j = partition.j();
        assert!(
            j.len() >= ell + k,
            "a qualified set always has |J| >= ell + k"
        );
        let layout = RegisterLayout::new(j, ell, k);
        let unitary = build_unitary(code.q(), j.len(), ell, k, &conditional);

        Ok(ReconstructionPlan {
            code: code.clone(),
            partition: partition.clone(),
            analysis,
            codewords,
            erased,
            conditional,
            layout,
            unitary,
            tol,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn partition(&self) -> &SharePartition {
        &self.partition
    }

    pub fn analysis(&self) -> &AccessAnalysis {
        &self.analysis
    }

    pub fn codewords(&self) -> &CodewordFamily {
        &self.codewords
    }

    pub fn erased_basis(&self) -> &ErasedCodeBasis {
        &self.erased
    }

    /// Conditional states of the `J` register, entry `secret * q^ell + outcome`.
    pub fn conditional_states(&self) -> &[QuditState] {
        &self.conditional
    }

    pub fn conditional_state(&self, secret: usize, outcome: usize) -> &QuditState {
        let per_secret = self.erased.states().len();
        &self.conditional[secret * per_secret + outcome]
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    /// The `q^{|J|} x q^{|J|}` reconstruction unitary.
    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `max |(U adjoint U - I)_{rc}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let u = &self.unitary;
        let id = u.adjoint() * u;
        let dim = u.nrows();
        (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| {
                let expect = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                (id[(r, c)] - expect).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Encode a secret into the shared `n`-qudit state `sum_i alpha_i psi(i)`.
    pub fn encode(&self, secret: &QuditState) -> Result<QuditState, ReconstructError> {
        let k = self.code.k();
        if secret.m() != k {
            return Err(ReconstructError::SecretShapeMismatch {
                expected: k,
                got: secret.m(),
            });
        }
        let norm_sq = secret.norm().powi(2);
        if (norm_sq - 1.0).abs() > self.tol.max(1e-9) {
            return Err(ReconstructError::UnnormalizedSecret(norm_sq));
        }
        Ok(QuditState::superpose(
            self.codewords.states(),
            secret.amps(),
        ))
    }

    /// Apply the reconstruction unitary to the `J` qudits of a shared state,
    /// identity on the missing shares.
    pub fn apply(&self, shared: &QuditState) -> QuditState {
        shared.apply_matrix_at(&self.unitary, self.partition.j())
    }

    /// Diagnostics of an output state against the intended secret.
    pub fn report(&self, output: QuditState, secret: &QuditState) -> ReconstructionReport {
        let secret_positions = self.layout.secret_positions().to_vec();
        let reduced = output.partial_trace(&secret_positions);
        let secret_fidelity = reduced.fidelity_with(secret);
        let secret_purity = reduced.purity();
        let residual_entanglement = reduced.trace_distance(&DensityMatrix::from_pure(secret));
        ReconstructionReport {
            output_state: output,
            secret_fidelity,
            secret_purity,
            residual_entanglement,
            secret_positions,
        }
    }

    /// End to end: encode the secret, apply the unitary on `J`, and report.
    pub fn reconstruct(
        &self,
        secret: &QuditState,
    ) -> Result<ReconstructionReport, ReconstructError> {
        let shared = self.encode(secret)?;
        let output = self.apply(&shared);
        Ok(self.report(output, secret))
    }
}

/// Result of running a reconstruction.
#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub output_state: QuditState,
    pub secret_fidelity: f64,
    pub secret_purity: f64,
    /// Trace distance between the secret register's reduced state and the
    /// ideal secret.
    pub residual_entanglement: f64,
    /// Global 1-based positions of the secret register.
    pub secret_positions: Vec<usize>,
}

/// Assemble the unitary: conditional states map to `|outcome>|secret>|0..0>`
/// kets, and both partial bases are completed deterministically over
/// lexicographic computational vectors.
fn build_unitary(
    q: u8,
    j_len: usize,
    ell: usize,
    k: usize,
    conditional: &[QuditState],
) -> DMatrix<Complex64> {
    let dim = (q as usize).pow(j_len as u32);
    let mut source: Vec<Vec<Complex64>> = conditional.iter().map(|s| s.amps().to_vec()).collect();
    let mut target_indices: Vec<usize> = Vec::with_capacity(conditional.len());
    let per_secret = (q as usize).pow(ell as u32);
    for (idx, _) in conditional.iter().enumerate() {
        let secret = idx / per_secret;
        let outcome = idx % per_secret;
        let mut digits = index_to_digits(q, ell, outcome);
        digits.extend(index_to_digits(q, k, secret));
        digits.extend(std::iter::repeat_n(0, j_len - ell - k));
        target_indices.push(digits_to_index(q, &digits));
    }

    // complete the source family over computational vectors, lexicographic
    for t in 0..dim {
        if source.len() == dim {
            break;
        }
        let mut v = vec![Complex64::ZERO; dim];
        v[t] = Complex64::ONE;
        for s in &source {
            let overlap: Complex64 = s.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (ve, se) in v.iter_mut().zip(s) {
                *ve -= overlap * se;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > NULL_CUTOFF {
            for ve in &mut v {
                *ve /= norm;
            }
            source.push(v);
        }
    }
    assert_eq!(
        source.len(),
        dim,
        "orthonormal completion must fill the space"
    );

    // complete the target kets with the unused computational indices
    let mut used = vec![false; dim];
    for &t in &target_indices {
        used[t] = true;
    }
    target_indices.extend((0..dim).filter(|&t| !used[t]));

    // U = sum_c |target_c><source_c|
    let mut u = DMatrix::from_element(dim, dim, Complex64::ZERO);
    for (col_state, &target) in source.iter().zip(&target_indices) {
        for (row, amp) in col_state.iter().enumerate() {
            // <source_c| contributes the conjugate
            u[(target, row)] += amp.conj();
        }
    }
    u
}

/// Outcome of checking the expansion identity
/// `psi(i) = q^{-ell/2} sum_l phi(l) ⊗ cond(i, l)` for every codeword.
#[derive(Clone, Copy, Debug)]
pub struct ExpansionCheck {
    pub ok: bool,
    pub max_deviation: f64,
}

/// Rebuild every codeword from the two bases and compare against the stored
/// one (up to a per-codeword global phase) at the plan's tolerance.
pub fn verify_expansion(plan: &ReconstructionPlan) -> ExpansionCheck {
    let q = plan.code.q() as usize;
    let ell = plan.erased.ell();
    let scale = Complex64::new((q as f64).powi(-(ell as i32)).sqrt(), 0.0);
    let jbar = plan.partition.jbar();
    let j = plan.partition.j();

    let mut max_dev: f64 = 0.0;
    for (secret, psi) in plan.codewords.states().iter().enumerate() {
        let terms: Vec<QuditState> = plan
            .erased
            .states()
            .iter()
            .enumerate()
            .map(|(outcome, phi)| {
                QuditState::interleave(phi, jbar, plan.conditional_state(secret, outcome), j)
            })
            .collect();
        let coeffs = vec![scale; terms.len()];
        let rebuilt = QuditState::superpose(&terms, &coeffs);
        max_dev = max_dev.max(rebuilt.max_deviation_up_to_phase(psi));
    }
    ExpansionCheck {
        ok: max_dev <= plan.tol,
        max_deviation: max_dev,
    }
}
