//! Independent brute-force ground truth for the access-structure layer.
//!
//! Three cross-checking routes, deliberately disjoint from the subspace
//! algebra used by [`StabilizerCode::is_qualified`]:
//!
//! - erasure enumeration: run over every error vector supported on the
//!   missing shares and confirm that a zero syndrome forces membership in
//!   the stabilizer;
//! - state witnesses: encode a probe set of secrets, trace down to a holder
//!   set, and test whether the reduced density matrices carry any
//!   distinguishing information;
//! - dimension audits: re-derive every rank identity relating the
//!   restrictions, projections, and duals of the stabilizer.
//!
//! Enumeration budgets are hard guards; the sweeps fail loudly instead of
//! running for hours.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{synthesize_codewords, CodewordFamily, DensityMatrix, QuditState, StateError};
use crate::symplectic::{SharePartition, StabilizerCode, SymplecticVector};

/// Largest number of error vectors a single brute-force check may enumerate.
pub const ENUMERATION_BUDGET: u128 = 1 << 24;

/// Largest `n` for a full `2^n` subset sweep.
pub const SWEEP_LIMIT: usize = 12;

/// State witnesses are only computed when the full state space is this small.
const STATE_CHECK_DIM_LIMIT: usize = 1024;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumerating q^{exponent} error vectors exceeds the budget of 2^24")]
    BudgetExceeded { exponent: u32 },
    #[error("subset sweep needs n <= {SWEEP_LIMIT}, code has n = {0}")]
    SweepTooLarge(usize),
    #[error("state-layer failure: {0}")]
    State(#[from] StateError),
}

/// Exhaustive erasure check: every `e` supported on `jbar` with
/// `<e, g_i> = 0` for all generators must already lie in the stabilizer.
/// Returns the qualified verdict for the complement of `jbar`.
pub fn brute_force_erasure_check(
    code: &StabilizerCode,
    jbar: &[usize],
) -> Result<bool, OracleError> {
    let q = code.q() as u128;
    let exponent = 2 * jbar.len() as u32;
    let total = q
        .checked_pow(exponent)
        .filter(|&t| t <= ENUMERATION_BUDGET)
        .ok_or(OracleError::BudgetExceeded { exponent })?;

    let field = code.field().clone();
    let n = code.n();
    for counter in 0..total {
        let mut values = vec![0u8; 2 * n];
        let mut rem = counter;
        for &share in jbar {
            values[2 * (share - 1)] = (rem % q) as u8;
            rem /= q;
            values[2 * (share - 1) + 1] = (rem % q) as u8;
            rem /= q;
        }
        let error = SymplecticVector::from_values(&field, &values);
        let zero_syndrome = code
            .raw_generators()
            .iter()
            .all(|g| error.symplectic_product(g).is_zero());
        if zero_syndrome && !code.stabilizer().contains(&error) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The deterministic probe secrets: every computational basis secret plus,
/// for each pair `u < v`, the equal-weight superpositions with relative
/// phases `1` and `i`.
fn probe_secrets(q: u8, k: usize) -> Vec<QuditState> {
    let dim = (q as usize).pow(k as u32);
    let mut probes = Vec::new();
    for u in 0..dim {
        let mut amps = vec![Complex64::ZERO; dim];
        amps[u] = Complex64::ONE;
        probes.push(QuditState::new(q, k, amps).expect("valid probe"));
    }
    let w = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    for u in 0..dim {
        for v in u + 1..dim {
            for phase in [Complex64::ONE, Complex64::I] {
                let mut amps = vec![Complex64::ZERO; dim];
                amps[u] = w;
                amps[v] = w * phase;
                probes.push(QuditState::new(q, k, amps).expect("valid probe"));
            }
        }
    }
    probes
}

/// Witness that the shares in `holders` carry no information: encode every
/// probe secret and require all reduced states on `holders` to agree
/// entrywise within `tol`. Uses the given codeword family.
pub fn forbidden_check_with(codewords: &CodewordFamily, holders: &[usize], tol: f64) -> bool {
    let probes = probe_secrets(codewords.q(), codewords.k());
    let reduced: Vec<DensityMatrix> = probes
        .iter()
        .map(|secret| {
            QuditState::superpose(codewords.states(), secret.amps()).partial_trace(holders)
        })
        .collect();
    reduced.iter().all(|a| a.max_abs_diff(&reduced[0]) <= tol)
}

/// [`forbidden_check_with`] with codewords synthesized on the fly
/// (prime `q` only).
pub fn forbidden_check_by_state(
    code: &StabilizerCode,
    holders: &[usize],
    tol: f64,
) -> Result<bool, OracleError> {
    let codewords = synthesize_codewords(code, None)?;
    Ok(forbidden_check_with(&codewords, holders, tol))
}

/// Classification of one candidate share set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetClass {
    Qualified,
    Forbidden,
    Intermediate,
}

impl fmt::Display for SubsetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            SubsetClass::Qualified => 'Q',
            SubsetClass::Forbidden => 'F',
            SubsetClass::Intermediate => 'I',
        };
        write!(f, "{c}")
    }
}

/// Brute-force verdict for one subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    Qualified,
    NotQualified,
    Skipped,
}

/// One line of the access-structure report.
#[derive(Clone, Debug)]
pub struct SubsetVerdict {
    pub indices: Vec<usize>,
    /// Classification from the subspace-comparison test (and its complement).
    pub class: SubsetClass,
    pub brute: BruteVerdict,
    /// State-witness agreement: `Some(true)` = consistent, `Some(false)` =
    /// mismatch, `None` = not computed.
    pub state_ok: Option<bool>,
}

impl SubsetVerdict {
    pub fn consistent(&self) -> bool {
        let brute_ok = match self.brute {
            BruteVerdict::Qualified => self.class == SubsetClass::Qualified,
            BruteVerdict::NotQualified => self.class != SubsetClass::Qualified,
            BruteVerdict::Skipped => true,
        };
        brute_ok && self.state_ok.unwrap_or(true)
    }
}

impl fmt::Display for SubsetVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J={{")?;
        for (i, x) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        let brute = match self.brute {
            BruteVerdict::Qualified => "Q",
            BruteVerdict::NotQualified => "F",
            BruteVerdict::Skipped => "skipped",
        };
        let state = match self.state_ok {
            Some(true) => "ok",
            Some(false) => "mismatch",
            None => "-",
        };
        write!(f, "}} eq3={} brute={brute} state={state}", self.class)
    }
}

/// Classification of every subset, with the oracle verdicts side by side.
#[derive(Clone, Debug)]
pub struct AccessStructureReport {
    pub n: usize,
    pub verdicts: Vec<SubsetVerdict>,
}

impl AccessStructureReport {
    pub fn consistent(&self) -> bool {
        self.verdicts.iter().all(SubsetVerdict::consistent)
    }

    pub fn class_of(&self, mask: u64) -> SubsetClass {
        self.verdicts[mask as usize].class
    }
}

/// Sweep all `2^n` subsets: classify via the subspace test, cross-check the
/// erasure oracle wherever the budget allows, and (for prime `q` at small
/// sizes) cross-check the state witness.
pub fn full_access_structure(
    code: &StabilizerCode,
    tol: f64,
) -> Result<AccessStructureReport, OracleError> {
    let n = code.n();
    if n > SWEEP_LIMIT {
        return Err(OracleError::SweepTooLarge(n));
    }
    let state_dim = (code.q() as usize).checked_pow(n as u32);
    let codewords =
        if code.field().is_prime_field() && state_dim.is_some_and(|d| d <= STATE_CHECK_DIM_LIMIT) {
            Some(synthesize_codewords(code, None)?)
        } else {
            None
        };

    let qualified: Vec<bool> = (0..1u64 << n)
        .map(|mask| code.is_qualified(&SharePartition::from_mask(n, mask)))
        .collect();

    let mut verdicts = Vec::with_capacity(1 << n);
    for mask in 0..1u64 << n {
        let part = SharePartition::from_mask(n, mask);
        let complement_mask = !mask & ((1 << n) - 1);
        let class = if qualified[mask as usize] {
            SubsetClass::Qualified
        } else if qualified[complement_mask as usize] {
            SubsetClass::Forbidden
        } else {
            SubsetClass::Intermediate
        };
        let brute = match brute_force_erasure_check(code, part.jbar()) {
            Ok(true) => BruteVerdict::Qualified,
            Ok(false) => BruteVerdict::NotQualified,
            Err(OracleError::BudgetExceeded { .. }) => BruteVerdict::Skipped,
            Err(e) => return Err(e),
        };
        let state_ok = codewords.as_ref().map(|family| {
            let witness = forbidden_check_with(family, part.j(), tol);
            let expected_forbidden = qualified[complement_mask as usize];
            witness == expected_forbidden
        });
        verdicts.push(SubsetVerdict {
            indices: part.j().to_vec(),
            class,
            brute,
            state_ok,
        });
    }
    Ok(AccessStructureReport { n, verdicts })
}

/// One named identity check inside a [`DimensionAudit`].
#[derive(Clone, Debug)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Re-derivation of the rank identities tying together the stabilizer, its
/// dual, and their restrictions and projections for one partition. Failures
/// are reported, not thrown.
#[derive(Clone, Debug)]
pub struct DimensionAudit {
    pub partition: SharePartition,
    pub qualified: bool,
    pub ell: i64,
    pub dim_c_j: usize,
    pub dim_c_jbar: usize,
    pub checks: Vec<AuditCheck>,
}

impl DimensionAudit {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn audit_dimensions(code: &StabilizerCode, partition: &SharePartition) -> DimensionAudit {
    let n = code.n() as i64;
    let k = code.k() as i64;
    let j_len = partition.j().len() as i64;
    let jbar_len = partition.jbar().len() as i64;

    let stab = code.stabilizer();
    let dual = code.dual();
    let dim_c_j = stab.restrict(partition.j()).dim();
    let dim_c_jbar = stab.restrict(partition.jbar()).dim();
    let qualified = code.is_qualified(partition);
    let ell = j_len - k - dim_c_j as i64;

    let mut checks = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        checks.push(AuditCheck {
            name,
            passed,
            detail,
        });
    };

    let dual_dim = dual.dim() as i64;
    push(
        "dual dimension",
        dual_dim == n + k,
        format!("dim C_perp = {dual_dim}, n + k = {}", n + k),
    );

    let lower = j_len - k - jbar_len;
    push(
        "restriction lower bound",
        lower <= dim_c_j as i64,
        format!("|J| - k - |Jbar| = {lower} <= dim C ∩ F_q^J = {dim_c_j}"),
    );

    let projected = stab.project(partition.jbar());
    push(
        "projection rank",
        projected.dim() as i64 == (n - k) - dim_c_j as i64,
        format!(
            "dim P_Jbar(C) = {}, (n - k) - dim C ∩ F_q^J = {}",
            projected.dim(),
            (n - k) - dim_c_j as i64
        ),
    );

    let dual_restricted = dual.restrict(partition.jbar()).project(partition.jbar());
    let projected_dual = projected.symplectic_dual();
    push(
        "dual of projection",
        dual_restricted == projected_dual,
        format!(
            "dim C_perp ∩ F_q^Jbar = {}, dim P_Jbar(C)^perp = {}",
            dual_restricted.dim(),
            projected_dual.dim()
        ),
    );

    if qualified {
        push(
            "restriction upper bound",
            dim_c_j as i64 <= j_len - k,
            format!("dim C ∩ F_q^J = {dim_c_j} <= |J| - k = {}", j_len - k),
        );
        push(
            "ell range",
            (0..=jbar_len).contains(&ell),
            format!("ell = {ell} within 0..={jbar_len}"),
        );
        push(
            "complement restriction",
            dim_c_jbar as i64 == jbar_len - ell,
            format!(
                "dim C ∩ F_q^Jbar = {dim_c_jbar}, |Jbar| - ell = {}",
                jbar_len - ell
            ),
        );
    }

    DimensionAudit {
        partition: partition.clone(),
        qualified,
        ell,
        dim_c_j,
        dim_c_jbar,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::five_qubit;
    use crate::gf::Field;
    use crate::symplectic::random_self_orthogonal_code;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// The [[4,2,2]] code: a ramp scheme with intermediate sets.
    fn four_two_code() -> StabilizerCode {
        let f2 = Field::new(2, 1).unwrap();
        let gens = vec![
            SymplecticVector::from_values(&f2, &[1, 0, 1, 0, 1, 0, 1, 0]),
            SymplecticVector::from_values(&f2, &[0, 1, 0, 1, 0, 1, 0, 1]),
        ];
        StabilizerCode::new(&f2, 4, gens).unwrap()
    }

    #[test]
    fn brute_force_on_the_five_qubit_code() {
        let code = five_qubit::code();
        // any two erasures are correctable
        for mask in 0..32u64 {
            let part = SharePartition::from_mask(5, mask);
            if part.jbar().len() <= 2 {
                assert!(brute_force_erasure_check(&code, part.jbar()).unwrap());
            }
        }
        assert!(!brute_force_erasure_check(&code, &[1, 2, 3]).unwrap());
        assert!(brute_force_erasure_check(&code, &[]).unwrap());
    }

    #[test]
    fn budget_guard_trips() {
        let f2 = Field::new(2, 1).unwrap();
        let code = StabilizerCode::new(&f2, 13, vec![]).unwrap();
        let jbar: Vec<usize> = (1..=13).collect();
        assert!(matches!(
            brute_force_erasure_check(&code, &jbar),
            Err(OracleError::BudgetExceeded { exponent: 26 })
        ));
    }

    #[test]
    fn state_witness_on_the_five_qubit_code() {
        let code = five_qubit::code();
        // shares {1,2} are forbidden because {3,4,5} is qualified
        assert!(forbidden_check_by_state(&code, &[1, 2], 1e-9).unwrap());
        // shares {1,2,3} are qualified, so the witness must fail
        assert!(!forbidden_check_by_state(&code, &[1, 2, 3], 1e-9).unwrap());
        // the empty holder set knows nothing, vacuously
        assert!(forbidden_check_by_state(&code, &[], 1e-9).unwrap());
    }

    #[test]
    fn full_sweep_over_an_extension_field_skips_state_checks() {
        // F_4 codes get the subspace and erasure oracles but no state layer
        let f4 = Field::with_order(4).unwrap();
        let g = SymplecticVector::from_values(&f4, &[1, 0, 2, 0]);
        let code = StabilizerCode::new(&f4, 2, vec![g]).unwrap();
        let report = full_access_structure(&code, 1e-9).unwrap();
        assert!(report.consistent());
        for v in &report.verdicts {
            assert_eq!(v.state_ok, None);
            assert_ne!(v.brute, BruteVerdict::Skipped);
        }
        assert_eq!(report.class_of(0b11), SubsetClass::Qualified);
        assert!(report.verdicts[0b01].to_string().ends_with("state=-"));
    }

    #[test]
    fn full_sweep_is_a_threshold_structure() {
        let code = five_qubit::code();
        let report = full_access_structure(&code, 1e-9).unwrap();
        assert_eq!(report.verdicts.len(), 32);
        assert!(report.consistent());
        for (mask, verdict) in report.verdicts.iter().enumerate() {
            let size = (mask as u64).count_ones();
            let expected = if size >= 3 {
                SubsetClass::Qualified
            } else {
                SubsetClass::Forbidden
            };
            assert_eq!(verdict.class, expected, "mask {mask:05b}");
            assert!(verdict.state_ok == Some(true));
        }
    }

    #[test]
    fn report_lines_follow_the_documented_format() {
        let code = five_qubit::code();
        let report = full_access_structure(&code, 1e-9).unwrap();
        let line = report.verdicts[0b00111].to_string();
        assert_eq!(line, "J={1,2,3} eq3=Q brute=Q state=ok");
        let line = report.verdicts[0b00011].to_string();
        assert_eq!(line, "J={1,2} eq3=F brute=F state=ok");
    }

    #[test]
    fn trivial_single_share_code() {
        let f2 = Field::new(2, 1).unwrap();
        let code = StabilizerCode::new(&f2, 1, vec![]).unwrap();
        let report = full_access_structure(&code, 1e-9).unwrap();
        assert_eq!(report.class_of(0b1), SubsetClass::Qualified);
        assert_eq!(report.class_of(0b0), SubsetClass::Forbidden);
        assert!(report.consistent());
    }

    #[test]
    fn ramp_code_has_intermediate_sets() {
        let code = four_two_code();
        let report = full_access_structure(&code, 1e-9).unwrap();
        assert!(report.consistent());
        // {1,2} and its complement are both non-qualified: intermediate
        assert_eq!(report.class_of(0b0011), SubsetClass::Intermediate);
        assert_eq!(report.class_of(0b1100), SubsetClass::Intermediate);
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.class == SubsetClass::Intermediate));
    }

    #[test]
    fn random_search_finds_an_intermediate_set() {
        let f2 = Field::new(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut found = false;
        'outer: for _ in 0..200 {
            let n = 4;
            let code = random_self_orthogonal_code(&f2, n, 2, &mut rng);
            for mask in 0..1u64 << n {
                let complement = !mask & ((1 << n) - 1);
                let part = SharePartition::from_mask(n, mask);
                let comp = SharePartition::from_mask(n, complement);
                if !code.is_qualified(&part) && !code.is_qualified(&comp) {
                    found = true;
                    break 'outer;
                }
            }
        }
        assert!(found, "no intermediate set found in 200 random ramp codes");
    }

    #[test]
    fn complement_duality_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for q in [2u64, 3] {
            let f = Field::with_order(q).unwrap();
            for _ in 0..5 {
                let code = random_self_orthogonal_code(&f, 4, 1, &mut rng);
                let report = full_access_structure(&code, 1e-9).unwrap();
                assert!(report.consistent());
                for mask in 0..16u64 {
                    let complement = !mask & 0xF;
                    let forbidden = report.class_of(mask) == SubsetClass::Forbidden;
                    let complement_qualified =
                        report.class_of(complement) == SubsetClass::Qualified;
                    // k >= 1 here, so qualified and forbidden are exclusive
                    assert_eq!(forbidden, complement_qualified);
                }
            }
        }
    }

    #[test]
    fn audit_five_qubit_examples() {
        let code = five_qubit::code();
        let audit = audit_dimensions(&code, &SharePartition::new(5, &[3, 4, 5]).unwrap());
        assert!(audit.all_passed());
        assert!(audit.qualified);
        assert_eq!((audit.dim_c_j, audit.dim_c_jbar, audit.ell), (0, 0, 2));

        let audit = audit_dimensions(&code, &SharePartition::new(5, &[1, 2, 3, 4, 5]).unwrap());
        assert!(audit.all_passed());
        assert_eq!(audit.dim_c_j, 4);
        assert_eq!(audit.ell, 0);

        // non-qualified partitions still get the unconditional identities
        let audit = audit_dimensions(&code, &SharePartition::new(5, &[1, 2]).unwrap());
        assert!(audit.all_passed());
        assert!(!audit.qualified);
    }

    #[test]
    fn audit_random_codes() {
        let f3 = Field::with_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..10 {
            let code = random_self_orthogonal_code(&f3, 4, 1, &mut rng);
            for mask in 0..16u64 {
                let part = SharePartition::from_mask(4, mask);
                let audit = audit_dimensions(&code, &part);
                assert!(
                    audit.all_passed(),
                    "audit failed for {part:?}: {:?}",
                    audit
                        .checks
                        .iter()
                        .filter(|c| !c.passed)
                        .collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn oracle_agrees_with_the_subspace_test_on_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for q in [2u64, 3] {
            let f = Field::with_order(q).unwrap();
            for n in 1..=4usize {
                for k in 0..=n {
                    let code = random_self_orthogonal_code(&f, n, k, &mut rng);
                    for mask in 0..1u64 << n {
                        let part = SharePartition::from_mask(n, mask);
                        let eq3 = code.is_qualified(&part);
                        let brute = brute_force_erasure_check(&code, part.jbar()).unwrap();
                        assert_eq!(eq3, brute, "q={q} n={n} k={k} {part:?}");
                    }
                }
            }
        }
    }
}
