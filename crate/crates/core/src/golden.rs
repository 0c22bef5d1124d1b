//! End-to-end assertion suite over the bundled `[[5,1,3]]` corpus.
//!
//! Runs the whole pipeline on exactly pinned data — the reference codewords,
//! the `J = {3,4,5}` partition, the conditional-state table, the unitary
//! action table, and the final product state for the secret
//! `0.6|0> + 0.8|1>` — and reports one pass/fail verdict per assertion.
//! The data are rational, so every comparison sits far inside the default
//! tolerance; running with a looser tolerance must not change any verdict.

use num_complex::Complex64;

use crate::five_qubit;
use crate::qstate::{index_to_digits, verify_codeword, PauliOperator, QuditState};
use crate::reconstruct::{build_erased_basis, verify_expansion, ReconstructionPlan};
use crate::symplectic::{SharePartition, SymplecticVector};

/// One named assertion with its verdict.
#[derive(Clone, Debug)]
pub struct GoldenAssertion {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The verdicts of a full golden run.
#[derive(Clone, Debug)]
pub struct GoldenReport {
    pub tol: f64,
    pub assertions: Vec<GoldenAssertion>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

fn entrywise_deviation(a: &QuditState, b: &QuditState) -> f64 {
    a.amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Run every assertion at tolerance `tol`.
pub fn run(tol: f64) -> GoldenReport {
    let mut assertions = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        assertions.push(GoldenAssertion {
            name,
            passed,
            detail,
        });
    };

    let code = five_qubit::code();
    let psi0 = five_qubit::psi0().with_tol(tol);
    let psi1 = five_qubit::psi1().with_tol(tol);

    let ok0 = verify_codeword(&code, &psi0).unwrap_or(false);
    let ok1 = verify_codeword(&code, &psi1).unwrap_or(false);
    push(
        "codewords stabilized",
        ok0 && ok1,
        format!("psi(0): {ok0}, psi(1): {ok1}"),
    );

    let partition = SharePartition::new(5, &[3, 4, 5]).expect("valid partition");
    let analysis = code.analyze(&partition);
    push(
        "J={3,4,5} qualified with ell=2",
        analysis.qualified
            && analysis.ell == 2
            && analysis.dim_c_j == 0
            && analysis.dim_c_jbar == 0,
        format!(
            "qualified={}, ell={}, dim_C_J={}, dim_C_Jbar={}",
            analysis.qualified, analysis.ell, analysis.dim_c_j, analysis.dim_c_jbar
        ),
    );

    let erased = match build_erased_basis(&code, &partition, tol) {
        Ok(e) => e,
        Err(e) => {
            push("erased basis construction", false, e.to_string());
            return GoldenReport { tol, assertions };
        }
    };
    let erased_dev = erased
        .states()
        .iter()
        .enumerate()
        .map(|(label, state)| {
            let expected = QuditState::basis(2, &index_to_digits(2, 2, label));
            state.max_deviation_up_to_phase(&expected)
        })
        .fold(0.0, f64::max);
    push(
        "erased basis is the computational basis",
        erased.states().len() == 4 && erased_dev <= tol,
        format!("4 states, max deviation {erased_dev:.3e}"),
    );

    let codewords = five_qubit::codeword_family();
    let plan = match ReconstructionPlan::build_with(&code, &partition, codewords, erased, tol) {
        Ok(p) => p,
        Err(e) => {
            push("reconstruction plan construction", false, e.to_string());
            return GoldenReport { tol, assertions };
        }
    };

    let reference = five_qubit::reference_conditional_states();
    let cond_dev = plan
        .conditional_states()
        .iter()
        .zip(&reference)
        .map(|(got, expected)| got.max_deviation_up_to_phase(expected))
        .fold(0.0, f64::max);
    push(
        "conditional states match the reference table",
        cond_dev <= tol,
        format!("max deviation {cond_dev:.3e} over 8 states"),
    );

    let unitarity = plan.unitarity_deviation();
    push(
        "reconstruction unitary is unitary",
        unitarity <= tol,
        format!("max |U*U - I| = {unitarity:.3e}"),
    );

    let mut action_dev: f64 = 0.0;
    for secret in 0..2usize {
        for outcome in 0..4usize {
            let moved = plan
                .conditional_state(secret, outcome)
                .apply_matrix_at(plan.unitary(), &[1, 2, 3]);
            let mut digits = index_to_digits(2, 2, outcome);
            digits.push(secret as u8);
            let expected = QuditState::basis(2, &digits);
            action_dev = action_dev.max(entrywise_deviation(&moved, &expected));
        }
    }
    push(
        "unitary maps conditional states to label kets",
        action_dev <= tol,
        format!("max deviation {action_dev:.3e} over 8 mappings"),
    );

    let expansion = verify_expansion(&plan);
    push(
        "codewords expand over the two bases",
        expansion.ok,
        format!("max deviation {:.3e}", expansion.max_deviation),
    );

    let secret = QuditState::new(
        2,
        1,
        vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)],
    )
    .expect("valid secret")
    .with_tol(tol);
    match plan.reconstruct(&secret) {
        Ok(report) => {
            let expected = five_qubit::reference_output_state(
                Complex64::new(0.6, 0.0),
                Complex64::new(0.8, 0.0),
            );
            let out_dev = entrywise_deviation(&report.output_state, &expected);
            push(
                "output equals the reference product state",
                out_dev <= tol,
                format!("max amplitude deviation {out_dev:.3e}"),
            );
            push(
                "secret register holds the secret",
                report.secret_fidelity >= 1.0 - tol && report.secret_purity >= 1.0 - tol,
                format!(
                    "fidelity {:.12}, purity {:.12}, register {:?}",
                    report.secret_fidelity, report.secret_purity, report.secret_positions
                ),
            );
        }
        Err(e) => push("reconstruction run", false, e.to_string()),
    }

    // robustness: every Pauli on the missing shares {1,2} commutes past the
    // reconstruction
    let shared = plan.encode(&secret).expect("secret is normalized");
    let f2 = code.field().clone();
    let mut min_fidelity: f64 = 1.0;
    for pattern in 0..16u8 {
        let vals = [
            pattern & 1,
            (pattern >> 1) & 1,
            (pattern >> 2) & 1,
            (pattern >> 3) & 1,
            0,
            0,
            0,
            0,
            0,
            0,
        ];
        let error = PauliOperator::from_symplectic(&SymplecticVector::from_values(&f2, &vals))
            .expect("prime field");
        let corrupted = error.apply(&shared);
        let report = plan.report(plan.apply(&corrupted), &secret);
        min_fidelity = min_fidelity.min(report.secret_fidelity);
    }
    push(
        "errors on the missing shares leave the secret intact",
        min_fidelity >= 1.0 - tol,
        format!("min fidelity {min_fidelity:.12} over all 16 Paulis on {{1,2}}"),
    );

    GoldenReport { tol, assertions }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_assertions_pass_at_the_default_tolerance() {
        let report = run(1e-9);
        for a in &report.assertions {
            assert!(a.passed, "{}: {}", a.name, a.detail);
        }
        assert_eq!(report.assertions.len(), 10);
    }

    #[test]
    fn verdicts_are_stable_under_a_looser_tolerance() {
        let strict = run(1e-9);
        let loose = run(1e-6);
        assert_eq!(strict.assertions.len(), loose.assertions.len());
        for (s, l) in strict.assertions.iter().zip(&loose.assertions) {
            assert_eq!(s.passed, l.passed, "{}", s.name);
        }
    }

    #[test]
    fn corrupted_codeword_is_detected() {
        // flip the sign of the |10010> amplitude of psi(0)
        let mut amps = five_qubit::psi0().amps().to_vec();
        let idx = crate::qstate::digits_to_index(2, &[1, 0, 0, 1, 0]);
        amps[idx] = -amps[idx];
        let corrupted = QuditState::new(2, 5, amps).unwrap();
        let code = five_qubit::code();
        assert!(!verify_codeword(&code, &corrupted).unwrap());
    }
}
