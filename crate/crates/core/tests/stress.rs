//! Long-running randomized stress sweep, excluded from the default run:
//!
//! ```sh
//! cargo test -p stabshare --test stress -- --ignored --nocapture
//! ```
//!
//! Builds a full reconstruction plan for every qualified set of several
//! hundred random codes (q in {2, 3, 5}) and checks unitarity, fidelity,
//! purity, and the expansion identity on each.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabshare::gf::Field;
use stabshare::qstate::QuditState;
use stabshare::reconstruct::{verify_expansion, ReconstructionPlan};
use stabshare::symplectic::{random_self_orthogonal_code, SharePartition};

#[test]
#[ignore = "broad randomized sweep; run on demand"]
fn every_qualified_set_of_many_random_codes_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(987654);
    let mut plans = 0usize;
    for (q, n_max, reps) in [(2u64, 5usize, 30usize), (3, 4, 20), (5, 3, 8)] {
        let field = Field::with_order(q).unwrap();
        for n in 1..=n_max {
            for k in 0..=n {
                for _ in 0..reps {
                    let code = random_self_orthogonal_code(&field, n, k, &mut rng);
                    for mask in 0..1u64 << n {
                        let part = SharePartition::from_mask(n, mask);
                        if !code.is_qualified(&part) {
                            continue;
                        }
                        let plan = ReconstructionPlan::build(&code, &part, 1e-9)
                            .unwrap_or_else(|e| {
                                panic!("plan build failed: q={q} n={n} k={k} {part:?}: {e}")
                            });
                        plans += 1;
                        assert!(
                            plan.unitarity_deviation() < 1e-9,
                            "unitarity q={q} n={n} k={k} {part:?}"
                        );
                        let dim = (q as usize).pow(k as u32);
                        let amps: Vec<Complex64> = (0..dim)
                            .map(|i| Complex64::new(1.0 + i as f64, 0.5 - i as f64 * 0.25))
                            .collect();
                        let secret = QuditState::new(q as u8, k, amps)
                            .unwrap()
                            .normalized()
                            .unwrap();
                        let report = plan.reconstruct(&secret).unwrap();
                        assert!(
                            report.secret_fidelity > 1.0 - 1e-9,
                            "fidelity {} q={q} n={n} k={k} {part:?}",
                            report.secret_fidelity
                        );
                        assert!(report.secret_purity > 1.0 - 1e-9);
                        let expansion = verify_expansion(&plan);
                        assert!(
                            expansion.ok,
                            "expansion deviation {} q={q} n={n} k={k} {part:?}",
                            expansion.max_deviation
                        );
                    }
                }
            }
        }
        println!("q={q}: cumulative plans checked = {plans}");
    }
    println!("stress sweep complete: {plans} plans verified");
    assert!(plans > 500);
}
