//! The `[[5,1,3]]` binary stabilizer code as a bundled reference corpus.
//!
//! This is the smallest code that distributes one qubit of secret to five
//! participants with a strict 3-threshold access structure, which makes it
//! the standard end-to-end fixture: generators, both logical codewords
//! (amplitudes `+-1/4`), the conditional states of the shares `{3,4,5}`
//! given a computational outcome on shares `{1,2}`, and the expected
//! reconstruction output are all small enough to pin down exactly.

use num_complex::Complex64;

use crate::io;
use crate::qstate::{CodewordFamily, QuditState};
use crate::symplectic::StabilizerCode;

pub const CODE_TEXT: &str = include_str!("../data/five_qubit.code");
pub const PSI0_TEXT: &str = include_str!("../data/five_qubit_psi0.qstate");
pub const PSI1_TEXT: &str = include_str!("../data/five_qubit_psi1.qstate");

pub fn code() -> StabilizerCode {
    io::load_code_str(CODE_TEXT).expect("bundled code file is valid")
}

/// The logical `|0>` codeword.
pub fn psi0() -> QuditState {
    io::load_state_str(PSI0_TEXT).expect("bundled state file is valid")
}

/// The logical `|1>` codeword.
pub fn psi1() -> QuditState {
    io::load_state_str(PSI1_TEXT).expect("bundled state file is valid")
}

/// Both reference codewords wrapped as a validated family.
pub fn codeword_family() -> CodewordFamily {
    CodewordFamily::from_states(&code(), vec![psi0(), psi1()])
        .expect("reference codewords are orthonormal")
}

/// Conditional states of shares `{3,4,5}` for each `(secret, outcome)` pair,
/// where `outcome` is the computational result on shares `{1,2}`. Entry
/// `secret * 4 + outcome` holds amplitudes in units of `1/2` over the
/// 3-qubit basis in big-endian order.
const CONDITIONAL_TABLE: [[i8; 8]; 8] = [
    [1, 0, 0, -1, 0, 1, -1, 0],   // (0, 00)
    [0, 1, 1, 0, -1, 0, 0, -1],   // (0, 01)
    [0, -1, 1, 0, 1, 0, 0, -1],   // (0, 10)
    [-1, 0, 0, -1, 0, -1, -1, 0], // (0, 11)
    [0, -1, -1, 0, -1, 0, 0, -1], // (1, 00)
    [-1, 0, 0, 1, 0, 1, -1, 0],   // (1, 01)
    [-1, 0, 0, -1, 0, 1, 1, 0],   // (1, 10)
    [0, -1, 1, 0, -1, 0, 0, 1],   // (1, 11)
];

/// The reference conditional basis states on shares `{3,4,5}`, indexed by
/// `secret * 4 + outcome`.
pub fn reference_conditional_states() -> Vec<QuditState> {
    CONDITIONAL_TABLE
        .iter()
        .map(|coeffs| {
            let amps = coeffs
                .iter()
                .map(|&c| Complex64::new(c as f64 * 0.5, 0.0))
                .collect();
            QuditState::new(2, 3, amps).expect("table is 8 amplitudes")
        })
        .collect()
}

/// Expected 5-qubit output of reconstructing with shares `{3,4,5}` from the
/// encoded secret `alpha0 |0> + alpha1 |1>`:
/// `(1/2)(|0000> + |0101> + |1010> + |1111>) ⊗ (alpha0 |0> + alpha1 |1>)`.
pub fn reference_output_state(alpha0: Complex64, alpha1: Complex64) -> QuditState {
    let mut amps = vec![Complex64::ZERO; 32];
    for first_four in [0b0000usize, 0b0101, 0b1010, 0b1111] {
        amps[first_four << 1] = alpha0 * 0.5;
        amps[(first_four << 1) | 1] = alpha1 * 0.5;
    }
    QuditState::new(2, 5, amps).expect("valid by construction")
}
