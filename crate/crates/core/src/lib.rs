//! Access-structure analysis and unitary secret reconstruction for
//! stabilizer-based quantum secret sharing.
//!
//! A stabilizer code on `n` qudits is described classically by a
//! self-orthogonal subspace `C` of `F_q^{2n}` under the symplectic inner
//! product. Used as a secret sharing scheme, each of the `n` qudits is one
//! share. This crate decides which share sets are qualified (can reconstruct
//! the secret) or forbidden (hold no information at all), and simulates the
//! reconstruction itself: a unitary acting only on the qualified shares that
//! moves the secret into a designated register, unentangled from everything
//! else, without adding any missing shares.
//!
//! The layers, bottom up:
//!
//! - [`gf`] — exact table-driven arithmetic in small finite fields `F_q`,
//!   `q <= 64`.
//! - [`symplectic`] — subspace algebra over `F_q^{2n}`: duals, restrictions,
//!   projections, and the qualified-set test.
//! - [`qstate`] — dense state-vector simulation of qudit registers (prime
//!   `q`): generalized Pauli operators, codeword synthesis, contractions,
//!   partial traces.
//! - [`reconstruct`] — the reconstruction pipeline: basis construction on the
//!   missing and present shares, the reconstruction unitary, and end-to-end
//!   verification that the secret comes out pure.
//! - [`oracle`] — independent brute-force ground truth: erasure enumeration,
//!   density-matrix forbidden-set witnesses, dimension audits.
//! - [`io`] — the text file formats for codes and states.
//! - [`five_qubit`] — the bundled `[[5,1,3]]` binary code together with its
//!   reference codewords, used as a golden corpus.
//! - [`golden`] — the end-to-end assertion suite over that corpus.

pub mod five_qubit;
pub mod gf;
pub mod golden;
pub mod io;
pub mod oracle;
pub mod qstate;
pub mod reconstruct;
pub mod symplectic;

pub use gf::{Field, FieldElement};
pub use qstate::{DensityMatrix, PauliOperator, QuditState};
pub use symplectic::{
    AccessAnalysis, SharePartition, StabilizerCode, SymplecticSubspace, SymplecticVector,
};
