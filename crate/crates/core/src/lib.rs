//! Multipartite qubit entanglement tangles.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] – a small dense complex matrix type and a cyclic Jacobi
//!   eigensolver for Hermitian matrices.
//! * [`state`] – kets, density matrices, local operators, partial traces and
//!   seeded Haar sampling.
//! * [`theta`] – the Levi-Civita product operators used by the even and odd
//!   k-tangles.
//! * [`tangles`] – 1-, 2-, 3- and k-tangles, their mixed-state roofs and the
//!   GHZ-block residual tangle.
//! * [`ghz`] – the GHZ SLOCC class in closed form: canonical parameters,
//!   forward formulas, inversion and reconstruction.
//! * [`constraints`] – signed-margin evaluators for the polynomial
//!   entanglement constraints on three qubits.
//! * [`canonical`] – the three-qubit five-amplitude normal form and the
//!   certificates used in the necessity argument.
//!
//! Basis convention: for an `n`-qubit ket, party `p` is stored in bit
//! `n - 1 - p` of the amplitude index, so party 0 (A) is the most
//! significant bit and `|abc>` maps to `4a + 2b + c`.

pub mod canonical;
pub mod constraints;
pub mod error;
pub mod ghz;
pub mod linalg;
pub mod state;
pub mod tangles;
pub mod theta;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{DensityMatrix, Ket, LocalOperator, PartySet};
