//! Executable side of the tangle library: Monte Carlo suites over the
//! identities and inequalities, a brute-force roof oracle, and CSV export of
//! constraint surfaces.

pub mod commands;
pub mod error;
pub mod roof;
pub mod sampling;
pub mod suites;
pub mod surface;

pub use error::{HarnessError, Result};
