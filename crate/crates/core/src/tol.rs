//! Shared numerical tolerances.

/// Default absolute comparison tolerance.
pub const DEFAULT: f64 = 1e-9;

/// Normalization tolerance for kets flagged as normalized.
pub const NORM: f64 = 1e-12;

/// Hermiticity tolerance (max-entry norm of `M - M^†`).
pub const HERMITIAN: f64 = 1e-12;

/// Eigensolver input tolerance on `M - M^†`.
pub const EIG_HERMITIAN: f64 = 1e-10;

/// Negative eigenvalues down to this value are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigenvalues of a density matrix below this fraction of its trace are
/// dropped when factoring `rho = W W^†`.
pub const RANK_CUTOFF: f64 = 1e-14;

/// Third-eigenvalue bound for rank <= 2 operations.
pub const RANK_TWO: f64 = 1e-9;

/// Smallest `|det M|` accepted for an invertible local operator.
pub const SINGULAR: f64 = 1e-12;
