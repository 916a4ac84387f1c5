//! Random parameter draws on top of the per-index ChaCha streams.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use tangle::canonical::AcinForm;
use tangle::ghz::GhzClassParams;
use tangle::state::sample_rng;

/// GHZ-class parameters with `r` in `[1, 4)`, `phi` uniform on `[0, pi/2]`
/// and `kappa` uniform on `[-1, 1]` (or fixed at -1 when `canonical`).
pub fn random_params(n: usize, seed: u64, index: u64, canonical: bool) -> GhzClassParams {
    let mut rng = sample_rng(seed, index);
    let r = 1.0 + 3.0 * rng.random::<f64>();
    let phis = (0..n).map(|_| FRAC_PI_2 * rng.random::<f64>()).collect();
    let kappa = if canonical {
        -1.0
    } else {
        2.0 * rng.random::<f64>() - 1.0
    };
    GhzClassParams::new(n, r, phis, kappa).expect("draws lie in the valid range")
}

/// Canonical form with uniform direction on the positive orthant of the
/// five coefficients and the given phase.
pub fn random_acin(seed: u64, index: u64, omega: f64) -> AcinForm {
    let mut rng = sample_rng(seed, index);
    let mut l = [0.0; 5];
    for v in &mut l {
        *v = rng.random::<f64>() + 1e-3;
    }
    let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    AcinForm::new(l.map(|x| x / norm), omega).expect("normalized")
}

/// The two real branches of the canonical phase.
pub const OMEGA_BRANCHES: [f64; 2] = [0.0, PI];
