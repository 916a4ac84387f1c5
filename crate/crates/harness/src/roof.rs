//! Brute-force convex and concave roofs of even-`k` tangles on rank <= 2
//! density matrices.
//!
//! With `rho = w0 w0^† + w1 w1^†` every decomposition into `m` pure states
//! is `phi_j = sum_a c_ja w_a` for an `m x 2` isometry `C`, and the average
//! pure tangle is `sum_j |c_j^T T c_j|` with `T_ab = w_a^T Theta w_b`. Two-term
//! decompositions are searched on a dense `(theta, phi)` grid followed by
//! compass refinement; three-term ones by multistart local search.

use std::f64::consts::PI;

use tangle::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use tangle::linalg::hermitian_eigen;
use tangle::state::sample_rng;
use tangle::theta::theta_plus_bilinear;
use tangle::{tol, DensityMatrix, Error};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofEstimate {
    pub convex: f64,
    pub concave: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoofConfig {
    /// Points per angle on the two-term grid.
    pub grid: usize,
    /// Local searches seeded at the best grid points.
    pub refine_from: usize,
    /// Random starts for the three-term search; 0 disables it.
    pub three_term_starts: usize,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            grid: 721,
            refine_from: 8,
            three_term_starts: 8,
            seed: 0,
        }
    }
}

type Sym2 = [[Complex64; 2]; 2];

fn quad(t: &Sym2, c: [Complex64; 2]) -> f64 {
    (c[0] * c[0] * t[0][0] + c[0] * c[1] * (t[0][1] + t[1][0]) + c[1] * c[1] * t[1][1]).norm()
}

fn two_term(t: &Sym2, theta: f64, phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    quad(t, [Complex64::new(c, 0.0), e * s]) + quad(t, [Complex64::new(-s, 0.0), e * c])
}

/// Rows of the 3x2 isometry obtained by Gram-Schmidt on the columns of the
/// matrix encoded in `p` (real and imaginary parts, row-major).
fn three_term(t: &Sym2, p: &[f64; 12]) -> f64 {
    let z = |k: usize| Complex64::new(p[2 * k], p[2 * k + 1]);
    let mut a = [z(0), z(2), z(4)];
    let mut b = [z(1), z(3), z(5)];
    let na = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if na < 1e-12 {
        return f64::NAN;
    }
    a.iter_mut().for_each(|v| *v /= na);
    let proj: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    for (bv, av) in b.iter_mut().zip(&a) {
        *bv -= proj * av;
    }
    let nb = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if nb < 1e-12 {
        return f64::NAN;
    }
    b.iter_mut().for_each(|v| *v /= nb);
    (0..3).map(|j| quad(t, [a[j], b[j]])).sum()
}

/// Compass search on `f` (minimizing `sign * f`).
fn compass<const N: usize>(f: impl Fn(&[f64; N]) -> f64, start: [f64; N], step: f64, sign: f64) -> f64 {
    let mut x = start;
    let mut best = sign * f(&x);
    let mut h = step;
    let mut iters = 0;
    while h > 1e-13 && iters < 20_000 {
        iters += 1;
        let mut improved = false;
        for d in 0..N {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[d] += dir * h;
                let v = sign * f(&y);
                if v < best - 1e-15 * best.abs() {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if N == 2 {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut y = x;
                y[0] += a * h;
                y[1] += b * h;
                let v = sign * f(&y);
                if v < best - 1e-15 * best.abs() {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    sign * best
}

/// Symmetric matrix `T_ab = w_a^T Theta w_b` of the weighted eigenvectors.
fn mixing_matrix(rho: &DensityMatrix) -> Result<Sym2> {
    let k = rho.k();
    if !k.is_multiple_of(2) || k == 0 {
        return Err(Error::Domain(format!("brute-force roof needs even k, got {k}")).into());
    }
    if k > 4 {
        return Err(Error::Size(format!("brute-force roof supports k <= 4, got {k}")).into());
    }
    let eig = hermitian_eigen(rho.matrix())?;
    let third = eig.values.get(2).copied().unwrap_or(0.0);
    if third >= tol::RANK_TWO {
        let rank = eig.values.iter().filter(|&&v| v >= tol::RANK_TWO).count();
        return Err(Error::UnsupportedRank { rank, max: 2 }.into());
    }
    let w: Vec<Vec<Complex64>> = (0..2)
        .map(|a| {
            let s = eig.values[a].max(0.0).sqrt();
            (0..rho.dim()).map(|i| eig.vectors[(i, a)] * s).collect()
        })
        .collect();
    let mut t = [[Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            t[a][b] = theta_plus_bilinear(&w[a], &w[b]);
        }
    }
    Ok(t)
}

pub fn convex_roof_bruteforce(rho: &DensityMatrix) -> Result<RoofEstimate> {
    convex_roof_bruteforce_with(rho, &RoofConfig::default())
}

pub fn convex_roof_bruteforce_with(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofEstimate> {
    let t = mixing_matrix(rho)?;
    let g = cfg.grid.max(2);
    let dt = PI / (g - 1) as f64;
    let dp = 2.0 * PI / (g - 1) as f64;

    // best few grid points for each direction
    let keep = cfg.refine_from.max(1);
    let mut lows: Vec<(f64, [f64; 2])> = Vec::with_capacity(keep + 1);
    let mut highs: Vec<(f64, [f64; 2])> = Vec::with_capacity(keep + 1);
    let push = |list: &mut Vec<(f64, [f64; 2])>, v: f64, at: [f64; 2], better: fn(f64, f64) -> bool| {
        if list.len() < keep || better(v, list[list.len() - 1].0) {
            let pos = list.iter().position(|e| better(v, e.0)).unwrap_or(list.len());
            list.insert(pos, (v, at));
            list.truncate(keep);
        }
    };
    for i in 0..g {
        for j in 0..g {
            let at = [i as f64 * dt, j as f64 * dp];
            let v = two_term(&t, at[0], at[1]);
            push(&mut lows, v, at, |a, b| a < b);
            push(&mut highs, v, at, |a, b| a > b);
        }
    }
    let f2 = |x: &[f64; 2]| two_term(&t, x[0], x[1]);
    let mut convex = lows
        .iter()
        .map(|(_, at)| compass(f2, *at, dt, 1.0))
        .fold(f64::INFINITY, f64::min);
    let mut concave = highs
        .iter()
        .map(|(_, at)| compass(f2, *at, dt, -1.0))
        .fold(f64::NEG_INFINITY, f64::max);

    if cfg.three_term_starts > 0 {
        let mut rng = sample_rng(cfg.seed, 0);
        let f3 = |x: &[f64; 12]| {
            let v = three_term(&t, x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let f3_max = |x: &[f64; 12]| {
            let v = three_term(&t, x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        };
        for _ in 0..cfg.three_term_starts {
            let mut start = [0.0; 12];
            start.iter_mut().for_each(|v| *v = 2.0 * rng.random::<f64>() - 1.0);
            convex = convex.min(compass(f3, start, 0.25, 1.0));
            concave = concave.max(compass(f3_max, start, 0.25, -1.0));
        }
    }
    Ok(RoofEstimate { convex, concave })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tangle::state::{ghz_ket, partial_trace, PartySet};
    use tangle::tangles::{k_tangle_pure, GhzBlock};

    fn quick() -> RoofConfig {
        RoofConfig {
            grid: 181,
            ..RoofConfig::default()
        }
    }

    #[test]
    fn pure_state_gives_pure_tangle() {
        let psi = tangle::state::haar_sample(2, 4, 0);
        let est = convex_roof_bruteforce_with(&DensityMatrix::pure(&psi), &quick()).unwrap();
        let tau = k_tangle_pure(&psi).unwrap();
        assert!((est.convex - tau).abs() < 1e-9);
        assert!((est.concave - tau).abs() < 1e-9);
    }

    #[test]
    fn ghz_block_and_pair() {
        let block = GhzBlock {
            alpha: 0.5,
            beta: Complex64::new(0.25, 0.0),
            gamma: 0.5,
        };
        let est = convex_roof_bruteforce_with(&block.to_density(4).unwrap(), &quick()).unwrap();
        assert!((est.convex - 0.5).abs() < 1e-6);

        let one = Complex64::new(1.0, 0.0);
        let g = ghz_ket(3, one, one).unwrap();
        let ab = partial_trace(&g, PartySet::from_parties(&[0, 1])).unwrap();
        let est = convex_roof_bruteforce_with(&ab, &quick()).unwrap();
        assert!(est.convex.abs() < 1e-6);
        assert!((est.concave - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_high_rank() {
        let rho = DensityMatrix::new(vec![0, 1], tangle::linalg::Matrix::from_real_diag(&[0.25; 4])).unwrap();
        assert!(convex_roof_bruteforce(&rho).is_err());
    }
}
