//! Monte Carlo suites. Sample `i` of a run draws from its own ChaCha stream,
//! results are collected in index order and reduced sequentially, so the
//! summary depends only on `(seed, samples, n)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tangle::canonical::necessity_certificates;
use tangle::constraints::{
    achievability_lhs, marginal_triangle_margins, steiner_margin, SteinerMode,
};
use tangle::ghz::{
    invert_tangles, necessity_identity, numeric_subset_tangle, strong_monogamy_residual,
    tangle_tuple_closed_form, tangles_closed_form, Inversion,
};
use tangle::state::{haar_sample, PartySet};
use tangle::tangles::{k_to_km1_relation, marginal_roots, one_tangle, tangle_tuple};

use crate::error::{HarnessError, Result};
use crate::sampling::{random_acin, random_params, OMEGA_BRANCHES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub n: usize,
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            tolerance: 1e-9,
            n: 3,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Achievability polynomial on Haar tuples.
    Necessity,
    /// `tau_A^2 = tau_AB^2 + tau_AC^2 + t^2`.
    Ckw,
    /// `concave^2 - convex^2 = t^2` for every pair.
    Assistance,
    /// Strong monogamy on random GHZ-class parameters with `n` parties.
    StrongMonogamy,
    /// Closed forms against numerical tangles of the reconstructed ket.
    ClosedForm,
    /// Inversion round trip of `(r, phi)` at `kappa = -1`.
    Inversion,
    /// Relative gap between the achievability polynomial of the closed forms
    /// and `s1^2 s2^2 s3^2 (r^2 - 1) / D^4`.
    NecessityIdentity,
    /// Convex and concave Steiner margins on Haar tuples.
    Steiner,
    /// Triangle margins of the smallest marginal eigenvalues.
    Marginal,
    /// Odd `n` Haar kets: `tau^2 = concave^2 - convex^2` after removing a party.
    KToKm1,
    /// Perfect-square identity on random canonical forms with `omega` in {0, pi}.
    PerfectSquare,
    /// Relative error of the second difference in `x` against `-2(t^2 + y^2 + z^2)`.
    Concavity,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Necessity,
        Suite::Ckw,
        Suite::Assistance,
        Suite::StrongMonogamy,
        Suite::ClosedForm,
        Suite::Inversion,
        Suite::NecessityIdentity,
        Suite::Steiner,
        Suite::Marginal,
        Suite::KToKm1,
        Suite::PerfectSquare,
        Suite::Concavity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Necessity => "necessity",
            Suite::Ckw => "ckw",
            Suite::Assistance => "assistance",
            Suite::StrongMonogamy => "strong-monogamy",
            Suite::ClosedForm => "closed-form",
            Suite::Inversion => "inversion",
            Suite::NecessityIdentity => "necessity-identity",
            Suite::Steiner => "steiner",
            Suite::Marginal => "marginal",
            Suite::KToKm1 => "k-to-km1",
            Suite::PerfectSquare => "perfect-square",
            Suite::Concavity => "concavity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown suite '{s}'")))
    }
}

/// One evaluated sample: the inputs and a margin that is `>= -tol` when the
/// property holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub input: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub input: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub violations: usize,
    pub worst: Worst,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn from_samples(suite: &str, seed: u64, tol: f64, samples: &[Sample]) -> Self {
        let mut worst = Worst {
            input: Vec::new(),
            margin: f64::NAN,
        };
        let mut worst_key = f64::INFINITY;
        let (mut min, mut max, mut sum, mut violations) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0);
        for s in samples {
            // NaN ranks below everything so it surfaces as the worst case
            let key = if s.margin.is_nan() { f64::NEG_INFINITY } else { s.margin };
            if worst.input.is_empty() || key < worst_key {
                worst_key = key;
                worst = Worst {
                    input: s.input.clone(),
                    margin: s.margin,
                };
            }
            if !(s.margin >= -tol) {
                violations += 1;
            }
            min = min.min(s.margin);
            max = max.max(s.margin);
            sum += s.margin;
        }
        Self {
            suite: suite.to_string(),
            samples: samples.len(),
            seed,
            violations,
            worst,
            min,
            max,
            mean: if samples.is_empty() { 0.0 } else { sum / samples.len() as f64 },
        }
    }
}

/// Evaluates sample `index` of `suite`.
pub fn evaluate(suite: Suite, cfg: &SuiteConfig, index: u64) -> tangle::Result<Sample> {
    let seed = cfg.seed;
    match suite {
        Suite::Necessity => {
            let tt = tangle_tuple(&haar_sample(3, seed, index))?;
            Ok(Sample {
                input: tt.as_array().to_vec(),
                margin: achievability_lhs(tt.x, tt.y, tt.z, tt.t),
            })
        }
        Suite::Ckw => {
            let psi = haar_sample(3, seed, index);
            let tt = tangle_tuple(&psi)?;
            let mut worst: f64 = 0.0;
            let pairs = [(0, tt.z, tt.y), (1, tt.z, tt.x), (2, tt.y, tt.x)];
            for (p, a, b) in pairs {
                let one = one_tangle(&psi, p)?;
                worst = worst.max((one * one - a * a - b * b - tt.t * tt.t).abs());
            }
            Ok(Sample {
                input: tt.as_array().to_vec(),
                margin: -worst,
            })
        }
        Suite::Assistance => {
            let psi = haar_sample(3, seed, index);
            let t = tangle::tangles::three_tangle(&psi)?;
            let mut worst: f64 = 0.0;
            for pair in [[1, 2], [0, 2], [0, 1]] {
                let roots = marginal_roots(&psi, PartySet::from_parties(&pair))?;
                let gap = roots.concave.powi(2) - roots.convex.powi(2) - t * t;
                worst = worst.max(gap.abs());
            }
            Ok(Sample {
                input: vec![t],
                margin: -worst,
            })
        }
        Suite::StrongMonogamy => {
            let params = random_params(cfg.n, seed, index, false);
            let mut worst: f64 = 0.0;
            for a in 0..cfg.n {
                worst = worst.max(strong_monogamy_residual(&params, a)?.abs());
            }
            Ok(Sample {
                input: params_input(&params),
                margin: -worst,
            })
        }
        Suite::ClosedForm => {
            let params = random_params(cfg.n, seed, index, false);
            let mut worst: f64 = 0.0;
            for subset in PartySet::all_subsets(cfg.n, 2) {
                let cf = tangles_closed_form(&params, subset)?;
                let num = numeric_subset_tangle(&params, subset)?;
                worst = worst.max((cf - num).abs());
            }
            Ok(Sample {
                input: params_input(&params),
                margin: -worst,
            })
        }
        Suite::Inversion => {
            let params = random_params(3, seed, index, true);
            let tt = tangle_tuple_closed_form(&params)?;
            if tt.t <= 1e-6 {
                return Ok(Sample {
                    input: params_input(&params),
                    margin: 0.0,
                });
            }
            let back = match invert_tangles(&tt)? {
                Inversion::Feasible(p) => p,
                Inversion::Infeasible { r, .. } => {
                    return Ok(Sample {
                        input: params_input(&params),
                        margin: -(1.0 - r).abs().max(f64::MIN_POSITIVE),
                    })
                }
            };
            let mut worst = (back.r - params.r).abs();
            for (a, b) in back.phis.iter().zip(&params.phis) {
                worst = worst.max((a - b).abs());
            }
            Ok(Sample {
                input: params_input(&params),
                margin: -worst,
            })
        }
        Suite::NecessityIdentity => {
            let params = random_params(3, seed, index, true);
            let (lhs, rhs) = necessity_identity(&params)?;
            let scale = lhs.abs().max(rhs.abs());
            let rel = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
            Ok(Sample {
                input: params_input(&params),
                margin: -rel,
            })
        }
        Suite::Steiner => {
            let psi = haar_sample(3, seed, index);
            let tt = tangle_tuple(&psi)?;
            let convex = steiner_margin(tt.x, tt.y, tt.z, SteinerMode::Convex);
            let lift = |v: f64| (v * v + tt.t * tt.t).sqrt();
            let concave = steiner_margin(lift(tt.x), lift(tt.y), lift(tt.z), SteinerMode::Concave);
            Ok(Sample {
                input: tt.as_array().to_vec(),
                margin: convex.min(concave),
            })
        }
        Suite::Marginal => {
            let psi = haar_sample(3, seed, index);
            let mut lam = [0.0; 3];
            for (p, l) in lam.iter_mut().enumerate() {
                let tau = one_tangle(&psi, p)?;
                *l = 0.5 * (1.0 - (1.0 - tau * tau).max(0.0).sqrt());
            }
            Ok(Sample {
                input: lam.to_vec(),
                margin: marginal_triangle_margins(lam[0], lam[1], lam[2]).min(),
            })
        }
        Suite::KToKm1 => {
            let psi = haar_sample(cfg.n, seed, index);
            let mut worst: f64 = 0.0;
            for removed in 0..cfg.n {
                worst = worst.max(k_to_km1_relation(&psi, removed)?.residual().abs());
            }
            Ok(Sample {
                input: vec![index as f64],
                margin: -worst,
            })
        }
        Suite::PerfectSquare => {
            let omega = OMEGA_BRANCHES[(index % 2) as usize];
            let f = random_acin(seed, index, omega);
            let rep = necessity_certificates(&f);
            Ok(Sample {
                input: acin_input(&f),
                margin: -rep.square_residual().unwrap_or(f64::INFINITY),
            })
        }
        Suite::Concavity => {
            let omega = OMEGA_BRANCHES[(index % 2) as usize];
            let f = random_acin(seed, index, omega);
            Ok(Sample {
                input: acin_input(&f),
                margin: -necessity_certificates(&f).second_difference_rel_error(),
            })
        }
    }
}

fn acin_input(f: &tangle::canonical::AcinForm) -> Vec<f64> {
    f.lambdas.iter().copied().chain([f.omega]).collect()
}

fn params_input(p: &tangle::ghz::GhzClassParams) -> Vec<f64> {
    let mut v = vec![p.r, p.kappa];
    v.extend(&p.phis);
    v
}

/// Runs `samples` evaluations on `workers` threads.
pub fn run_samples(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Sample>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    let out: tangle::Result<Vec<Sample>> = pool.install(|| {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| evaluate(suite, cfg, i))
            .collect()
    });
    Ok(out?)
}

pub fn mc_suite(cfg: &SuiteConfig, suite: Suite) -> Result<Summary> {
    validate(cfg, suite)?;
    let samples = run_samples(suite, cfg)?;
    Ok(Summary::from_samples(suite.name(), cfg.seed, cfg.tolerance, &samples))
}

fn validate(cfg: &SuiteConfig, suite: Suite) -> Result<()> {
    match suite {
        Suite::StrongMonogamy | Suite::ClosedForm if !(2..=6).contains(&cfg.n) => {
            Err(HarnessError::Usage(format!("{suite} needs 2 <= n <= 6, got {}", cfg.n)))
        }
        Suite::KToKm1 if !(cfg.n == 3 || cfg.n == 5) => {
            Err(HarnessError::Usage(format!("{suite} needs n = 3 or 5, got {}", cfg.n)))
        }
        _ if cfg.tolerance < 0.0 || !cfg.tolerance.is_finite() => {
            Err(HarnessError::Usage("tolerance must be a non-negative number".into()))
        }
        _ => Ok(()),
    }
}
