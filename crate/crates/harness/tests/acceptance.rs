//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use tangle::constraints::{
    achievability_lhs, boundary_factors, marginal_triangle_margins, steiner_margin, Constraint, SteinerMode,
};
use tangle::ghz::{invert_tangles, reconstruct_ket, Inversion};
use tangle::state::{ghz_ket, sample_rng};
use tangle::tangles::{one_tangle, tangle_tuple, three_tangle, GhzBlock, TangleTuple};
use tangle::{Complex64, Ket};
use tangle_harness::roof::convex_roof_bruteforce;
use tangle_harness::suites::{mc_suite, Suite, SuiteConfig};
use tangle_harness::surface::{write_surface, Axis, GridSpec, FIG1_SLICES, HEADER, STEINER_VARIANTS};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn suite(suite: Suite, samples: usize, tol: f64, n: usize) -> (bool, f64) {
    let cfg = SuiteConfig {
        seed: 2024,
        samples,
        tolerance: tol,
        n,
        workers: 1,
    };
    let s = mc_suite(&cfg, suite).expect("suite runs");
    (s.passed(), s.min)
}

fn parallel_suite(s: Suite, samples: usize, tol: f64, n: usize) -> (bool, f64) {
    let cfg = SuiteConfig {
        seed: 2024,
        samples,
        tolerance: tol,
        n,
        workers: std::thread::available_parallelism().map_or(1, |v| v.get()),
    };
    let s = mc_suite(&cfg, s).expect("suite runs");
    (s.passed(), s.min)
}

fn necessity() -> Outcome {
    let start = Instant::now();
    let (ok, min) = suite(Suite::Necessity, 100_000, 1e-9, 3);
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 60.0, format!("min margin {min:.3e}, {secs:.1}s single-threaded"))
}

fn sufficiency() -> Outcome {
    let steps = 20;
    let v = |i: usize| i as f64 / (steps - 1) as f64;
    let (mut checked, mut failures, mut worst) = (0, 0, 0.0f64);
    for a in 0..steps {
        for b in 0..steps {
            for c in 0..steps {
                for d in 0..steps {
                    let tt = TangleTuple::new(v(a), v(b), v(c), v(d));
                    if tt.t <= 1e-3 || achievability_lhs(tt.x, tt.y, tt.z, tt.t) < 1e-6 {
                        continue;
                    }
                    checked += 1;
                    let ok = match invert_tangles(&tt) {
                        Ok(Inversion::Feasible(p)) if p.r >= 1.0 - 1e-9 => {
                            match reconstruct_ket(&p).and_then(|k| tangle_tuple(&k)) {
                                Ok(back) => {
                                    let err = back.max_abs_diff(&tt);
                                    worst = worst.max(err);
                                    err <= 1e-7
                                }
                                Err(_) => false,
                            }
                        }
                        _ => false,
                    };
                    if !ok {
                        failures += 1;
                    }
                }
            }
        }
    }
    outcome(
        failures == 0 && checked > 0,
        format!("{checked} interior tuples, {failures} failures, worst tangle error {worst:.2e}"),
    )
}

fn ckw_and_assistance() -> Outcome {
    let (a, ma) = parallel_suite(Suite::Ckw, 10_000, 1e-8, 3);
    let (b, mb) = parallel_suite(Suite::Assistance, 10_000, 1e-8, 3);
    outcome(a && b, format!("max residual ckw {:.2e}, assistance {:.2e}", -ma, -mb))
}

fn closed_forms() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [3, 4, 5] {
        let (p, m) = parallel_suite(Suite::ClosedForm, 1000, 1e-9, n);
        ok &= p;
        detail.push(format!("n={n}: {:.2e}", -m));
    }
    outcome(ok, format!("max subset error {}", detail.join(", ")))
}

fn strong_monogamy() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 3..=6 {
        let (p, m) = suite(Suite::StrongMonogamy, 1000, 1e-9, n);
        ok &= p;
        detail.push(format!("n={n}: {:.2e}", -m));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 120.0, format!("max residual {}, {secs:.1}s", detail.join(", ")))
}

fn inversion() -> Outcome {
    let (a, ma) = parallel_suite(Suite::Inversion, 10_000, 1e-7, 3);
    let (b, mb) = parallel_suite(Suite::NecessityIdentity, 10_000, 1e-9, 3);
    outcome(a && b, format!("max (r, phi) error {:.2e}, identity rel gap {:.2e}", -ma, -mb))
}

fn steiner() -> Outcome {
    let (ok, min) = parallel_suite(Suite::Steiner, 10_000, 1e-8, 3);
    let w = 2.0 / 3.0;
    let conv = steiner_margin(w, w, w, SteinerMode::Convex);
    let conc = steiner_margin(1.0, 1.0, 1.0, SteinerMode::Concave);
    let points = conv.abs() <= 1e-12 && (conc - 2.0).abs() <= 1e-12;
    outcome(
        ok && points,
        format!("min margin {min:.2e}; convex(W) = {conv:e}, concave(1,1,1) = {conc}"),
    )
}

fn marginals() -> Outcome {
    let (ok, min) = parallel_suite(Suite::Marginal, 10_000, 1e-9, 3);
    let lit = marginal_triangle_margins(0.5, 0.5, 0.5).literal_product;
    let (p1, p2) = boundary_factors(0.5, 0.5, 0.5, 1.0);
    let pass = ok && (lit + 0.125).abs() <= 1e-12 && p1.abs() <= 1e-12 && p2.abs() <= 1e-12;
    outcome(pass, format!("min triangle margin {min:.2e}; literal product {lit}; p1 = {p1:e}, p2 = {p2:e}"))
}

fn fixed_points() -> Outcome {
    let a = 1.0 / 3f64.sqrt();
    let w = Ket::from_real(3, &[0.0, a, a, 0.0, a, 0.0, 0.0, 0.0]).unwrap();
    let tt = tangle_tuple(&w).unwrap();
    let want = TangleTuple::new(2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 0.0);
    let mut err = tt.max_abs_diff(&want);
    for p in 0..3 {
        err = err.max((one_tangle(&w, p).unwrap() - 2.0 * 2f64.sqrt() / 3.0).abs());
    }
    let mut ghz_err: f64 = 0.0;
    let mut rng = sample_rng(9, 0);
    for _ in 0..100 {
        let th = rng.random::<f64>() * PI / 2.0;
        let (pa, pb) = (rng.random::<f64>() * 2.0 * PI, rng.random::<f64>() * 2.0 * PI);
        let (ca, cb) = (Complex64::from_polar(th.cos(), pa), Complex64::from_polar(th.sin(), pb));
        let t = three_tangle(&ghz_ket(3, ca, cb).unwrap()).unwrap();
        ghz_err = ghz_err.max((t - 2.0 * (ca * cb).norm()).abs());
    }
    outcome(err <= 1e-12 && ghz_err <= 1e-12, format!("W error {err:.1e}, generalized GHZ error {ghz_err:.1e}"))
}

fn k_to_km1() -> Outcome {
    let (a, ma) = parallel_suite(Suite::KToKm1, 1000, 1e-8, 3);
    let (b, mb) = parallel_suite(Suite::KToKm1, 1000, 1e-8, 5);
    outcome(a && b, format!("max residual k=3 {:.2e}, k=5 {:.2e}", -ma, -mb))
}

fn roof_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for k in [2, 4] {
        for i in 0..100 {
            let mut rng = sample_rng(77 + k as u64, i);
            let alpha = rng.random::<f64>();
            let gamma = 1.0 - alpha;
            let beta = Complex64::from_polar(rng.random::<f64>() * (alpha * gamma).sqrt(), rng.random::<f64>() * 2.0 * PI);
            let block = GhzBlock { alpha, beta, gamma };
            match convex_roof_bruteforce(&block.to_density(k).unwrap()) {
                Ok(est) => {
                    let err = (est.convex - 2.0 * beta.norm()).abs();
                    worst = worst.max(err);
                    if err > 1e-6 {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    outcome(failures == 0, format!("200 blocks (k = 2, 4), {failures} failures, worst {worst:.2e}"))
}

fn figures() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("figures");
    fs::create_dir_all(&dir).unwrap();
    let mut problems = Vec::new();
    let mut emit = |name: String, grid: GridSpec, c: Constraint| {
        let mut buf = Vec::new();
        let stats = write_surface(&grid, c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        if text.lines().next() != Some(HEADER) || stats.rows != grid.rows() {
            problems.push(format!("{name}: schema"));
        }
        if stats.feasible == 0 {
            problems.push(format!("{name}: empty feasible region"));
        }
        fs::write(dir.join(format!("{name}.csv")), text).unwrap();
    };
    let unit = Axis::new(0.0, 1.0, 41);
    for t2 in FIG1_SLICES {
        emit(format!("achievability_t2_{t2}"), GridSpec::cube(unit, vec![t2]), Constraint::Achievability);
    }
    for c in STEINER_VARIANTS {
        emit(c.name().to_string(), GridSpec::cube(unit, vec![0.0]), c);
    }
    emit("one-tangle".into(), GridSpec::cube(unit, vec![0.0]), Constraint::OneTangle);

    let w = 2.0 / 3.0;
    let zeros = [
        ("achievability at W", Constraint::Achievability.evaluate(w, w, w, 0.0)),
        ("steiner-null at W", Constraint::SteinerNull.evaluate(w, w, w, 0.0)),
        ("steiner-convex at W", Constraint::SteinerConvex.evaluate(w, w, w, 0.0)),
        ("assistance at GHZ", Constraint::Assistance.evaluate(1.0, 1.0, 1.0, 1.0)),
    ];
    for (name, m) in zeros {
        if m.abs() > 1e-6 {
            problems.push(format!("{name}: margin {m:e}"));
        }
    }
    let detail = if problems.is_empty() {
        format!("10 fields written to {}", dir.display())
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn certificates() -> Outcome {
    // even indices use omega = 0, odd use omega = pi
    let (a, ma) = parallel_suite(Suite::PerfectSquare, 2000, 1e-9, 3);
    let (b, mb) = parallel_suite(Suite::Concavity, 2000, 1e-6, 3);
    outcome(a && b, format!("max square residual {:.2e}, second-difference rel error {:.2e}", -ma, -mb))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("necessity of the achievability inequality", necessity),
        ("sufficiency of the achievability inequality", sufficiency),
        ("CKW and assistance identities", ckw_and_assistance),
        ("GHZ-class closed forms", closed_forms),
        ("strong monogamy on the GHZ class", strong_monogamy),
        ("inversion round trip and necessity identity", inversion),
        ("Steiner margins", steiner),
        ("marginal eigenvalue inequalities", marginals),
        ("fixed-point values", fixed_points),
        ("k to k-1 relation", k_to_km1),
        ("closed formula vs brute-force roof", roof_oracle),
        ("figure regeneration", figures),
        ("perfect-square certificates", certificates),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
