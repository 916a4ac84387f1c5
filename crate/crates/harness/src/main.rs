use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use tangle::constraints::Constraint;
use tangle::ghz::GhzClassParams;
use tangle::tangles::{GhzBlock, TangleTuple};
use tangle::Ket;
use tangle_harness::commands::{self, RoofInput, Status};
use tangle_harness::roof::RoofConfig;
use tangle_harness::sampling::{random_acin, random_params};
use tangle_harness::suites::{mc_suite, Suite, SuiteConfig};
use tangle_harness::surface::{write_surface, Axis, GridSpec, FIG1_SLICES};
use tangle_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "tanglectl", version, about = "Multipartite qubit tangles, GHZ-class closed forms and constraint checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// All subset tangles and 1-tangles of a ket JSON file ("-" for stdin).
    Tangles { state: String },
    /// Closed-form tangles of a GHZ-class parameter file.
    Ghz {
        params: String,
        /// Also print the reconstructed ket.
        #[arg(long)]
        ket: bool,
    },
    /// Feasibility of a tuple (tau_BC, tau_AC, tau_AB, t).
    Check {
        #[arg(allow_negative_numbers = true)]
        tuple: Vec<f64>,
    },
    /// Canonical GHZ-class parameters realizing a tuple.
    Invert {
        #[arg(allow_negative_numbers = true)]
        tuple: Vec<f64>,
    },
    /// Print random states as JSON lines.
    Sample {
        #[arg(long, default_value = "haar")]
        kind: SampleKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// CSV of a constraint field on a grid.
    Surface {
        constraint: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        hi: f64,
        /// Comma-separated signed t^2 slices; defaults to the figure slices.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t2: Vec<f64>,
    },
    /// Run a Monte Carlo suite and print its summary.
    Monogamy {
        suite: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Brute-force convex and concave roofs of a rank <= 2 state.
    Roof {
        /// Ket file whose marginal is used (with --keep).
        #[arg(long)]
        state: Option<String>,
        /// Parties to keep, e.g. AB.
        #[arg(long)]
        keep: Option<String>,
        /// GHZ block "alpha,beta_re,beta_im,gamma".
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        block: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 721)]
        grid: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SampleKind {
    Haar,
    Ghz,
    Acin,
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn tuple_of(v: &[f64]) -> Result<TangleTuple> {
    match v {
        [x, y, z, t] => Ok(TangleTuple::new(*x, *y, *z, *t)),
        _ => Err(HarnessError::Usage(format!("expected 4 numbers, got {}", v.len()))),
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<Status> {
    let g = cli.global;
    match cli.cmd {
        Cmd::Tangles { state } => {
            let psi = Ket::from_json(&read_input(&state)?)?;
            print_json(&commands::tangles_report(&psi)?)?;
            Ok(Status::Ok)
        }
        Cmd::Ghz { params, ket } => {
            let p = GhzClassParams::from_json(&read_input(&params)?)?;
            print_json(&commands::ghz_report(&p, ket)?)?;
            Ok(Status::Ok)
        }
        Cmd::Check { tuple } => {
            let (v, s) = commands::check_report(&tuple_of(&tuple)?, g.tol);
            print_json(&v)?;
            Ok(s)
        }
        Cmd::Invert { tuple } => {
            let (v, s) = commands::invert_report(&tuple_of(&tuple)?)?;
            print_json(&v)?;
            Ok(s)
        }
        Cmd::Sample { kind, n } => {
            let mut out = io::stdout().lock();
            for i in 0..g.samples as u64 {
                let line = match kind {
                    SampleKind::Haar => tangle::state::haar_sample(n, g.seed, i).to_json(),
                    SampleKind::Ghz => random_params(n, g.seed, i, false).to_json(),
                    SampleKind::Acin => random_acin(g.seed, i, tangle_harness::sampling::OMEGA_BRANCHES[(i % 2) as usize]).to_json(),
                };
                writeln!(out, "{line}")?;
            }
            Ok(Status::Ok)
        }
        Cmd::Surface { constraint, steps, lo, hi, t2 } => {
            let c: Constraint = constraint.parse().map_err(|_| HarnessError::Usage(format!("unknown constraint '{constraint}'")))?;
            let slices = if t2.is_empty() { FIG1_SLICES.to_vec() } else { t2 };
            let grid = GridSpec::cube(Axis::new(lo, hi, steps), slices);
            let mut out = io::BufWriter::new(io::stdout().lock());
            write_surface(&grid, c, &mut out)?;
            out.flush()?;
            Ok(Status::Ok)
        }
        Cmd::Monogamy { suite, n } => {
            let suite: Suite = suite.parse()?;
            let cfg = SuiteConfig {
                seed: g.seed,
                samples: g.samples,
                tolerance: g.tol,
                n,
                workers: g.workers,
            };
            let summary = mc_suite(&cfg, suite)?;
            print_json(&serde_json::to_value(&summary).map_err(io::Error::from)?)?;
            Ok(if summary.passed() { Status::Ok } else { Status::Violation })
        }
        Cmd::Roof { state, keep, block, k, grid } => {
            let input = match (state, block.as_slice()) {
                (Some(path), []) => {
                    let psi = Ket::from_json(&read_input(&path)?)?;
                    let keep = keep.ok_or_else(|| HarnessError::Usage("--state needs --keep".into()))?;
                    let parties = commands::parse_parties(&keep, psi.n())?;
                    RoofInput::Marginal(psi, parties)
                }
                (None, [alpha, re, im, gamma]) => RoofInput::Block {
                    block: GhzBlock {
                        alpha: *alpha,
                        beta: tangle::Complex64::new(*re, *im),
                        gamma: *gamma,
                    },
                    k,
                },
                _ => return Err(HarnessError::Usage("give either --state/--keep or --block a,re,im,g".into())),
            };
            let cfg = RoofConfig {
                grid,
                seed: g.seed,
                ..RoofConfig::default()
            };
            print_json(&commands::roof_report(&input, &cfg)?)?;
            Ok(Status::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(s) => ExitCode::from(s.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
