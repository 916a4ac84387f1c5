//! CSV export of constraint fields on regular grids.

use std::io::Write;

use serde::{Deserialize, Serialize};
use tangle::constraints::Constraint;

use crate::error::{HarnessError, Result};

pub const HEADER: &str = "x,y,z,t2,margin";

/// Signed `t^2` slices of the achievability surface.
pub const FIG1_SLICES: [f64; 6] = [0.98, 0.64, 0.09, 0.0, -0.01, -0.25];

/// The three pairwise-tangle surfaces.
pub const STEINER_VARIANTS: [Constraint; 3] = [
    Constraint::SteinerNull,
    Constraint::SteinerConvex,
    Constraint::SteinerConcave,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self { lo, hi, steps }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    pub z: Axis,
    pub t2: Vec<f64>,
}

impl GridSpec {
    /// Same axis for x, y and z.
    pub fn cube(axis: Axis, t2: Vec<f64>) -> Self {
        Self {
            x: axis,
            y: axis,
            z: axis,
            t2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("x", self.x), ("y", self.y), ("z", self.z)] {
            if a.steps < 2 {
                return Err(HarnessError::Usage(format!("{name} axis needs at least 2 steps")));
            }
            if !(-1.0..=1.0).contains(&a.lo) || !(-1.0..=1.0).contains(&a.hi) || a.lo >= a.hi {
                return Err(HarnessError::Usage(format!("{name} range [{}, {}] outside [-1, 1]", a.lo, a.hi)));
            }
        }
        if self.t2.is_empty() {
            return Err(HarnessError::Usage("no t2 slices".into()));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.x.steps * self.y.steps * self.z.steps * self.t2.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStats {
    pub rows: usize,
    /// Rows with margin `>= 0`.
    pub feasible: usize,
}

/// Writes the header and one row per grid point, slices outermost.
pub fn write_surface<W: Write>(grid: &GridSpec, constraint: Constraint, out: &mut W) -> Result<SurfaceStats> {
    grid.validate()?;
    writeln!(out, "{HEADER}")?;
    let mut stats = SurfaceStats::default();
    for &t2 in &grid.t2 {
        for i in 0..grid.x.steps {
            let x = grid.x.value(i);
            for j in 0..grid.y.steps {
                let y = grid.y.value(j);
                for k in 0..grid.z.steps {
                    let z = grid.z.value(k);
                    let m = constraint.evaluate(x, y, z, t2);
                    writeln!(out, "{x},{y},{z},{t2},{m}")?;
                    stats.rows += 1;
                    if m >= 0.0 {
                        stats.feasible += 1;
                    }
                }
            }
        }
    }
    Ok(stats)
}
