//! Semi-algebraic constraints on three-qubit tangles and marginal spectra.
//!
//! Every evaluator returns a signed margin (`>= 0` means satisfied) and leaves
//! tolerances to the caller. Polynomials in `t` take the signed square `t2`
//! where the surface code needs negative values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `t2 (1 - x^2 - y^2 - z^2 - t2) - (x^2 y^2 + x^2 z^2 + y^2 z^2 - 2xyz)`.
pub fn achievability_lhs_t2(x: f64, y: f64, z: f64, t2: f64) -> f64 {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    t2 * (1.0 - x2 - y2 - z2 - t2) - (x2 * y2 + x2 * z2 + y2 * z2 - 2.0 * x * y * z)
}

/// Achievability polynomial of `(x, y, z, t)`; non-negative exactly on tuples
/// realized by some three-qubit pure state.
pub fn achievability_lhs(x: f64, y: f64, z: f64, t: f64) -> f64 {
    achievability_lhs_t2(x, y, z, t * t)
}

fn steiner_product(x: f64, y: f64, z: f64) -> f64 {
    (1.0 + x + y + z) * (1.0 + x - y - z) * (1.0 - x + y - z) * (1.0 - x - y + z)
}

/// Completed-square form; identically `4 * achievability_lhs_t2`.
pub fn completed_square_margin_t2(x: f64, y: f64, z: f64, t2: f64) -> f64 {
    steiner_product(x, y, z) - (1.0 - 2.0 * t2 - x * x - y * y - z * z).powi(2)
}

pub fn completed_square_margin(x: f64, y: f64, z: f64, t: f64) -> f64 {
    completed_square_margin_t2(x, y, z, t * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteinerMode {
    Convex,
    Concave,
}

/// `sqrt(prod) +/- (1 - x^2 - y^2 - z^2)`, `+` for convex-roof triples and `-`
/// for assistance triples. A radicand below `-1e-12` is outside the domain and
/// yields `-inf`.
pub fn steiner_margin(x: f64, y: f64, z: f64, mode: SteinerMode) -> f64 {
    let prod = steiner_product(x, y, z);
    if prod < -1e-12 {
        return f64::NEG_INFINITY;
    }
    let root = prod.max(0.0).sqrt();
    let q = 1.0 - x * x - y * y - z * z;
    match mode {
        SteinerMode::Convex => root + q,
        SteinerMode::Concave => root - q,
    }
}

/// Image of the achievability polynomial under `t -> i t`:
/// `-t^2 (1 - x^2 - y^2 - z^2 + t^2) - (x^2 y^2 + x^2 z^2 + y^2 z^2 - 2xyz)`.
pub fn assistance_boundary(x: f64, y: f64, z: f64, t: f64) -> f64 {
    achievability_lhs_t2(x, y, z, -t * t)
}

/// Smallest eigenvalue of `rho_A` from `tau_AB`, `tau_AC` and `t`.
pub fn eigenvalue_from_tangles(tau_ab: f64, tau_ac: f64, t: f64) -> Result<f64> {
    let rad = 1.0 - tau_ab * tau_ab - tau_ac * tau_ac - t * t;
    if rad < -tol_inconsistent() {
        return Err(Error::InconsistentTangles(rad));
    }
    Ok(0.5 * (1.0 - rad.max(0.0).sqrt()))
}

fn tol_inconsistent() -> f64 {
    1e-9
}

fn pair_radicand(la: f64, lb: f64, lc: f64, t: f64) -> f64 {
    let g = |l: f64| 2.0 * l * (1.0 - l);
    g(la) + g(lb) - g(lc) - t * t / 2.0
}

/// Squared pair tangles `(tau_AB^2, tau_AC^2, tau_BC^2)` as polynomials in the
/// eigenvalues; negative entries mean incompatible input.
pub fn pair_tangles_squared(la: f64, lb: f64, lc: f64, t: f64) -> (f64, f64, f64) {
    (
        pair_radicand(la, lb, lc, t),
        pair_radicand(la, lc, lb, t),
        pair_radicand(lb, lc, la, t),
    )
}

/// `(tau_AB, tau_AC, tau_BC)` from the smallest marginal eigenvalues and `t`.
pub fn tangles_from_eigenvalues(la: f64, lb: f64, lc: f64, t: f64) -> Result<(f64, f64, f64)> {
    let (ab, ac, bc) = pair_tangles_squared(la, lb, lc, t);
    for r in [ab, ac, bc] {
        if r < -1e-12 {
            return Err(Error::IncompatibleMarginals(r));
        }
    }
    Ok((ab.max(0.0).sqrt(), ac.max(0.0).sqrt(), bc.max(0.0).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleMargins {
    /// `(lb + lc - la, la + lc - lb, la + lb - lc)`.
    pub margins: [f64; 3],
    /// `(la - lb - lc)(-la + lb - lc)(-la - lb + lc)` as printed; negative at GHZ.
    pub literal_product: f64,
}

impl TriangleMargins {
    pub fn min(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn marginal_triangle_margins(la: f64, lb: f64, lc: f64) -> TriangleMargins {
    TriangleMargins {
        margins: [lb + lc - la, la + lc - lb, la + lb - lc],
        literal_product: (la - lb - lc) * (-la + lb - lc) * (-la - lb + lc),
    }
}

/// `(p1, p2)`, the two factors of the squared eigenvalue boundary.
pub fn boundary_factors(la: f64, lb: f64, lc: f64, t: f64) -> (f64, f64) {
    let t4 = t.powi(4);
    let p1 = t4
        + 16.0
            * (1.0 + la - lb - lc)
            * (1.0 - la + lb - lc)
            * (1.0 - la - lb + lc)
            * (1.0 - la - lb - lc);
    let p2 = t4 + 16.0 * (la - lb - lc) * (-la + lb - lc) * (-la - lb + lc) * (2.0 - la - lb - lc);
    (p1, p2)
}

/// The achievability boundary in eigenvalue coordinates with the root
/// squared away: with `A, B, C` the squared pair tangles and `Q` the
/// achievability polynomial without its `xyz` term, returns `Q^2 - 4ABC`.
/// Equals `p1 p2 / 16`.
pub fn eigenvalue_boundary_squared(la: f64, lb: f64, lc: f64, t: f64) -> f64 {
    let (a, b, c) = pair_tangles_squared(la, lb, lc, t);
    let t2 = t * t;
    let q = t2 * (1.0 - a - b - c - t2) - (a * b + a * c + b * c);
    q * q - 4.0 * a * b * c
}

/// Scalar fields available for surface export.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    Achievability,
    CompletedSquare,
    Assistance,
    SteinerNull,
    SteinerConvex,
    SteinerConcave,
    /// `(x, y, z)` read as one-tangles; minimum triangle margin of the
    /// derived eigenvalues.
    OneTangle,
}

impl Constraint {
    pub const ALL: [Constraint; 7] = [
        Constraint::Achievability,
        Constraint::CompletedSquare,
        Constraint::Assistance,
        Constraint::SteinerNull,
        Constraint::SteinerConvex,
        Constraint::SteinerConcave,
        Constraint::OneTangle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Achievability => "achievability",
            Constraint::CompletedSquare => "completed-square",
            Constraint::Assistance => "assistance",
            Constraint::SteinerNull => "steiner-null",
            Constraint::SteinerConvex => "steiner-convex",
            Constraint::SteinerConcave => "steiner-concave",
            Constraint::OneTangle => "one-tangle",
        }
    }

    /// Margin at `(x, y, z)` with signed `t2` (ignored by the `t`-free fields).
    pub fn evaluate(self, x: f64, y: f64, z: f64, t2: f64) -> f64 {
        match self {
            Constraint::Achievability => achievability_lhs_t2(x, y, z, t2),
            Constraint::CompletedSquare => completed_square_margin_t2(x, y, z, t2),
            // signed t2 here is already the rotated square
            Constraint::Assistance => achievability_lhs_t2(x, y, z, -t2),
            Constraint::SteinerNull => completed_square_margin_t2(x, y, z, 0.0),
            Constraint::SteinerConvex => steiner_margin(x, y, z, SteinerMode::Convex),
            Constraint::SteinerConcave => steiner_margin(x, y, z, SteinerMode::Concave),
            Constraint::OneTangle => {
                let lam = |tau: f64| 0.5 * (1.0 - (1.0 - tau * tau).max(0.0).sqrt());
                if [x, y, z].iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return f64::NEG_INFINITY;
                }
                marginal_triangle_margins(lam(x), lam(y), lam(z)).min()
            }
        }
    }

    pub fn verdict(self, x: f64, y: f64, z: f64, t2: f64) -> ConstraintVerdict {
        ConstraintVerdict {
            name: self.name().to_string(),
            margin: self.evaluate(x, y, z, t2),
            inputs: vec![x, y, z, t2],
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Constraint::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown constraint '{s}'")))
    }
}

/// A margin with the inputs that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintVerdict {
    pub name: String,
    pub margin: f64,
    pub inputs: Vec<f64>,
}

impl ConstraintVerdict {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn achievability_examples() {
        assert_eq!(achievability_lhs(0.0, 0.0, 0.0, 1.0), 0.0);
        let w = 2.0 / 3.0;
        assert!(achievability_lhs(w, w, w, 0.0).abs() < 1e-15);
        assert_eq!(achievability_lhs(1.0, 1.0, 0.0, 0.0), -1.0);
    }

    #[test]
    fn completed_square_examples() {
        assert_eq!(completed_square_margin(0.0, 0.0, 0.0, 1.0), 0.0);
        let h = 0.5;
        let d = completed_square_margin(h, h, h, h) - 4.0 * achievability_lhs(h, h, h, h);
        assert!(d.abs() < 1e-12);
        let w = 2.0 / 3.0;
        assert!(completed_square_margin(w, w, w, 0.0).abs() < 1e-15);
    }

    #[test]
    fn steiner_examples() {
        let w = 2.0 / 3.0;
        assert!(steiner_margin(w, w, w, SteinerMode::Convex).abs() < 1e-15);
        assert_eq!(steiner_margin(1.0, 1.0, 1.0, SteinerMode::Concave), 2.0);
        assert_eq!(steiner_margin(1.0, 1.0, 1.0, SteinerMode::Convex), -2.0);
        assert_eq!(steiner_margin(1.0, 1.0, -1.0, SteinerMode::Convex), f64::NEG_INFINITY);
    }

    #[test]
    fn assistance_boundary_examples() {
        assert_eq!(assistance_boundary(1.0, 1.0, 1.0, 1.0), 0.0);
        let (x, y, z) = (0.3, 0.5, 0.1);
        assert_eq!(assistance_boundary(x, y, z, 0.0), achievability_lhs(x, y, z, 0.0));
        assert_eq!(assistance_boundary(0.0, 0.0, 0.0, 1.0), -2.0);
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue_from_tangles(0.0, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(eigenvalue_from_tangles(0.0, 0.0, 0.0).unwrap(), 0.0);
        let w = 2.0 / 3.0;
        assert!((eigenvalue_from_tangles(w, w, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(eigenvalue_from_tangles(1.0, 1.0, 0.0), Err(Error::InconsistentTangles(_))));
    }

    #[test]
    fn tangles_from_eigenvalue_examples() {
        assert_eq!(tangles_from_eigenvalues(0.5, 0.5, 0.5, 1.0).unwrap(), (0.0, 0.0, 0.0));
        let (a, b, c) = tangles_from_eigenvalues(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0).unwrap();
        for v in [a, b, c] {
            assert!((v - 2.0 / 3.0).abs() < 1e-15);
        }
        assert!(matches!(
            tangles_from_eigenvalues(0.5, 0.0, 0.0, 0.0),
            Err(Error::IncompatibleMarginals(_))
        ));
    }

    #[test]
    fn triangle_examples() {
        let g = marginal_triangle_margins(0.5, 0.5, 0.5);
        assert_eq!(g.margins, [0.5; 3]);
        assert_eq!(g.literal_product, -0.125);
        assert_eq!(marginal_triangle_margins(0.5, 0.0, 0.0).margins[0], -0.5);
        let t = 1.0 / 3.0;
        let w = marginal_triangle_margins(t, t, t);
        assert!(w.margins.iter().all(|m| (m - t).abs() < 1e-15));
    }

    #[test]
    fn boundary_factor_examples() {
        assert_eq!(boundary_factors(0.5, 0.5, 0.5, 1.0), (0.0, 0.0));
        assert_eq!(boundary_factors(0.0, 0.0, 0.0, 0.0), (16.0, 0.0));
        let t = 1.0 / 3.0;
        let (_, p2) = boundary_factors(t, t, t, 0.0);
        let want = 16.0 * (-t).powi(3) * (2.0 - 1.0);
        assert!((p2 - want).abs() < 1e-14);
    }

    #[test]
    fn squared_boundary_is_sixteenth_of_factors() {
        let pts = [(0.1, 0.2, 0.3, 0.4), (0.45, 0.05, 0.3, 0.7), (0.2, 0.2, 0.1, 0.05)];
        for (a, b, c, t) in pts {
            let (p1, p2) = boundary_factors(a, b, c, t);
            let lhs = eigenvalue_boundary_squared(a, b, c, t);
            assert!((lhs - p1 * p2 / 16.0).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn constraint_names_round_trip() {
        for c in Constraint::ALL {
            assert_eq!(c.name().parse::<Constraint>().unwrap(), c);
        }
        assert!("eq4".parse::<Constraint>().is_err());
        let w = 2.0 / 3.0;
        assert!(Constraint::SteinerConvex.evaluate(w, w, w, 0.0).abs() < 1e-15);
    }
}
