//! Three-qubit canonical form under local unitaries.
//!
//! Every three-qubit ket is locally unitarily equivalent to
//! `l0|000> + l1 e^{iw}|100> + l2|101> + l3|110> + l4|111>` with `li >= 0`.
//! The construction rotates party A so that the `A = 0` slice becomes rank
//! one, diagonalizes that slice on B and C, and spends the remaining diagonal
//! phases to make four of the five coefficients real.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constraints::achievability_lhs;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, Matrix};
use crate::state::{apply_local, Ket, LocalOperator};
use crate::tangles::TangleTuple;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const TINY: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcinForm {
    pub lambdas: [f64; 5],
    pub omega: f64,
}

impl AcinForm {
    /// Validates `li >= 0`, unit norm within `1e-10` and reduces `omega` to
    /// `[0, 2 pi)`.
    pub fn new(lambdas: [f64; 5], omega: f64) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) || !omega.is_finite() {
            return Err(Error::InvalidState(format!("invalid coefficients {lambdas:?}")));
        }
        let norm: f64 = lambdas.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("squared norm {norm}")));
        }
        Ok(Self {
            lambdas,
            omega: omega.rem_euclid(TAU),
        })
    }

    /// Amplitudes `(l0, 0, 0, 0, l1 e^{iw}, l2, l3, l4)`.
    pub fn ket(&self) -> Ket {
        let [l0, l1, l2, l3, l4] = self.lambdas;
        let amps = vec![
            Complex64::new(l0, 0.0),
            ZERO,
            ZERO,
            ZERO,
            Complex64::from_polar(l1, self.omega),
            Complex64::new(l2, 0.0),
            Complex64::new(l3, 0.0),
            Complex64::new(l4, 0.0),
        ];
        Ket::new(3, amps).expect("eight amplitudes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(f.lambdas, f.omega)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("form serializes")
    }
}

/// Canonical form together with the local unitaries `(U_A, U_B, U_C)` that
/// take the input onto it.
#[derive(Clone, Debug, PartialEq)]
pub struct Canonicalization {
    pub form: AcinForm,
    pub unitaries: [LocalOperator; 3],
    /// Largest deviation of `U_A (x) U_B (x) U_C |psi>` from the realized form.
    pub residual: f64,
}

fn slices(psi: &Ket) -> [[[Complex64; 2]; 2]; 2] {
    let a = psi.amplitudes();
    let mut t = [[[ZERO; 2]; 2]; 2];
    for (idx, amp) in a.iter().enumerate() {
        t[idx >> 2][(idx >> 1) & 1][idx & 1] = *amp;
    }
    t
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn combine(a: Complex64, t0: &[[Complex64; 2]; 2], b: Complex64, t1: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a * t0[i][j] + b * t1[i][j];
        }
    }
    out
}

fn fro(m: &[[Complex64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit `(a, b)` with `det(a T0 + b T1) = 0` that maximizes `|a T0 + b T1|`;
/// ties go to the larger `|a|`.
fn rotation_of_a(t0: &[[Complex64; 2]; 2], t1: &[[Complex64; 2]; 2]) -> (Complex64, Complex64) {
    let qa = det2(t1);
    let qc = det2(t0);
    let sum = combine(Complex64::new(1.0, 0.0), t0, Complex64::new(1.0, 0.0), t1);
    let qb = det2(&sum) - qa - qc;
    let scale = fro(t0).max(fro(t1)).powi(2).max(f64::MIN_POSITIVE);

    let mut candidates: Vec<(Complex64, Complex64)> = Vec::new();
    if qa.norm().max(qb.norm()).max(qc.norm()) > TINY * scale {
        let mut sd = (qb * qb - 4.0 * qa * qc).sqrt();
        if (qb.conj() * sd).re < 0.0 {
            sd = -sd;
        }
        let q = -0.5 * (qb + sd);
        // z = q / qa and z = qc / q, stored as (a, b) with z = b / a
        for (a, b) in [(qa, q), (q, qc)] {
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if n > TINY * scale {
                candidates.push((a / n, b / n));
            }
        }
    }
    if candidates.is_empty() {
        // det(a T0 + b T1) vanishes identically: take the dominant direction
        let ts = [t0, t1];
        let m = Matrix::from_fn(2, 2, |i, j| {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    acc += ts[i][k][l] * ts[j][k][l].conj();
                }
            }
            acc
        });
        let eig = hermitian_eigen(&m).expect("Gram matrix is Hermitian");
        return (eig.vectors[(0, 0)].conj(), eig.vectors[(1, 0)].conj());
    }
    let weight = |c: &(Complex64, Complex64)| fro(&combine(c.0, t0, c.1, t1));
    let mut best = candidates[0];
    for c in candidates.iter().skip(1) {
        let (wb, wc) = (weight(&best), weight(c));
        if wc > wb + 1e-12 || ((wc - wb).abs() <= 1e-12 && c.0.norm() > best.0.norm()) {
            best = *c;
        }
    }
    best
}

/// Left and right singular vectors `(u_k, v_k)` of a 2x2 matrix with
/// `m = sum_k s_k u_k v_k^†`, largest first.
fn svd_vectors(m: &[[Complex64; 2]; 2]) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let mm = Matrix::from_fn(2, 2, |i, j| {
        m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj()
    });
    let eig = hermitian_eigen(&mm).expect("Gram matrix is Hermitian");
    let u0 = [eig.vectors[(0, 0)], eig.vectors[(1, 0)]];
    let u1 = [eig.vectors[(0, 1)], eig.vectors[(1, 1)]];
    let right = |u: &[Complex64; 2]| -> ([Complex64; 2], f64) {
        // m^† u
        let v = [
            m[0][0].conj() * u[0] + m[1][0].conj() * u[1],
            m[0][1].conj() * u[0] + m[1][1].conj() * u[1],
        ];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        (v, n)
    };
    let (v0, n0) = right(&u0);
    let v0 = if n0 > TINY {
        [v0[0] / n0, v0[1] / n0]
    } else {
        [Complex64::new(1.0, 0.0), ZERO]
    };
    let (v1, n1) = right(&u1);
    let v1 = if n1 > TINY * n0.max(1.0) {
        [v1[0] / n1, v1[1] / n1]
    } else {
        [-v0[1].conj(), v0[0].conj()]
    };
    ([u0, u1], [v0, v1])
}

/// Local unitaries bringing `psi` to canonical form.
pub fn acin_normal_form(psi: &Ket) -> Result<Canonicalization> {
    if psi.n() != 3 {
        return Err(Error::Arity {
            expected: 3,
            got: psi.n(),
        });
    }
    if !psi.is_normalized() {
        return Err(Error::InvalidState("ket is not normalized".into()));
    }
    let t = slices(psi);
    let (a, b) = rotation_of_a(&t[0], &t[1]);
    let ua = [[a, b], [-b.conj(), a.conj()]];
    let s0 = combine(a, &t[0], b, &t[1]);
    let s1 = combine(-b.conj(), &t[0], a.conj(), &t[1]);

    // A nearly unentangled: diagonalize the surviving slice instead
    let target = if fro(&s0) > 1e-10 { s0 } else { s1 };
    let (u, v) = svd_vectors(&target);
    let ub = [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]];
    let uc = [[v[0][0], v[0][1]], [v[1][0], v[1][1]]];

    let ops = [
        LocalOperator::new(0, ua),
        LocalOperator::new(1, ub),
        LocalOperator::new(2, uc),
    ];
    let (rotated, _) = apply_local(&ops, psi)?;
    let amp = rotated.amplitudes();
    let theta = |i: usize| amp[i].arg();
    let mag = |i: usize| amp[i].norm();

    // diagonal phases with beta0 = gamma0 = 0
    let alpha0 = -theta(0);
    let (alpha1, beta1, gamma1) = if mag(7) > TINY {
        let gamma1 = theta(6) - theta(7);
        let alpha1 = -theta(5) - gamma1;
        (alpha1, -theta(6) - alpha1, gamma1)
    } else {
        let alpha1 = -theta(4);
        (alpha1, -theta(6) - alpha1, -theta(5) - alpha1)
    };
    let ph = |x: f64| Complex64::from_polar(1.0, x);
    let phase_a = [ph(alpha0), ph(alpha1)];
    let phase_b = [Complex64::new(1.0, 0.0), ph(beta1)];
    let phase_c = [Complex64::new(1.0, 0.0), ph(gamma1)];
    let scale_rows = |m: [[Complex64; 2]; 2], p: [Complex64; 2]| {
        [[p[0] * m[0][0], p[0] * m[0][1]], [p[1] * m[1][0], p[1] * m[1][1]]]
    };
    let unitaries = [
        LocalOperator::new(0, scale_rows(ua, phase_a)),
        LocalOperator::new(1, scale_rows(ub, phase_b)),
        LocalOperator::new(2, scale_rows(uc, phase_c)),
    ];

    let lambdas = [mag(0), mag(4), mag(5), mag(6), mag(7)];
    let mut omega = if mag(4) <= TINY || mag(4) * mag(7) <= TINY * TINY {
        0.0
    } else {
        (theta(4) + alpha1).rem_euclid(TAU)
    };
    if (omega - TAU).abs() < 1e-15 {
        omega = 0.0;
    }
    let norm: f64 = lambdas.iter().map(|l| l * l).sum();
    let lambdas = lambdas.map(|l| l / norm.sqrt());
    let form = AcinForm::new(lambdas, omega)?;

    let (image, _) = apply_local(&unitaries, psi)?;
    let realized = form.ket();
    let residual = image
        .amplitudes()
        .iter()
        .zip(realized.amplitudes())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    if residual > 1e-9 {
        return Err(Error::NumericFailure {
            reason: "canonical form does not reproduce the rotated ket".into(),
            residual,
        });
    }
    Ok(Canonicalization {
        form,
        unitaries,
        residual,
    })
}

/// `x = 2|l2 l3 - e^{iw} l1 l4|`, `y = 2 l0 l2`, `z = 2 l0 l3`, `t = 2 l0 l4`.
pub fn tangles_from_acin(f: &AcinForm) -> TangleTuple {
    let [l0, l1, l2, l3, l4] = f.lambdas;
    let x = 2.0 * (Complex64::new(l2 * l3, 0.0) - Complex64::from_polar(l1 * l4, f.omega)).norm();
    TangleTuple {
        x,
        y: 2.0 * l0 * l2,
        z: 2.0 * l0 * l3,
        t: 2.0 * l0 * l4,
    }
}

/// Checks from the necessity argument evaluated on one canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub lhs: f64,
    /// Central second difference of the achievability polynomial in `x`.
    pub second_difference: f64,
    /// `-2 (t^2 + y^2 + z^2)`.
    pub expected_second_difference: f64,
    /// Perfect-square term, when `omega` is 0 or pi.
    pub square_term: Option<f64>,
    /// Achievability polynomial at the signed `x` of the branch, which the
    /// square term must reproduce.
    pub branch_lhs: Option<f64>,
    /// `t^2(1 - x^2 - y^2 - z^2 - t^2) - (x^2 y^2 + x^2 z^2 + y^2 z^2 + 2xyz)`
    /// at `x = 2(l1 l4 - l2 l3) >= 0`, when `l2 l3 <= l1 l4` on the zero branch.
    pub sign_flipped_margin: Option<f64>,
}

impl NecessityReport {
    pub fn second_difference_rel_error(&self) -> f64 {
        (self.second_difference - self.expected_second_difference).abs()
            / self.expected_second_difference.abs().max(1.0)
    }

    pub fn square_residual(&self) -> Option<f64> {
        Some((self.branch_lhs? - self.square_term?).abs())
    }
}

fn on_branch(omega: f64, target: f64) -> bool {
    let d = (omega - target).rem_euclid(TAU);
    d.min(TAU - d) < 1e-12
}

pub fn necessity_certificates(f: &AcinForm) -> NecessityReport {
    let tt = tangles_from_acin(f);
    let lhs = achievability_lhs(tt.x, tt.y, tt.z, tt.t);
    let h = 1e-2;
    let g = |x: f64| achievability_lhs(x, tt.y, tt.z, tt.t);
    let second_difference = (g(tt.x + h) - 2.0 * g(tt.x) + g(tt.x - h)) / (h * h);
    let expected_second_difference = -2.0 * (tt.t * tt.t + tt.y * tt.y + tt.z * tt.z);

    let [l0, l1, l2, l3, l4] = f.lambdas;
    let tail = l4 - 2.0 * l4 * (l2 * l2 + l3 * l3 + l4 * l4);
    let (mut square_term, mut branch_lhs, mut sign_flipped_margin) = (None, None, None);
    if on_branch(f.omega, PI) {
        let x = 2.0 * (l2 * l3 + l1 * l4);
        square_term = Some((2.0 * l0 * (2.0 * l1 * l2 * l3 + tail)).powi(2));
        branch_lhs = Some(achievability_lhs(x, tt.y, tt.z, tt.t));
    } else if on_branch(f.omega, 0.0) {
        let x = 2.0 * (l2 * l3 - l1 * l4);
        square_term = Some((2.0 * l0 * (-2.0 * l1 * l2 * l3 + tail)).powi(2));
        branch_lhs = Some(achievability_lhs(x, tt.y, tt.z, tt.t));
        if l2 * l3 <= l1 * l4 {
            sign_flipped_margin = Some(achievability_lhs(-x.abs(), tt.y, tt.z, tt.t));
        }
    }
    NecessityReport {
        lhs,
        second_difference,
        expected_second_difference,
        square_term,
        branch_lhs,
        sign_flipped_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ghz_ket, haar_sample};
    use crate::tangles::tangle_tuple;

    fn w3() -> Ket {
        let s = 1.0 / 3f64.sqrt();
        Ket::from_real(3, &[0.0, s, s, 0.0, s, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn ghz_is_already_canonical() {
        let g = ghz_ket(3, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let c = acin_normal_form(&g).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let want = [h, 0.0, 0.0, 0.0, h];
        for (a, b) in c.form.lambdas.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(c.form.omega, 0.0);
    }

    #[test]
    fn w_canonical_form() {
        let c = acin_normal_form(&w3()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let want = [s, 0.0, s, s, 0.0];
        for (a, b) in c.form.lambdas.iter().zip(want) {
            assert!((a - b).abs() < 1e-14, "{:?}", c.form);
        }
        assert_eq!(c.form.omega, 0.0);
    }

    #[test]
    fn random_kets_keep_their_tangles() {
        for i in 0..200 {
            let psi = haar_sample(3, 99, i);
            let c = acin_normal_form(&psi).unwrap();
            assert!(c.residual < 1e-12);
            let direct = tangle_tuple(&psi).unwrap();
            let canon = tangles_from_acin(&c.form);
            assert!(direct.max_abs_diff(&canon) < 1e-10, "{direct:?} vs {canon:?}");
        }
    }

    #[test]
    fn tangles_from_acin_examples() {
        let h = 1.0 / 2f64.sqrt();
        let g = AcinForm::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap();
        assert!(tangles_from_acin(&g).max_abs_diff(&TangleTuple::new(0.0, 0.0, 0.0, 1.0)) < 1e-15);

        let s = 1.0 / 3f64.sqrt();
        let w = AcinForm::new([s, 0.0, s, s, 0.0], 0.0).unwrap();
        let t = 2.0 / 3.0;
        assert!(tangles_from_acin(&w).max_abs_diff(&TangleTuple::new(t, t, t, 0.0)) < 1e-15);

        let f = AcinForm::new([s, s, 0.0, 0.0, s], PI).unwrap();
        assert!(tangles_from_acin(&f).max_abs_diff(&TangleTuple::new(t, 0.0, 0.0, t)) < 1e-15);
        let direct = tangle_tuple(&f.ket()).unwrap();
        assert!(direct.max_abs_diff(&tangles_from_acin(&f)) < 1e-12);
    }

    #[test]
    fn certificate_examples() {
        let h = 1.0 / 2f64.sqrt();
        let g = necessity_certificates(&AcinForm::new([h, 0.0, 0.0, 0.0, h], PI).unwrap());
        assert!(g.lhs.abs() < 1e-15);
        assert!(g.square_term.unwrap().abs() < 1e-15);

        let s = 1.0 / 3f64.sqrt();
        let w = necessity_certificates(&AcinForm::new([s, 0.0, s, s, 0.0], 0.0).unwrap());
        assert!((w.expected_second_difference + 16.0 / 9.0).abs() < 1e-14);
        assert!(w.second_difference_rel_error() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let s = 1.0 / 3f64.sqrt();
        let f = AcinForm::new([s, 0.0, s, s, 0.0], 1.0).unwrap();
        assert_eq!(AcinForm::from_json(&f.to_json()).unwrap(), f);
        assert!(AcinForm::from_json(r#"{"lambdas":[1,1,0,0,0],"omega":0}"#).is_err());
    }
}
