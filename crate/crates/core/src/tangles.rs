//! Tangle measures.
//!
//! Pure-state tangles are magnitudes of anti-linear expectation values
//! (`2|det|` for two qubits, `2 sqrt|hdet|` for three, the `Theta` forms for
//! general `k`). Mixed-state values use the generalized Wootters formula
//! `max(sqrt(l1) - sum_{i>=2} sqrt(li), 0)` where `li` are the eigenvalues of
//! `R = rho Theta rho* Theta`.
//!
//! The square roots `sqrt(li)` are evaluated as the singular values of
//! `W^T Theta W` for any factorization `rho = W W^†`. This is the same
//! spectrum as the Hermitian form `sqrt(rho) Theta rho* Theta sqrt(rho)`, but
//! exactly vanishing roots stay at rounding level instead of its square root.
//! For reduced states of a ket the factor is the reshaped ket itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, psd_sqrt, singular_values, Matrix};
use crate::state::{DensityMatrix, Ket, PartySet};
use crate::theta::{build_theta, eps, theta_minus_quartic, theta_plus_bilinear, Parity, MAX_K};
use crate::tol;

/// Three-qubit tangles `(x, y, z, t) = (tau_BC, tau_AC, tau_AB, tau_ABC)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleTuple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl TangleTuple {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
            self.t - other.t,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.t]
    }
}

/// Convex roof (minimum average) and concave roof (maximum average) of a
/// tangle on a mixed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub convex: f64,
    pub concave: f64,
}

/// Whether the middle factor of `R` is conjugated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RConvention {
    /// `R = rho Theta rho* Theta`; reduces to Wootters for two qubits.
    #[default]
    Conjugated,
    /// `R = rho Theta rho Theta`, kept for comparison.
    Unconjugated,
}

/// `tau_A = 2 sqrt(det rho_A)` for a normalized ket.
///
/// `det rho_A` is accumulated as the sum of squared 2x2 minors of the
/// `2 x 2^(n-1)` reshaped ket, so product states give exactly zero.
pub fn one_tangle(psi: &Ket, party: usize) -> Result<f64> {
    psi.require_normalized()?;
    if party >= psi.n() {
        return Err(Error::Domain(format!("party {party} outside {} qubits", psi.n())));
    }
    if psi.n() == 1 {
        return Ok(0.0);
    }
    let m = psi.matricize(PartySet::single(party))?;
    let cols = m.cols();
    let mut det = 0.0;
    for j in 0..cols {
        for l in (j + 1)..cols {
            det += (m[(0, j)] * m[(1, l)] - m[(0, l)] * m[(1, j)]).norm_sqr();
        }
    }
    Ok((2.0 * det.sqrt()).min(1.0))
}

/// `2 sqrt(det rho)` for a single-qubit density matrix.
pub fn one_tangle_density(rho: &DensityMatrix) -> Result<f64> {
    if rho.k() != 1 {
        return Err(Error::Arity {
            expected: 1,
            got: rho.k(),
        });
    }
    let det = (rho.entry(0, 0) * rho.entry(1, 1) - rho.entry(0, 1) * rho.entry(1, 0)).re;
    Ok(2.0 * det.max(0.0).sqrt())
}

/// `2 |psi_00 psi_11 - psi_01 psi_10|`.
pub fn two_tangle_pure(psi: &Ket) -> Result<f64> {
    if psi.n() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: psi.n(),
        });
    }
    let a = psi.amplitudes();
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

/// Wootters value of a two-qubit density matrix.
pub fn two_tangle(rho: &DensityMatrix) -> Result<f64> {
    if rho.k() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: rho.k(),
        });
    }
    k_tangle_mixed(rho)
}

/// Trace-only evaluation for rank <= 2 two-qubit states:
/// `sqrt(Tr R - sqrt(2 ((Tr R)^2 - Tr R^2)))`.
pub fn two_tangle_rank2(rho: &DensityMatrix) -> Result<f64> {
    if rho.k() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: rho.k(),
        });
    }
    k_tangle_rank2_trace(rho, RConvention::Conjugated)
}

/// Tangle of assistance `sqrt(l1) + sqrt(l2)` for a rank <= 2 two-qubit state.
pub fn two_tangle_assistance(rho: &DensityMatrix) -> Result<f64> {
    if rho.k() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: rho.k(),
        });
    }
    Ok(roots_rank2(rho)?.concave)
}

/// Cayley hyperdeterminant of a three-qubit ket.
pub fn cayley_hyperdeterminant(psi: &Ket) -> Complex64 {
    let a = psi.amplitudes();
    let (a000, a001, a010, a011, a100, a101, a110, a111) =
        (a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]);
    a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011
        - 2.0
            * (a000 * a111 * a011 * a100
                + a000 * a111 * a101 * a010
                + a000 * a111 * a110 * a001
                + a011 * a100 * a101 * a010
                + a011 * a100 * a110 * a001
                + a101 * a010 * a110 * a001)
        + 4.0 * (a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100)
}

/// Three-tangle from the full Levi-Civita contraction
/// `sqrt(2 |psi psi eps^6 psi psi|)`.
pub fn three_tangle(psi: &Ket) -> Result<f64> {
    if psi.n() != 3 {
        return Err(Error::Arity {
            expected: 3,
            got: psi.n(),
        });
    }
    psi.require_normalized()?;
    let a = psi.amplitudes();
    // six-bit multi-indices; bit b of i is i_b
    let b = |i: usize, k: usize| (i >> k) & 1;
    let amp = |hi: usize, mid: usize, lo: usize| a[4 * hi + 2 * mid + lo];
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..64usize {
        let ei = eps(b(i, 0), b(i, 3));
        if ei == 0 {
            continue;
        }
        for j in 0..64usize {
            let e = ei
                * eps(b(j, 0), b(j, 3))
                * eps(b(i, 1), b(j, 1))
                * eps(b(i, 2), b(j, 2))
                * eps(b(i, 4), b(j, 4))
                * eps(b(i, 5), b(j, 5));
            if e == 0 {
                continue;
            }
            sum += amp(b(j, 5), b(j, 4), b(j, 3))
                * amp(b(j, 2), b(j, 1), b(j, 0))
                * amp(b(i, 5), b(i, 4), b(i, 3))
                * amp(b(i, 2), b(i, 1), b(i, 0))
                * f64::from(e);
        }
    }
    Ok((2.0 * sum.norm()).sqrt())
}

/// Pure k-tangle of a ket defined on exactly its `k = n` parties.
///
/// Even `k`: `|<psi*|Theta+|psi>|`. Odd `k`: `sqrt(2 |<psi* psi*|Theta-|psi psi>|)`
/// with party 0 in the distinguished position.
pub fn k_tangle_pure(psi: &Ket) -> Result<f64> {
    let k = psi.n();
    if k < 2 {
        return Err(Error::Domain("k-tangle needs at least two parties".into()));
    }
    if k > MAX_K {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_K}")));
    }
    psi.require_normalized()?;
    let a = psi.amplitudes();
    Ok(match Parity::of(k) {
        Parity::Even => theta_plus_bilinear(a, a).norm(),
        Parity::Odd => (2.0 * theta_minus_quartic(a, k).norm()).sqrt(),
    })
}

/// Generalized Wootters value for an even-`k` density matrix.
pub fn k_tangle_mixed(rho: &DensityMatrix) -> Result<f64> {
    k_tangle_mixed_with(rho, RConvention::Conjugated)
}

pub fn k_tangle_mixed_with(rho: &DensityMatrix, conv: RConvention) -> Result<f64> {
    check_even_mixed(rho)?;
    let w = density_factor(rho)?;
    Ok(wootters(&sqrt_r_spectrum(&w, conv)?))
}

/// Trace-only evaluation for rank <= 2 even-`k` states.
pub fn k_tangle_rank2_trace(rho: &DensityMatrix, conv: RConvention) -> Result<f64> {
    check_even_mixed(rho)?;
    check_rank_two(rho)?;
    let r = r_operator(rho, conv)?;
    let tr = r.trace().re;
    let tr2 = (&r * &r).trace().re;
    let inner = (2.0 * (tr * tr - tr2)).max(0.0).sqrt();
    Ok((tr - inner).max(0.0).sqrt())
}

/// `R = rho Theta rho^(*) Theta` as a dense matrix.
pub fn r_operator(rho: &DensityMatrix, conv: RConvention) -> Result<Matrix> {
    let theta = theta_matrix(rho.k())?;
    let mid = match conv {
        RConvention::Conjugated => rho.matrix().conj(),
        RConvention::Unconjugated => rho.matrix().clone(),
    };
    Ok(&(&(rho.matrix() * &theta) * &mid) * &theta)
}

/// Eigenvalues of `R` in non-ascending order, computed as the spectrum of the
/// Hermitian matrix `sqrt(rho) Theta rho^(*) Theta sqrt(rho)`.
pub fn r_eigenvalues(rho: &DensityMatrix, conv: RConvention) -> Result<Vec<f64>> {
    check_even_mixed(rho)?;
    let theta = theta_matrix(rho.k())?;
    let s = psd_sqrt(rho.matrix())?;
    let mid = match conv {
        RConvention::Conjugated => rho.matrix().conj(),
        RConvention::Unconjugated => rho.matrix().clone(),
    };
    let h = &(&(&(&s * &theta) * &mid) * &theta) * &s;
    let mut vals = hermitian_eigenvalues(&h)?;
    for v in &mut vals {
        if *v < 0.0 && *v >= -tol::PSD_CLAMP {
            *v = 0.0;
        }
    }
    Ok(vals)
}

/// Convex and concave roofs `sqrt(l1) -/+ sqrt(l2)` of a rank <= 2 even-`k`
/// density matrix.
pub fn roots_rank2(rho: &DensityMatrix) -> Result<RootPair> {
    check_even_mixed(rho)?;
    check_rank_two(rho)?;
    let w = density_factor(rho)?;
    Ok(root_pair(&sqrt_r_spectrum(&w, RConvention::Conjugated)?))
}

/// Even-`k` tangle of the reduced state of `psi` on `keep`. When `keep` is
/// every party this is the pure tangle.
pub fn marginal_k_tangle(psi: &Ket, keep: PartySet) -> Result<f64> {
    psi.require_normalized()?;
    if !keep.len().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "mixed tangle of {keep} needs an even number of parties"
        )));
    }
    if keep.len() > MAX_K {
        return Err(Error::Size(format!("k = {} exceeds {MAX_K}", keep.len())));
    }
    let w = psi.matricize(keep)?;
    Ok(wootters(&sqrt_r_spectrum(&w, RConvention::Conjugated)?))
}

/// Convex and concave roofs of the reduced state of `psi` on `keep`. The
/// reduced state must have rank <= 2.
pub fn marginal_roots(psi: &Ket, keep: PartySet) -> Result<RootPair> {
    psi.require_normalized()?;
    if !keep.len().is_multiple_of(2) || keep.len() > MAX_K {
        return Err(Error::Domain(format!("roots of {keep} need an even k <= {MAX_K}")));
    }
    let w = psi.matricize(keep)?;
    let spec = sqrt_r_spectrum(&w, RConvention::Conjugated)?;
    if w.cols() > 2 {
        let rank = singular_values(&w)?.iter().filter(|&&s| s * s > tol::RANK_TWO).count();
        if rank > 2 {
            return Err(Error::UnsupportedRank { rank, max: 2 });
        }
    }
    Ok(root_pair(&spec))
}

/// Three-qubit tangle tuple `(tau_BC, tau_AC, tau_AB, tau_ABC)`.
pub fn tangle_tuple(psi: &Ket) -> Result<TangleTuple> {
    if psi.n() != 3 {
        return Err(Error::Arity {
            expected: 3,
            got: psi.n(),
        });
    }
    Ok(TangleTuple {
        x: marginal_k_tangle(psi, PartySet::from_parties(&[1, 2]))?,
        y: marginal_k_tangle(psi, PartySet::from_parties(&[0, 2]))?,
        z: marginal_k_tangle(psi, PartySet::from_parties(&[0, 1]))?,
        t: three_tangle(psi)?,
    })
}

/// Density matrix supported on `span{|0...0>, |1...1>}`, stored as its 2x2
/// block `[[alpha, beta], [conj(beta), gamma]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzBlock {
    pub alpha: f64,
    pub beta: Complex64,
    pub gamma: f64,
}

impl GhzBlock {
    /// Extracts the block, rejecting weight outside it beyond `1e-9`.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let d = rho.dim();
        let last = d - 1;
        let mut outside = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let in_block = (i == 0 || i == last) && (j == 0 || j == last);
                if !in_block {
                    outside = outside.max(rho.entry(i, j).norm());
                }
            }
        }
        if outside > tol::DEFAULT {
            return Err(Error::InvalidSupport(outside));
        }
        Ok(Self {
            alpha: rho.entry(0, 0).re,
            beta: rho.entry(0, last),
            gamma: rho.entry(last, last).re,
        })
    }

    /// Residual tangle `2 |beta|`.
    pub fn residual_tangle(&self) -> f64 {
        2.0 * self.beta.norm()
    }

    /// Embeds the block as a `k`-qubit density matrix.
    pub fn to_density(&self, k: usize) -> Result<DensityMatrix> {
        let d = 1usize << k;
        let mut m = Matrix::zeros(d, d);
        m[(0, 0)] = Complex64::new(self.alpha, 0.0);
        m[(d - 1, d - 1)] = Complex64::new(self.gamma, 0.0);
        m[(0, d - 1)] = self.beta;
        m[(d - 1, 0)] = self.beta.conj();
        DensityMatrix::new_unnormalized((0..k).collect(), m)
    }
}

/// Residual tangle `2|beta|` of a density matrix supported on the GHZ block.
pub fn residual_tangle_ghz_block(rho: &DensityMatrix) -> Result<f64> {
    Ok(GhzBlock::from_density(rho)?.residual_tangle())
}

/// Result of the odd-`k` to `(k-1)` relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KToKm1 {
    pub k_tangle: f64,
    pub roots: RootPair,
}

impl KToKm1 {
    /// `tau_I^2 - (concave^2 - convex^2)`.
    pub fn residual(&self) -> f64 {
        self.k_tangle.powi(2) - (self.roots.concave.powi(2) - self.roots.convex.powi(2))
    }
}

/// For an odd-`k` ket, the k-tangle with `removed` in the distinguished
/// position and the roofs of the reduced state on the other parties.
pub fn k_to_km1_relation(psi: &Ket, removed: usize) -> Result<KToKm1> {
    let k = psi.n();
    if !(k == 3 || k == 5) {
        return Err(Error::Domain(format!("odd k in {{3, 5}} required, got {k}")));
    }
    if removed >= k {
        return Err(Error::Domain(format!("party {removed} outside {k} qubits")));
    }
    let mut order = vec![removed];
    order.extend((0..k).filter(|&p| p != removed));
    let perm = psi.permute(&order)?;
    let k_tangle = k_tangle_pure(&perm)?;
    let roots = marginal_roots(&perm, PartySet::full(k).without(0))?;
    Ok(KToKm1 { k_tangle, roots })
}

/// [`k_to_km1_relation`], failing unless `tau_I^2 = concave^2 - convex^2`
/// holds within `1e-8`.
pub fn pure_k_to_km1(psi: &Ket, removed: usize) -> Result<KToKm1> {
    let out = k_to_km1_relation(psi, removed)?;
    let (k_tangle, roots) = (out.k_tangle, out.roots);
    if out.residual().abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "tau^2 = {} but concave^2 - convex^2 = {}",
            k_tangle.powi(2),
            roots.concave.powi(2) - roots.convex.powi(2)
        )));
    }
    Ok(out)
}

fn check_even_mixed(rho: &DensityMatrix) -> Result<()> {
    let k = rho.k();
    if !k.is_multiple_of(2) || k == 0 {
        return Err(Error::Domain(format!(
            "mixed-state tangle implemented for even k only, got {k}"
        )));
    }
    if k > MAX_K {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_K}")));
    }
    Ok(())
}

fn check_rank_two(rho: &DensityMatrix) -> Result<()> {
    let vals = hermitian_eigenvalues(rho.matrix())?;
    let rank = vals.iter().filter(|&&v| v > tol::RANK_TWO).count();
    if vals.get(2).copied().unwrap_or(0.0) >= tol::RANK_TWO {
        return Err(Error::UnsupportedRank { rank, max: 2 });
    }
    Ok(())
}

fn theta_matrix(k: usize) -> Result<Matrix> {
    let t = build_theta(k, Parity::Even)?;
    Ok(Matrix::from_fn(t.dim(), t.dim(), |i, j| {
        Complex64::new(f64::from(t.entry(i, j)), 0.0)
    }))
}

/// Columns `sqrt(p_i) v_i` of the eigendecomposition, dropping eigenvalues
/// below `RANK_CUTOFF * trace`.
fn density_factor(rho: &DensityMatrix) -> Result<Matrix> {
    let eig = hermitian_eigen(rho.matrix())?;
    let cutoff = tol::RANK_CUTOFF * rho.trace().abs().max(f64::MIN_POSITIVE);
    if let Some(&min) = eig.values.last() {
        if min < -tol::PSD_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
    }
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > cutoff)
        .collect();
    let d = rho.dim();
    Ok(Matrix::from_fn(d, keep.len(), |i, c| {
        eig.vectors[(i, keep[c])] * eig.values[keep[c]].sqrt()
    }))
}

/// Non-ascending `sqrt(l_i)` of `R` for `rho = W W^†`.
fn sqrt_r_spectrum(w: &Matrix, conv: RConvention) -> Result<Vec<f64>> {
    let r = w.cols();
    if r == 0 {
        return Ok(vec![0.0]);
    }
    let cols: Vec<Vec<Complex64>> = (0..r).map(|c| w.column(c)).collect();
    match conv {
        RConvention::Conjugated => {
            let t = Matrix::from_fn(r, r, |a, b| theta_plus_bilinear(&cols[a], &cols[b]));
            singular_values(&t)
        }
        RConvention::Unconjugated => {
            let conj: Vec<Vec<Complex64>> =
                cols.iter().map(|c| c.iter().map(|z| z.conj()).collect()).collect();
            let h = Matrix::from_fn(r, r, |a, b| theta_plus_bilinear(&conj[a], &cols[b]));
            let mut vals: Vec<f64> = hermitian_eigenvalues_any(&h)?.into_iter().map(f64::abs).collect();
            vals.sort_by(|a, b| b.total_cmp(a));
            Ok(vals)
        }
    }
}

fn hermitian_eigenvalues_any(h: &Matrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(h)?.values)
}

fn wootters(sqrt_l: &[f64]) -> f64 {
    let first = sqrt_l.first().copied().unwrap_or(0.0);
    let rest: f64 = sqrt_l.iter().skip(1).sum();
    (first - rest).max(0.0)
}

fn root_pair(sqrt_l: &[f64]) -> RootPair {
    let s1 = sqrt_l.first().copied().unwrap_or(0.0);
    let s2 = sqrt_l.get(1).copied().unwrap_or(0.0);
    RootPair {
        convex: (s1 - s2).max(0.0),
        concave: s1 + s2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ghz_ket, haar_sample, partial_trace};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn w3() -> Ket {
        let s = 1.0 / 3f64.sqrt();
        Ket::from_real(3, &[0.0, s, s, 0.0, s, 0.0, 0.0, 0.0]).unwrap()
    }

    fn bell() -> Ket {
        ghz_ket(2, c(1.0), c(1.0)).unwrap()
    }

    #[test]
    fn one_tangle_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        assert!((one_tangle(&g, 0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(one_tangle(&Ket::basis(3, 0).unwrap(), 0).unwrap(), 0.0);
        let want = 2.0 * 2f64.sqrt() / 3.0;
        assert!((one_tangle(&w3(), 0).unwrap() - want).abs() < 1e-15);
        let raw = Ket::from_real(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(one_tangle(&raw, 0), Err(Error::InvalidState(_))));
    }

    #[test]
    fn one_tangle_matches_density_determinant() {
        for i in 0..20 {
            let psi = haar_sample(4, 3, i);
            for p in 0..4 {
                let rho = partial_trace(&psi, PartySet::single(p)).unwrap();
                let a = one_tangle(&psi, p).unwrap();
                let b = one_tangle_density(&rho).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_tangle_examples() {
        assert!((two_tangle_pure(&bell()).unwrap() - 1.0).abs() < 1e-15);
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let ab = partial_trace(&g, PartySet::from_parties(&[0, 1])).unwrap();
        assert!(two_tangle(&ab).unwrap().abs() < 1e-15);
        let wab = partial_trace(&w3(), PartySet::from_parties(&[0, 1])).unwrap();
        assert!((two_tangle(&wab).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((two_tangle_rank2(&wab).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(two_tangle(&partial_trace(&g, PartySet::single(0)).unwrap()), Err(Error::Arity { .. })));
    }

    #[test]
    fn r_eigenvalues_of_ghz_pair() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let ab = partial_trace(&g, PartySet::from_parties(&[0, 1])).unwrap();
        let vals = r_eigenvalues(&ab, RConvention::Conjugated).unwrap();
        let want = [0.25, 0.25, 0.0, 0.0];
        for (v, w) in vals.iter().zip(want) {
            assert!((v - w).abs() < 1e-14);
        }
    }

    #[test]
    fn assistance_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let ab = partial_trace(&g, PartySet::from_parties(&[0, 1])).unwrap();
        assert!((two_tangle_assistance(&ab).unwrap() - 1.0).abs() < 1e-14);
        let b = DensityMatrix::pure(&bell());
        assert!((two_tangle_assistance(&b).unwrap() - 1.0).abs() < 1e-14);
        let wab = partial_trace(&w3(), PartySet::from_parties(&[0, 1])).unwrap();
        assert!((two_tangle_assistance(&wab).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        let mixed = DensityMatrix::new(vec![0, 1], Matrix::from_real_diag(&[0.25; 4])).unwrap();
        assert!(matches!(two_tangle_assistance(&mixed), Err(Error::UnsupportedRank { .. })));
    }

    #[test]
    fn three_tangle_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        assert!((three_tangle(&g).unwrap() - 1.0).abs() < 1e-15);
        assert!(three_tangle(&w3()).unwrap().abs() < 1e-15);
        let ab = ghz_ket(3, c(1.0), c(2.0)).unwrap();
        assert!((three_tangle(&ab).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn three_tangle_matches_cayley() {
        for i in 0..200 {
            let psi = haar_sample(3, 17, i);
            let lit = three_tangle(&psi).unwrap();
            let hd = 2.0 * cayley_hyperdeterminant(&psi).norm().sqrt();
            assert!((lit - hd).abs() < 1e-12, "{lit} vs {hd}");
        }
    }

    #[test]
    fn k_tangle_examples() {
        assert!((k_tangle_pure(&bell()).unwrap() - 1.0).abs() < 1e-15);
        let g4 = ghz_ket(4, c(1.0), c(1.0)).unwrap();
        assert!((k_tangle_pure(&g4).unwrap() - 1.0).abs() < 1e-15);
        let g5 = ghz_ket(5, c(1.0), c(1.0)).unwrap();
        assert!((k_tangle_pure(&g5).unwrap() - 1.0).abs() < 1e-14);
        let g7 = ghz_ket(7, c(1.0), c(1.0)).unwrap();
        assert!(matches!(k_tangle_pure(&g7), Err(Error::Size(_))));
    }

    #[test]
    fn k_tangle_specializations_agree() {
        for i in 0..100 {
            let p2 = haar_sample(2, 5, i);
            assert!((k_tangle_pure(&p2).unwrap() - two_tangle_pure(&p2).unwrap()).abs() < 1e-10);
            let p3 = haar_sample(3, 6, i);
            assert!((k_tangle_pure(&p3).unwrap() - three_tangle(&p3).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn k_tangle_mixed_examples() {
        let g4 = ghz_ket(4, c(1.0), c(1.0)).unwrap();
        let rho = DensityMatrix::pure(&g4);
        assert!((k_tangle_mixed(&rho).unwrap() - 1.0).abs() < 1e-13);

        let block = GhzBlock {
            alpha: 0.5,
            beta: c(0.25),
            gamma: 0.5,
        };
        let rho = block.to_density(4).unwrap();
        assert!((k_tangle_mixed(&rho).unwrap() - 0.5).abs() < 1e-13);
        assert!((k_tangle_rank2_trace(&rho, RConvention::Conjugated).unwrap() - 0.5).abs() < 1e-10);

        let flat = GhzBlock {
            alpha: 0.5,
            beta: c(0.0),
            gamma: 0.5,
        };
        assert!(k_tangle_mixed(&flat.to_density(4).unwrap()).unwrap().abs() < 1e-13);

        let odd = DensityMatrix::pure(&ghz_ket(3, c(1.0), c(1.0)).unwrap());
        assert!(matches!(k_tangle_mixed(&odd), Err(Error::Domain(_))));
    }

    #[test]
    fn factor_route_matches_hermitian_route() {
        for i in 0..50 {
            let psi = haar_sample(4, 23, i);
            let keep = PartySet::from_parties(&[0, 2]);
            let rho = partial_trace(&psi, keep).unwrap();
            let via_eig: Vec<f64> = r_eigenvalues(&rho, RConvention::Conjugated)
                .unwrap()
                .into_iter()
                .map(|l| l.max(0.0).sqrt())
                .collect();
            let tau_eig = wootters(&via_eig);
            let tau = marginal_k_tangle(&psi, keep).unwrap();
            assert!((tau - tau_eig).abs() < 1e-9, "{tau} vs {tau_eig}");
            assert!((k_tangle_mixed(&rho).unwrap() - tau).abs() < 1e-10);
        }
    }

    #[test]
    fn unconjugated_convention_agrees_on_real_states() {
        let wab = partial_trace(&w3(), PartySet::from_parties(&[0, 1])).unwrap();
        let a = k_tangle_mixed_with(&wab, RConvention::Unconjugated).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn residual_block_examples() {
        let pure = GhzBlock {
            alpha: 0.5,
            beta: c(0.5),
            gamma: 0.5,
        };
        assert!((residual_tangle_ghz_block(&pure.to_density(3).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let zero = GhzBlock {
            alpha: 0.5,
            beta: c(0.0),
            gamma: 0.5,
        };
        assert_eq!(zero.residual_tangle(), 0.0);
        let b = GhzBlock {
            alpha: 0.7,
            beta: c(0.2),
            gamma: 0.3,
        };
        assert!((residual_tangle_ghz_block(&b.to_density(3).unwrap()).unwrap() - 0.4).abs() < 1e-15);

        let w = DensityMatrix::pure(&w3());
        assert!(matches!(residual_tangle_ghz_block(&w), Err(Error::InvalidSupport(_))));
    }

    #[test]
    fn k_to_km1_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let r = pure_k_to_km1(&g, 0).unwrap();
        assert!((r.roots.concave - 1.0).abs() < 1e-14);
        assert!(r.roots.convex.abs() < 1e-14);
        assert!((r.k_tangle - 1.0).abs() < 1e-14);

        let r = pure_k_to_km1(&w3(), 0).unwrap();
        assert!((r.roots.concave - 2.0 / 3.0).abs() < 1e-14);
        assert!((r.roots.convex - 2.0 / 3.0).abs() < 1e-14);
        assert!(r.k_tangle.abs() < 1e-14);

        for i in 0..20 {
            let psi = haar_sample(5, 41, i);
            for removed in 0..5 {
                pure_k_to_km1(&psi, removed).unwrap();
            }
        }
    }

    #[test]
    fn ckw_on_samples() {
        for i in 0..200 {
            let psi = haar_sample(3, 77, i);
            let tt = tangle_tuple(&psi).unwrap();
            let a = one_tangle(&psi, 0).unwrap();
            let gap = a * a - tt.z * tt.z - tt.y * tt.y - tt.t * tt.t;
            assert!(gap.abs() < 1e-12, "gap {gap}");
        }
    }
}
