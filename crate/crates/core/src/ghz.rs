//! The GHZ SLOCC class in closed form.
//!
//! A state `(x)_p M_p |GHZ_n>` is described by the per-party angle
//! `phi_p` between the two columns of `M_p`, a single real `r >= 1` from the
//! ratios of column norms, and `kappa`, the cosine of the accumulated phase
//! of the column overlaps. With `c = cos phi`, `s = sin phi` and
//! `D = r + kappa prod_p c_p`:
//!
//! - `tau_I = prod_{i in I} s_i prod_{j not in I} c_j / D` for `|I| >= 2`
//! - `tau_A = s_A sqrt(1 - prod_{i != A} c_i^2) / D`

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constraints::achievability_lhs;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::state::{apply_local, ghz_ket, partial_trace, DensityMatrix, Ket, LocalOperator, PartySet, MAX_QUBITS};
use crate::tangles::{k_tangle_pure, marginal_k_tangle, GhzBlock, TangleTuple};
use crate::tol;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzClassParams {
    pub n: usize,
    pub r: f64,
    pub phis: Vec<f64>,
    pub kappa: f64,
}

impl GhzClassParams {
    pub fn new(n: usize, r: f64, phis: Vec<f64>, kappa: f64) -> Result<Self> {
        let p = Self { n, r, phis, kappa };
        p.validate()?;
        Ok(p)
    }

    /// `r = 1`, all `phi = pi/2`, `kappa = -1`: the GHZ state itself.
    pub fn ghz_point(n: usize) -> Self {
        Self {
            n,
            r: 1.0,
            phis: vec![FRAC_PI_2; n],
            kappa: -1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_QUBITS {
            return Err(Error::Domain(format!("party count {} outside 2..={MAX_QUBITS}", self.n)));
        }
        if self.phis.len() != self.n {
            return Err(Error::Arity {
                expected: self.n,
                got: self.phis.len(),
            });
        }
        if !self.r.is_finite() || self.r < 1.0 - 1e-12 {
            return Err(Error::DegenerateParameter(format!("r = {} < 1", self.r)));
        }
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&self.kappa) {
            return Err(Error::DegenerateParameter(format!("kappa = {} outside [-1, 1]", self.kappa)));
        }
        for &phi in &self.phis {
            if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&phi) {
                return Err(Error::DegenerateParameter(format!("phi = {phi} outside [0, pi/2]")));
            }
        }
        Ok(())
    }

    /// `cos phi`, exactly 0 at `phi = pi/2`.
    pub fn cos(&self, p: usize) -> f64 {
        if (self.phis[p] - FRAC_PI_2).abs() < 1e-15 {
            0.0
        } else {
            self.phis[p].cos().max(0.0)
        }
    }

    /// `sin phi`, clamped to `[0, 1]`.
    pub fn sin(&self, p: usize) -> f64 {
        self.phis[p].sin().clamp(0.0, 1.0)
    }

    pub fn cos_product(&self) -> f64 {
        (0..self.n).map(|p| self.cos(p)).product()
    }

    /// `D = r + kappa prod c`.
    pub fn denominator(&self) -> Result<f64> {
        let d = self.r + self.kappa * self.cos_product();
        if d <= tol::SINGULAR {
            return Err(Error::DegenerateParameter(format!("denominator {d:e}")));
        }
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }
}

/// Column parameterization of one local operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub u: f64,
    pub v: f64,
    pub phi: f64,
}

impl LocalFactor {
    /// Column norms, column angle and the overlap `<col0, col1>`.
    pub fn from_operator(op: &LocalOperator) -> Result<(Self, Complex64)> {
        let det = op.det().norm();
        let (c0, c1) = (op.col0(), op.col1());
        let u = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        let v = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
        if det <= tol::SINGULAR * (u * v).max(1.0) {
            return Err(Error::ClassExit { party: op.party, det });
        }
        let overlap = c0[0].conj() * c1[0] + c0[1].conj() * c1[1];
        let cos = (overlap.norm() / (u * v)).min(1.0);
        let sin = (det / (u * v)).min(1.0);
        Ok((Self { u, v, phi: sin.atan2(cos) }, overlap))
    }
}

/// Parameters of `(x)_p M_p |GHZ_n>`; `ops` holds one operator per party.
pub fn canonical_params(ops: &[LocalOperator]) -> Result<GhzClassParams> {
    let n = ops.len();
    let mut sorted: Vec<LocalOperator> = ops.to_vec();
    sorted.sort_by_key(|o| o.party);
    if sorted.iter().enumerate().any(|(i, o)| o.party != i) {
        return Err(Error::Arity {
            expected: n,
            got: PartySet::from_parties(&sorted.iter().map(|o| o.party).collect::<Vec<_>>()).len(),
        });
    }
    let mut ratio = 1.0;
    let mut overlap = ONE;
    let mut phis = Vec::with_capacity(n);
    for op in &sorted {
        let (f, ov) = LocalFactor::from_operator(op)?;
        ratio *= f.u / f.v;
        overlap *= ov;
        phis.push(f.phi);
    }
    let r = 0.5 * (ratio + 1.0 / ratio);
    let kappa = if overlap.norm() <= tol::SINGULAR {
        -1.0
    } else {
        overlap.re / overlap.norm()
    };
    GhzClassParams::new(n, r.max(1.0), phis, kappa)
}

/// Closed-form `tau_I` for `|I| >= 2`.
pub fn tangles_closed_form(params: &GhzClassParams, subset: PartySet) -> Result<f64> {
    params.validate()?;
    if subset.len() < 2 || !subset.is_subset_of(PartySet::full(params.n)) {
        return Err(Error::Domain(format!("subset {subset} needs 2..={} parties", params.n)));
    }
    let d = params.denominator()?;
    let num: f64 = (0..params.n)
        .map(|p| {
            if subset.contains(p) {
                params.sin(p)
            } else {
                params.cos(p)
            }
        })
        .product();
    Ok(num / d)
}

/// Closed-form one-tangle of `party`.
pub fn one_tangle_closed_form(params: &GhzClassParams, party: usize) -> Result<f64> {
    params.validate()?;
    if party >= params.n {
        return Err(Error::Domain(format!("party {party} outside {} parties", params.n)));
    }
    let d = params.denominator()?;
    let others: f64 = (0..params.n).filter(|&p| p != party).map(|p| params.cos(p).powi(2)).product();
    Ok(params.sin(party) * (1.0 - others).max(0.0).sqrt() / d)
}

/// `(tau_BC, tau_AC, tau_AB, tau_ABC)` for three parties.
pub fn tangle_tuple_closed_form(params: &GhzClassParams) -> Result<TangleTuple> {
    if params.n != 3 {
        return Err(Error::Arity {
            expected: 3,
            got: params.n,
        });
    }
    let t = |ps: &[usize]| tangles_closed_form(params, PartySet::from_parties(ps));
    Ok(TangleTuple {
        x: t(&[1, 2])?,
        y: t(&[0, 2])?,
        z: t(&[0, 1])?,
        t: t(&[0, 1, 2])?,
    })
}

/// Operators `M_p = [[1, v_p c_p], [0, v_p s_p]]` with `v_0 = r - sqrt(r^2 - 1)`
/// and `v_p = 1` otherwise. The second column of party 0 carries the phase
/// `e^{i theta}`, `cos theta = kappa`, which fixes the sign of the cross term.
pub fn reconstruction_ops(params: &GhzClassParams) -> Result<Vec<LocalOperator>> {
    params.validate()?;
    let r = params.r.max(1.0);
    // r - sqrt(r^2 - 1), written without cancellation
    let big_v = 1.0 / (r + (r * r - 1.0).sqrt());
    let kappa = params.kappa.clamp(-1.0, 1.0);
    let phase = Complex64::new(kappa, (1.0 - kappa * kappa).max(0.0).sqrt());
    Ok((0..params.n)
        .map(|p| {
            let (v, ph) = if p == 0 { (big_v, phase) } else { (1.0, ONE) };
            LocalOperator::new(
                p,
                [
                    [ONE, ph * (v * params.cos(p))],
                    [Complex64::new(0.0, 0.0), ph * (v * params.sin(p))],
                ],
            )
        })
        .collect())
}

/// Normalized ket realizing `params`.
pub fn reconstruct_ket(params: &GhzClassParams) -> Result<Ket> {
    let ops = reconstruction_ops(params)?;
    let ghz = ghz_ket(params.n, ONE, ONE)?;
    apply_local(&ops, &ghz)?.0.normalize()
}

/// Outcome of inverting a three-qubit tangle tuple.
#[derive(Clone, Debug, PartialEq)]
pub enum Inversion {
    Feasible(GhzClassParams),
    /// The tuple needs `r < bound`, so no GHZ-class state realizes it.
    Infeasible { r: f64, bound: f64 },
}

impl Inversion {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Inversion::Feasible(_))
    }

    pub fn params(&self) -> Option<&GhzClassParams> {
        match self {
            Inversion::Feasible(p) => Some(p),
            Inversion::Infeasible { .. } => None,
        }
    }
}

/// Parameters (at `kappa = -1`) realizing `(x, y, z, t)`.
pub fn invert_tangles(tuple: &TangleTuple) -> Result<Inversion> {
    let TangleTuple { x, y, z, t } = *tuple;
    if !(x.is_finite() && y.is_finite() && z.is_finite() && t.is_finite()) {
        return Err(Error::Domain("non-finite tangle".into()));
    }
    if t <= tol::DEFAULT {
        return Err(Error::DegenerateBranch(t));
    }
    let t2 = t * t;
    let (nx, ny, nz) = ((t2 + x * x).sqrt(), (t2 + y * y).sqrt(), (t2 + z * z).sqrt());
    let r = (t2 + x * y * z) / (nx * ny * nz);
    if r < 1.0 - tol::DEFAULT {
        return Ok(Inversion::Infeasible { r, bound: 1.0 });
    }
    let phis = [x / nx, y / ny, z / nz]
        .iter()
        .map(|c| c.clamp(0.0, 1.0).acos())
        .collect();
    Ok(Inversion::Feasible(GhzClassParams::new(3, r.max(1.0), phis, -1.0)?))
}

/// `tau_A^2 - sum_{I containing A, |I| >= 2} tau_I^2` from the closed forms.
pub fn strong_monogamy_residual(params: &GhzClassParams, party: usize) -> Result<f64> {
    if params.n > 6 {
        return Err(Error::Size(format!("{} parties", params.n)));
    }
    let mut res = one_tangle_closed_form(params, party)?.powi(2);
    for subset in PartySet::all_subsets(params.n, 2) {
        if subset.contains(party) {
            res -= tangles_closed_form(params, subset)?.powi(2);
        }
    }
    Ok(res)
}

/// Achievability polynomial of the closed-form tuple and
/// `s1^2 s2^2 s3^2 (r^2 - 1) / D^4`, for three parties.
pub fn necessity_identity(params: &GhzClassParams) -> Result<(f64, f64)> {
    let tt = tangle_tuple_closed_form(params)?;
    let d = params.denominator()?;
    let s2: f64 = (0..3).map(|p| params.sin(p).powi(2)).product();
    let rhs = s2 * (params.r * params.r - 1.0) / d.powi(4);
    Ok((achievability_lhs(tt.x, tt.y, tt.z, tt.t), rhs))
}

/// Reduced state on the untouched parties of `(x)_{p in ops} M_p |GHZ_n>`.
///
/// The parties carrying an operator are traced out; the result lives on the
/// block `span{|0...0>, |1...1>}` of the rest, with coherence
/// `prod <col1, col0>` and normalized by its trace.
pub fn marginal_block(n: usize, traced_ops: &[LocalOperator]) -> Result<GhzBlock> {
    let traced = PartySet::from_parties(&traced_ops.iter().map(|o| o.party).collect::<Vec<_>>());
    if traced.len() != traced_ops.len() || !traced.is_subset_of(PartySet::full(n)) {
        return Err(Error::Arity {
            expected: n,
            got: traced_ops.len(),
        });
    }
    if traced.is_empty() || traced.len() == n {
        return Err(Error::Domain("at least one party must be traced and one kept".into()));
    }
    let (mut uu, mut vv, mut vu) = (1.0, 1.0, ONE);
    for op in traced_ops {
        let (c0, c1) = (op.col0(), op.col1());
        uu *= c0[0].norm_sqr() + c0[1].norm_sqr();
        vv *= c1[0].norm_sqr() + c1[1].norm_sqr();
        vu *= c1[0].conj() * c0[0] + c1[1].conj() * c0[1];
    }
    let tr = uu + vv;
    if tr <= tol::SINGULAR {
        return Err(Error::InvalidState("traced operators annihilate the state".into()));
    }
    Ok(GhzBlock {
        alpha: uu / tr,
        beta: vu / tr,
        gamma: vv / tr,
    })
}

/// Numerical `tau_I` of the ket built from `params`.
///
/// The full set uses the pure k-tangle and even subsets the mixed-state
/// Wootters value of the reduced state. Odd proper subsets are evaluated by
/// undoing the local operators on `I`, which maps the reduced state onto the
/// GHZ block, and scaling the block value `2|beta|` by `prod_{i in I} |det M_i|`.
pub fn numeric_subset_tangle(params: &GhzClassParams, subset: PartySet) -> Result<f64> {
    let ops = reconstruction_ops(params)?;
    let ghz = ghz_ket(params.n, ONE, ONE)?;
    let (raw, p) = apply_local(&ops, &ghz)?;
    let psi = raw.normalize()?;
    numeric_subset_tangle_of(&psi, &ops, p, subset)
}

/// As [`numeric_subset_tangle`] for `psi = (x) M_p |GHZ_n> / sqrt(p)`.
pub fn numeric_subset_tangle_of(
    psi: &Ket,
    ops: &[LocalOperator],
    _norm_sqr: f64,
    subset: PartySet,
) -> Result<f64> {
    let n = psi.n();
    if subset.len() < 2 || !subset.is_subset_of(PartySet::full(n)) {
        return Err(Error::Domain(format!("subset {subset} needs 2..={n} parties")));
    }
    if subset.len() == n {
        return k_tangle_pure(psi);
    }
    if subset.len().is_multiple_of(2) {
        return marginal_k_tangle(psi, subset);
    }
    let rho = partial_trace(psi, subset)?;
    let mut det = 1.0;
    let mut inv = Matrix::identity(1);
    for p in subset.parties() {
        let op = ops
            .iter()
            .find(|o| o.party == p)
            .ok_or(Error::Arity { expected: n, got: ops.len() })?;
        det *= op.det().norm();
        if det <= tol::SINGULAR {
            return Ok(0.0);
        }
        inv = inv.kron(&op.inverse()?.as_matrix());
    }
    let pulled = &(&inv * rho.matrix()) * &inv.adjoint();
    let block = GhzBlock::from_density(&DensityMatrix::from_parts_unchecked(rho.qubits().to_vec(), pulled))?;
    Ok(det * block.residual_tangle())
}
