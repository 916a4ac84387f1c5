//! Subcommand bodies. Each returns a JSON report and an exit status so the
//! binary only has to parse arguments and print.

use serde::Serialize;
use serde_json::{json, Value};
use tangle::constraints::{
    achievability_lhs, assistance_boundary, completed_square_margin, eigenvalue_from_tangles,
    marginal_triangle_margins, steiner_margin, SteinerMode,
};
use tangle::ghz::{
    invert_tangles, one_tangle_closed_form, reconstruct_ket, tangles_closed_form, GhzClassParams, Inversion,
};
use tangle::state::{partial_trace, PartySet};
use tangle::tangles::{
    k_tangle_pure, marginal_k_tangle, one_tangle, GhzBlock, TangleTuple,
};
use tangle::theta::MAX_K;
use tangle::{DensityMatrix, Error, Ket};

use crate::error::{HarnessError, Result};
use crate::roof::{convex_roof_bruteforce_with, RoofConfig};

/// Exit status of a completed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct SubsetTangle {
    subset: u32,
    label: String,
    tangle: Option<f64>,
}

fn subset_entry(s: PartySet, tangle: Option<f64>) -> SubsetTangle {
    SubsetTangle {
        subset: s.0,
        label: s.to_string(),
        tangle,
    }
}

/// Every subset tangle with `|I| >= 2` and every 1-tangle of `psi`. Odd
/// proper subsets have no general closed formula and are reported as `null`.
pub fn tangles_report(psi: &Ket) -> Result<Value> {
    let n = psi.n();
    if n > MAX_K {
        return Err(Error::Size(format!("{n} qubits (at most {MAX_K})")).into());
    }
    let full = PartySet::full(n);
    let mut subsets = Vec::new();
    for s in PartySet::all_subsets(n, 2) {
        let v = if s == full {
            Some(k_tangle_pure(psi)?)
        } else if s.len() % 2 == 0 {
            Some(marginal_k_tangle(psi, s)?)
        } else {
            None
        };
        subsets.push(subset_entry(s, v));
    }
    let ones = (0..n)
        .map(|p| Ok(subset_entry(PartySet::single(p), Some(one_tangle(psi, p)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "n": n, "tangles": subsets, "one_tangles": ones }))
}

/// Closed-form tangles of a GHZ-class parameter set, plus the reconstructed
/// ket when `with_ket` is set.
pub fn ghz_report(params: &GhzClassParams, with_ket: bool) -> Result<Value> {
    params.validate()?;
    let subsets = PartySet::all_subsets(params.n, 2)
        .map(|s| Ok(subset_entry(s, Some(tangles_closed_form(params, s)?))))
        .collect::<Result<Vec<_>>>()?;
    let ones = (0..params.n)
        .map(|p| Ok(subset_entry(PartySet::single(p), Some(one_tangle_closed_form(params, p)?))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = json!({
        "params": serde_json::from_str::<Value>(&params.to_json()).expect("params serialize"),
        "tangles": subsets,
        "one_tangles": ones,
    });
    if with_ket {
        let ket = reconstruct_ket(params)?;
        out["ket"] = serde_json::from_str(&ket.to_json()).expect("ket serializes");
    }
    Ok(out)
}

/// Feasibility of a three-qubit tuple: margins of every constraint, the
/// triangle margins of the implied marginal eigenvalues and, for feasible
/// tuples with `t > 0`, a GHZ-class witness.
pub fn check_report(tuple: &TangleTuple, tol: f64) -> (Value, Status) {
    let TangleTuple { x, y, z, t } = *tuple;
    let lhs = achievability_lhs(x, y, z, t);
    let lift = |v: f64| (v * v + t * t).sqrt();
    let feasible = lhs >= -tol;
    let eig = [
        eigenvalue_from_tangles(z, y, t),
        eigenvalue_from_tangles(z, x, t),
        eigenvalue_from_tangles(y, x, t),
    ];
    let triangle = match eig {
        [Ok(a), Ok(b), Ok(c)] => {
            let m = marginal_triangle_margins(a, b, c);
            json!({ "eigenvalues": [a, b, c], "margins": m.margins, "min": m.min() })
        }
        _ => Value::Null,
    };
    let witness = if feasible {
        match invert_tangles(tuple) {
            Ok(Inversion::Feasible(p)) => json!({ "r": p.r, "phis": p.phis, "kappa": p.kappa }),
            Ok(Inversion::Infeasible { r, bound }) => json!({ "infeasible": { "r": r, "bound": bound } }),
            Err(Error::DegenerateBranch(_)) => json!("boundary-degenerate"),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let report = json!({
        "input": [x, y, z, t],
        "feasible": feasible,
        "boundary": lhs.abs() <= tol,
        "margins": {
            "achievability": lhs,
            "completed-square": completed_square_margin(x, y, z, t),
            "assistance": assistance_boundary(lift(x), lift(y), lift(z), t),
            "steiner-convex": steiner_margin(x, y, z, SteinerMode::Convex),
            "steiner-concave": steiner_margin(lift(x), lift(y), lift(z), SteinerMode::Concave),
        },
        "triangle": triangle,
        "witness": witness,
    });
    let status = if feasible { Status::Ok } else { Status::Violation };
    (report, status)
}

/// Inversion of a tuple to canonical GHZ-class parameters.
pub fn invert_report(tuple: &TangleTuple) -> Result<(Value, Status)> {
    Ok(match invert_tangles(tuple)? {
        Inversion::Feasible(p) => (
            serde_json::from_str(&p.to_json()).expect("params serialize"),
            Status::Ok,
        ),
        Inversion::Infeasible { r, bound } => (json!({ "infeasible": { "r": r, "bound": bound } }), Status::Violation),
    })
}

/// Where the roof command takes its density matrix from.
#[derive(Clone, Debug)]
pub enum RoofInput {
    /// Reduced state of a ket on the given parties.
    Marginal(Ket, PartySet),
    /// GHZ block on `k` qubits.
    Block { block: GhzBlock, k: usize },
}

pub fn roof_report(input: &RoofInput, cfg: &RoofConfig) -> Result<Value> {
    let rho: DensityMatrix = match input {
        RoofInput::Marginal(psi, keep) => partial_trace(psi, *keep)?,
        RoofInput::Block { block, k } => block.to_density(*k)?,
    };
    let est = convex_roof_bruteforce_with(&rho, cfg)?;
    let closed = tangle::tangles::roots_rank2(&rho).ok();
    Ok(json!({
        "k": rho.k(),
        "convex": est.convex,
        "concave": est.concave,
        "closed_form": closed.map(|r| json!({ "convex": r.convex, "concave": r.concave })),
    }))
}

/// Parses party labels such as `AB` or `BD`.
pub fn parse_parties(s: &str, n: usize) -> Result<PartySet> {
    let mut parties = Vec::new();
    for ch in s.chars() {
        let p = (ch.to_ascii_uppercase() as u8).wrapping_sub(b'A') as usize;
        if p >= n {
            return Err(HarnessError::Usage(format!("party '{ch}' outside {n} qubits")));
        }
        parties.push(p);
    }
    Ok(PartySet::from_parties(&parties))
}
