//! Kets, density matrices, local operators and Haar sampling.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, Matrix};
use crate::tol;

/// Largest supported ket.
pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A set of parties encoded as a bitmask: bit `p` set means party `p` is in
/// the set. Iteration is ascending in party index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartySet(pub u32);

impl PartySet {
    pub fn from_parties(parties: &[usize]) -> Self {
        Self(parties.iter().fold(0, |m, &p| m | (1 << p)))
    }

    pub fn full(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub fn single(p: usize) -> Self {
        Self(1 << p)
    }

    pub fn contains(self, p: usize) -> bool {
        self.0 >> p & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn parties(self) -> Vec<usize> {
        (0..32).filter(|&p| self.contains(p)).collect()
    }

    pub fn complement(self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    pub fn without(self, p: usize) -> Self {
        Self(self.0 & !(1 << p))
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// All subsets of the `n` parties with at least `min_len` members, in
    /// ascending bitmask order.
    pub fn all_subsets(n: usize, min_len: usize) -> impl Iterator<Item = PartySet> {
        (1u32..(1u32 << n)).map(PartySet).filter(move |s| s.len() >= min_len)
    }
}

/// Party label: A, B, C, ...
pub fn party_label(p: usize) -> char {
    (b'A' + p as u8) as char
}

impl fmt::Display for PartySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.parties() {
            write!(f, "{}", party_label(p))?;
        }
        Ok(())
    }
}

/// Pure `n`-qubit state. Party `p` lives in bit `n - 1 - p` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    n: usize,
    amps: Vec<Complex64>,
    normalized: bool,
}

impl Ket {
    /// Wraps raw amplitudes without normalizing them.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Size(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
        }
        if amps.len() != 1 << n {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {n} qubits (expected {})",
                amps.len(),
                1usize << n
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let normalized = (amps.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() <= tol::NORM;
        Ok(Self { n, amps, normalized })
    }

    pub fn from_real(n: usize, amps: &[f64]) -> Result<Self> {
        Self::new(n, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n];
        *amps
            .get_mut(index)
            .ok_or_else(|| Error::Domain(format!("basis index {index} out of range")))? =
            Complex64::new(1.0, 0.0);
        Self::new(n, amps)
    }

    /// Returns the ket scaled to unit norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for z in &mut self.amps {
            *z /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "ket is not normalized (norm^2 = {})",
                self.norm_sqr()
            )))
        }
    }

    /// Reshapes the amplitudes into a `2^|keep| x 2^(n-|keep|)` matrix whose
    /// rows index the kept parties (ascending, first party most significant)
    /// and whose columns index the remaining parties in the same order.
    pub fn matricize(&self, keep: PartySet) -> Result<Matrix> {
        self.check_subset(keep)?;
        let kept = keep.parties();
        let rest = keep.complement(self.n).parties();
        let rows = 1 << kept.len();
        let cols = 1 << rest.len();
        let mut m = Matrix::zeros(rows, cols);
        for (idx, &amp) in self.amps.iter().enumerate() {
            let r = gather_bits(idx, self.n, &kept);
            let c = gather_bits(idx, self.n, &rest);
            m[(r, c)] = amp;
        }
        Ok(m)
    }

    /// Reorders the parties: party `order[q]` of `self` becomes party `q`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n || PartySet::from_parties(order) != PartySet::full(self.n) {
            return Err(Error::Domain(format!("{order:?} is not a permutation of 0..{}", self.n)));
        }
        let mut amps = vec![ZERO; self.dim()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            amps[gather_bits(idx, self.n, order)] = amp;
        }
        Ok(Self {
            n: self.n,
            amps,
            normalized: self.normalized,
        })
    }

    /// `|self> (x) |other>`, with the parties of `self` first.
    pub fn tensor(&self, other: &Ket) -> Result<Self> {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self::new(self.n + other.n, amps)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Ket) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    fn check_subset(&self, keep: PartySet) -> Result<()> {
        if keep.is_empty() {
            return Err(Error::Domain("empty party subset".into()));
        }
        if !keep.is_subset_of(PartySet::full(self.n)) {
            return Err(Error::Domain(format!("subset {keep} exceeds {} parties", self.n)));
        }
        Ok(())
    }
}

/// Packs the bits of `idx` belonging to `parties` (in the listed order, first
/// party most significant) into a compact index.
fn gather_bits(idx: usize, n: usize, parties: &[usize]) -> usize {
    parties
        .iter()
        .fold(0, |acc, &p| (acc << 1) | ((idx >> (n - 1 - p)) & 1))
}

/// Wire format for kets: `{"n": int, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KetJson {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&Ket> for KetJson {
    fn from(k: &Ket) -> Self {
        Self {
            n: k.n,
            amplitudes: k.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<KetJson> for Ket {
    type Error = Error;

    fn try_from(j: KetJson) -> Result<Self> {
        Ket::new(j.n, j.amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl Ket {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: KetJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ket::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&KetJson::from(self)).expect("ket serializes")
    }
}

/// Hermitian positive semidefinite matrix over an ordered list of parties.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: Vec<usize>,
    entries: Matrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(qubits: Vec<usize>, entries: Matrix) -> Result<Self> {
        let rho = Self::new_unnormalized(qubits, entries)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > tol::HERMITIAN {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(rho)
    }

    /// Validates Hermiticity and positivity only.
    pub fn new_unnormalized(qubits: Vec<usize>, entries: Matrix) -> Result<Self> {
        if !entries.is_square() || entries.rows() != 1 << qubits.len() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for {} qubits",
                entries.rows(),
                entries.cols(),
                qubits.len()
            )));
        }
        let defect = entries.hermitian_defect();
        if defect > tol::HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let rho = Self { qubits, entries };
        if rho.entries.rows() <= 64 {
            let min = *hermitian_eigenvalues(&rho.entries)?.last().unwrap();
            if min < -tol::PSD_CLAMP {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(qubits: Vec<usize>, entries: Matrix) -> Self {
        Self { qubits, entries }
    }

    /// `|psi><psi|` on the parties `0..n`.
    pub fn pure(psi: &Ket) -> Self {
        let a = psi.amplitudes();
        let m = Matrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        Self::from_parts_unchecked((0..psi.n()).collect(), m)
    }

    /// Probability mixture of pure states.
    pub fn mixture(terms: &[(f64, &Ket)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let n = first.1.n();
        let mut m = Matrix::zeros(1 << n, 1 << n);
        for &(w, k) in terms {
            if k.n() != n {
                return Err(Error::Arity { expected: n, got: k.n() });
            }
            m = m.add(&DensityMatrix::pure(k).entries.scale(Complex64::new(w, 0.0)));
        }
        Self::new((0..n).collect(), m)
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn k(&self) -> usize {
        self.qubits.len()
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }
}

/// 2x2 operator acting on a single party.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOperator {
    pub party: usize,
    pub m: [[Complex64; 2]; 2],
}

impl LocalOperator {
    pub fn new(party: usize, m: [[Complex64; 2]; 2]) -> Self {
        Self { party, m }
    }

    pub fn real(party: usize, m: [[f64; 2]; 2]) -> Self {
        Self::new(
            party,
            [
                [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
                [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
            ],
        )
    }

    pub fn identity(party: usize) -> Self {
        Self::real(party, [[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// First column.
    pub fn col0(&self) -> [Complex64; 2] {
        [self.m[0][0], self.m[1][0]]
    }

    /// Second column.
    pub fn col1(&self) -> [Complex64; 2] {
        [self.m[0][1], self.m[1][1]]
    }

    pub fn adjugate(&self) -> Self {
        Self::new(
            self.party,
            [[self.m[1][1], -self.m[0][1]], [-self.m[1][0], self.m[0][0]]],
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() <= tol::SINGULAR {
            return Err(Error::ClassExit {
                party: self.party,
                det: det.norm(),
            });
        }
        let adj = self.adjugate();
        Ok(Self::new(
            self.party,
            [
                [adj.m[0][0] / det, adj.m[0][1] / det],
                [adj.m[1][0] / det, adj.m[1][1] / det],
            ],
        ))
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_fn(2, 2, |i, j| self.m[i][j])
    }
}

/// Standard GHZ-type ket `a|0...0> + b|1...1>`, normalized.
pub fn ghz_ket(n: usize, a: Complex64, b: Complex64) -> Result<Ket> {
    if n == 0 {
        return Err(Error::Domain("GHZ ket needs at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Size(format!("{n} qubits")));
    }
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = a;
    *amps.last_mut().unwrap() += b;
    Ket::new(n, amps)?.normalize()
}

/// `(x)_p M_p |psi>` together with its squared norm `p`. The result is left
/// unnormalized.
pub fn apply_local(ops: &[LocalOperator], psi: &Ket) -> Result<(Ket, f64)> {
    let n = psi.n();
    if ops.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: ops.len(),
        });
    }
    let parties: Vec<usize> = ops.iter().map(|o| o.party).collect();
    if PartySet::from_parties(&parties) != PartySet::full(n) {
        return Err(Error::Arity {
            expected: n,
            got: PartySet::from_parties(&parties).len(),
        });
    }
    let mut amps = psi.amplitudes().to_vec();
    for op in ops {
        apply_single(&mut amps, n, op);
    }
    let p = amps.iter().map(|z| z.norm_sqr()).sum();
    let mut out = Ket::new(n, amps)?;
    out.normalized = false;
    Ok((out, p))
}

/// Applies operators to a subset of parties only; others are untouched.
pub fn apply_partial(ops: &[LocalOperator], psi: &Ket) -> Result<Ket> {
    let n = psi.n();
    let mut seen = PartySet(0);
    for op in ops {
        if op.party >= n || seen.contains(op.party) {
            return Err(Error::Arity {
                expected: n,
                got: ops.len(),
            });
        }
        seen = PartySet(seen.0 | 1 << op.party);
    }
    let mut amps = psi.amplitudes().to_vec();
    for op in ops {
        apply_single(&mut amps, n, op);
    }
    let mut out = Ket::new(n, amps)?;
    out.normalized = false;
    Ok(out)
}

fn apply_single(amps: &mut [Complex64], n: usize, op: &LocalOperator) {
    let bit = 1usize << (n - 1 - op.party);
    for i in 0..amps.len() {
        if i & bit != 0 {
            continue;
        }
        let j = i | bit;
        let (x0, x1) = (amps[i], amps[j]);
        amps[i] = op.m[0][0] * x0 + op.m[0][1] * x1;
        amps[j] = op.m[1][0] * x0 + op.m[1][1] * x1;
    }
}

/// Reduced density matrix of `psi` on the parties in `keep`.
pub fn partial_trace(psi: &Ket, keep: PartySet) -> Result<DensityMatrix> {
    let m = psi.matricize(keep)?;
    let rho = &m * &m.adjoint();
    Ok(DensityMatrix::from_parts_unchecked(keep.parties(), rho))
}

/// Reduced density matrix of `rho` on the labelled parties in `keep`, which
/// must be a subset of `rho.qubits()`.
pub fn partial_trace_density(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::Domain("empty party subset".into()));
    }
    let k = rho.k();
    let mut kept_pos = Vec::with_capacity(keep.len());
    for q in rho.qubits() {
        if keep.contains(q) {
            kept_pos.push(rho.qubits().iter().position(|x| x == q).unwrap());
        }
    }
    if kept_pos.len() != keep.len() {
        return Err(Error::Domain(format!("{keep:?} is not a subset of {:?}", rho.qubits())));
    }
    let rest_pos: Vec<usize> = (0..k).filter(|p| !kept_pos.contains(p)).collect();
    let dk = 1 << kept_pos.len();
    let mut out = Matrix::zeros(dk, dk);
    let dim = rho.dim();
    for i in 0..dim {
        for j in 0..dim {
            if gather_bits(i, k, &rest_pos) != gather_bits(j, k, &rest_pos) {
                continue;
            }
            let (a, b) = (gather_bits(i, k, &kept_pos), gather_bits(j, k, &kept_pos));
            out[(a, b)] += rho.entry(i, j);
        }
    }
    let labels = kept_pos.iter().map(|&p| rho.qubits()[p]).collect();
    Ok(DensityMatrix::from_parts_unchecked(labels, out))
}

/// Deterministic RNG for sample `index` of a run seeded with `seed`. Each
/// index owns an independent ChaCha stream, so results do not depend on how
/// samples are distributed over workers.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-random ket from i.i.d. standard complex Gaussian amplitudes.
pub fn haar_random_ket(n: usize, seed: u64) -> Ket {
    haar_sample(n, seed, 0)
}

/// Sample `index` of the Haar stream seeded with `seed`.
pub fn haar_sample(n: usize, seed: u64, index: u64) -> Ket {
    haar_from_rng(n, &mut sample_rng(seed, index))
}

pub fn haar_from_rng<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Ket {
    assert!((1..=MAX_QUBITS).contains(&n), "qubit count {n}");
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    Ket::new(n, amps)
        .and_then(Ket::normalize)
        .expect("Gaussian vector is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn w_state() -> Ket {
        let s = 1.0 / 3f64.sqrt();
        Ket::from_real(3, &[0.0, s, s, 0.0, s, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn ghz_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((g.amplitude(0).re - h).abs() < 1e-15);
        assert!((g.amplitude(7).re - h).abs() < 1e-15);
        assert!(g.is_normalized());

        let p = ghz_ket(2, c(1.0), c(0.0)).unwrap();
        assert_eq!(p.amplitude(0), c(1.0));

        let q = ghz_ket(3, c(1.0), c(2.0)).unwrap();
        assert!((q.amplitude(0).re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((q.amplitude(7).re - 2.0 / 5f64.sqrt()).abs() < 1e-15);

        assert!(matches!(ghz_ket(3, c(0.0), c(0.0)), Err(Error::InvalidState(_))));
    }

    #[test]
    fn single_qubit_ghz_adds_amplitudes() {
        let g = ghz_ket(1, c(1.0), c(1.0)).unwrap();
        assert!((g.amplitude(0).re - g.amplitude(1).re).abs() < 1e-15);
    }

    #[test]
    fn apply_local_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let ids: Vec<_> = (0..3).map(LocalOperator::identity).collect();
        let (out, p) = apply_local(&ids, &g).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(out.amplitudes().iter().zip(g.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));

        let mut ops = ids.clone();
        ops[0] = LocalOperator::real(0, [[1.0, 0.0], [0.0, 0.0]]);
        let (out, p) = apply_local(&ops, &g).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(out.amplitude(7).norm() == 0.0);
        assert!(!out.is_normalized());

        // direct tensor arithmetic: amplitudes (1, 8)/sqrt2, norm^2 = 65/2
        let d: Vec<_> = (0..3).map(|p| LocalOperator::real(p, [[1.0, 0.0], [0.0, 2.0]])).collect();
        let (out, p) = apply_local(&d, &g).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((out.amplitude(0).re - h).abs() < 1e-14);
        assert!((out.amplitude(7).re - 8.0 * h).abs() < 1e-14);
        assert!((p - 32.5).abs() < 1e-12);

        assert!(matches!(apply_local(&ids[..2], &g), Err(Error::Arity { .. })));
    }

    #[test]
    fn partial_trace_examples() {
        let g = ghz_ket(3, c(1.0), c(1.0)).unwrap();
        let a = partial_trace(&g, PartySet::single(0)).unwrap();
        assert!((a.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((a.entry(1, 1).re - 0.5).abs() < 1e-15);
        assert!(a.entry(0, 1).norm() < 1e-15);

        let ab = partial_trace(&g, PartySet::from_parties(&[0, 1])).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert!((ab.entry(i, j).re - want).abs() < 1e-15);
            }
        }

        // direct summation oracle for W on A
        let w = w_state();
        let mut oracle = [[0.0f64; 2]; 2];
        for (i, zi) in w.amplitudes().iter().enumerate() {
            for (j, zj) in w.amplitudes().iter().enumerate() {
                if (i & 3) == (j & 3) {
                    oracle[i >> 2][j >> 2] += (zi * zj.conj()).re;
                }
            }
        }
        let wa = partial_trace(&w, PartySet::single(0)).unwrap();
        assert!((wa.entry(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
        assert!((wa.entry(1, 1).re - 1.0 / 3.0).abs() < 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                assert!((wa.entry(i, j).re - oracle[i][j]).abs() < 1e-15);
            }
        }

        assert!(matches!(partial_trace(&g, PartySet(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn partial_trace_of_middle_party() {
        // |0>_A |1>_B |0>_C: keep B only
        let k = Ket::basis(3, 0b010).unwrap();
        let b = partial_trace(&k, PartySet::single(1)).unwrap();
        assert!((b.entry(1, 1).re - 1.0).abs() < 1e-15);
        let ac = partial_trace(&k, PartySet::from_parties(&[0, 2])).unwrap();
        assert!((ac.entry(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_partial_trace_composes() {
        let psi = haar_random_ket(4, 11);
        let abc = partial_trace(&psi, PartySet::from_parties(&[0, 1, 3])).unwrap();
        let direct = partial_trace(&psi, PartySet::from_parties(&[0, 3])).unwrap();
        let two_step = partial_trace_density(&abc, &[0, 3]).unwrap();
        assert_eq!(two_step.qubits(), &[0, 3]);
        assert!(direct.matrix().max_abs_diff(two_step.matrix()) < 1e-14);
    }

    #[test]
    fn haar_is_reproducible_and_seed_sensitive() {
        let a = haar_random_ket(3, 5);
        let b = haar_random_ket(3, 5);
        let c = haar_random_ket(3, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_normalized());
        assert_ne!(haar_sample(3, 5, 0), haar_sample(3, 5, 1));
    }

    #[test]
    fn haar_marginal_mean() {
        // E|psi_0|^2 = 1/8, Var = (1/8)(7/8)/(8+1) for Haar on C^8
        let samples = 100_000;
        let mean: f64 = (0..samples)
            .map(|i| haar_sample(3, 99, i).amplitude(0).norm_sqr())
            .sum::<f64>()
            / samples as f64;
        let sigma = ((1.0 / 8.0) * (7.0 / 8.0) / 9.0 / samples as f64).sqrt();
        assert!((mean - 0.125).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn ket_json_round_trip_and_errors() {
        let g = ghz_ket(2, c(1.0), c(1.0)).unwrap();
        let back = Ket::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert!(Ket::from_json(r#"{"n": 2, "amplitudes": [[1,0],[0,0]]}"#).is_err());
        assert!(matches!(Ket::from_json("{\"n\": 2,"), Err(Error::Parse(_))));
    }

    #[test]
    fn permute_moves_parties() {
        let k = Ket::basis(3, 0b100).unwrap();
        let p = k.permute(&[1, 2, 0]).unwrap();
        assert_eq!(p.amplitude(0b001), c(1.0));
    }

    #[test]
    fn density_validation() {
        let bad = Matrix::from_real_diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(vec![0], bad).is_err());
        let ok = Matrix::from_real_diag(&[0.25, 0.75]);
        assert!(DensityMatrix::new(vec![0], ok).is_ok());
    }
}
