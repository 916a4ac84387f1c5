//! Levi-Civita product operators.
//!
//! For even `k` the operator acts on `k` qubits with entries
//! `prod_l eps(i_l, j_l)`. For odd `k` it acts on the doubled space of `2k`
//! qubits (a ket tensored with itself) with entries
//! `eps(i_0, i_k) eps(j_0, j_k) prod_{l=1}^{k-1} eps(i_l, j_l) eps(i_{k+l}, j_{k+l})`.
//! Bit `l` of an index is the qubit in position `l` under the crate-wide
//! convention (position 0 is the most significant bit).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Largest `k` for which the dense operator is built.
pub const MAX_K: usize = 6;

/// Two-index Levi-Civita symbol on {0, 1}.
#[inline]
pub fn eps(a: usize, b: usize) -> i8 {
    match (a, b) {
        (0, 1) => 1,
        (1, 0) => -1,
        _ => 0,
    }
}

/// Dense signed operator with entries in {-1, 0, 1}.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonOperator {
    pub k: usize,
    pub parity: Parity,
    dim: usize,
    entries: Vec<i8>,
}

impl EpsilonOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.dim + j]
    }

    /// `v^T Theta w` (no conjugation).
    pub fn bilinear(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        assert_eq!(v.len(), self.dim);
        assert_eq!(w.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            for (j, &e) in row.iter().enumerate() {
                if e != 0 {
                    acc += v[i] * w[j] * f64::from(e);
                }
            }
        }
        acc
    }

    pub fn nonzeros_in_row(&self, i: usize) -> usize {
        self.entries[i * self.dim..(i + 1) * self.dim]
            .iter()
            .filter(|&&e| e != 0)
            .count()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.entry(i, j) == self.entry(j, i)))
    }
}

#[inline]
fn bit(idx: usize, width: usize, l: usize) -> usize {
    (idx >> (width - 1 - l)) & 1
}

/// Builds the dense operator for `k` qubits of the requested parity.
pub fn build_theta(k: usize, parity: Parity) -> Result<EpsilonOperator> {
    match parity {
        Parity::Even if k < 2 || !k.is_multiple_of(2) => {
            return Err(Error::Domain(format!("even operator needs even k >= 2, got {k}")))
        }
        Parity::Odd if k < 3 || k % 2 != 1 => {
            return Err(Error::Domain(format!("odd operator needs odd k >= 3, got {k}")))
        }
        _ => {}
    }
    if k > MAX_K {
        return Err(Error::Size(format!("k = {k} exceeds {MAX_K}")));
    }
    let width = match parity {
        Parity::Even => k,
        Parity::Odd => 2 * k,
    };
    let dim = 1usize << width;
    let mut entries = vec![0i8; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let e = match parity {
                Parity::Even => (0..k).map(|l| eps(bit(i, width, l), bit(j, width, l))).product(),
                Parity::Odd => {
                    let ends = eps(bit(i, width, 0), bit(i, width, k))
                        * eps(bit(j, width, 0), bit(j, width, k));
                    (1..k)
                        .map(|l| {
                            eps(bit(i, width, l), bit(j, width, l))
                                * eps(bit(i, width, k + l), bit(j, width, k + l))
                        })
                        .fold(ends, |a, b| a * b)
                }
            };
            entries[i * dim + j] = e;
        }
    }
    Ok(EpsilonOperator {
        k,
        parity,
        dim,
        entries,
    })
}

/// Sign of the single nonzero entry in row `i` of the even operator; the
/// column is `!i` restricted to `k` bits.
#[inline]
pub fn theta_plus_sign(i: usize) -> f64 {
    if i.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `v^T Theta+ w` for vectors of length `2^k` without building the matrix.
pub fn theta_plus_bilinear(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    let mask = v.len() - 1;
    v.iter()
        .enumerate()
        .map(|(i, vi)| vi * w[!i & mask] * theta_plus_sign(i))
        .sum()
}

/// `Theta+ w` without building the matrix.
pub fn theta_plus_apply(w: &[Complex64]) -> Vec<Complex64> {
    let mask = w.len() - 1;
    (0..w.len()).map(|i| w[!i & mask] * theta_plus_sign(i)).collect()
}

/// `<psi*|<psi*| Theta- |psi>|psi>` for a `k`-qubit ket (odd `k`), evaluated
/// by enumerating the nonzero entries only.
pub fn theta_minus_quartic(psi: &[Complex64], k: usize) -> Complex64 {
    let width = 2 * k;
    let low = (1usize << k) - 1;
    let amp = |idx: usize| psi[idx >> k] * psi[idx & low];
    // Flipping every position except 0 and k.
    let pos0 = 1usize << (width - 1);
    let posk = 1usize << (k - 1);
    let full = (1usize << width) - 1;
    let flip = full & !pos0 & !posk;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..(1usize << width) {
        let (i0, ik) = (bit(i, width, 0), bit(i, width, k));
        let e_i = eps(i0, ik);
        if e_i == 0 {
            continue;
        }
        let inner = i & flip;
        let sign = if inner.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let base = (i ^ flip) & flip;
        // (j0, jk) = (0, 1) contributes +1, (1, 0) contributes -1
        let j01 = base | posk;
        let j10 = base | pos0;
        acc += amp(i) * f64::from(e_i) * sign * (amp(j01) - amp(j10));
    }
    acc
}
