//! Online clustering of neighbors for node-varying filters.
//!
//! After the adaptation step node `k` compares each neighbor's intermediate
//! estimate `ψ_ℓ(i+1)` against its own previous estimate `h_k(i)` on the
//! `M_k` coefficients that carry most of its regressor energy. The binary
//! outcome feeds an exponentially smoothed trust level, and neighbors whose
//! trust reaches `θ` take part in the combination.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::adapt::{Combination, Preconditioner};
use crate::error::{Error, Result};

/// Below this squared norm of `h'_k` the normalized distance is undefined.
pub const ZERO_NORM_GUARD: f64 = 1e-12;

/// Which distance decides the similarity bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Similarity {
    /// `‖ψ'_ℓ − h'_k‖² / ‖h'_k‖²` over the `M_k` selected entries.
    Normalized,
    /// `‖ψ_ℓ − h_k‖²` over all `M` entries.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Explained-variance level for `M_k`.
    pub tau: f64,
    /// Distance threshold.
    pub beta: f64,
    /// Trust threshold.
    pub theta: f64,
    /// Trust forgetting factor.
    pub nu: f64,
    pub similarity: Similarity,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            tau: 0.9,
            beta: 0.01,
            theta: 0.5,
            nu: 0.98,
            similarity: Similarity::Normalized,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.into(),
            })
        };
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau", "must lie in (0, 1]");
        }
        if !(self.beta > 0.0) {
            return bad("beta", "must be positive");
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad("theta", "must lie in (0, 1]");
        }
        if !(self.nu >= 0.0 && self.nu < 1.0) {
            return bad("nu", "must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Smallest `M_k` whose share of `Σ p` reaches `τ`, and the selected
/// 0-based indices in decreasing-`p` order.
///
/// Ties keep their original order. An all-zero `p` selects everything.
pub fn select_mk(p: &[f64], tau: f64) -> (usize, Vec<usize>) {
    let total: f64 = p.iter().sum();
    let mut order: Vec<usize> = (0..p.len()).collect();
    if !(total > 0.0) {
        return (p.len(), order);
    }
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    let mut cum = 0.0;
    for (count, &idx) in order.iter().enumerate() {
        cum += p[idx];
        // guard against the last share landing a hair under τ = 1
        if cum / total >= tau || count + 1 == p.len() {
            order.truncate(count + 1);
            return (count + 1, order);
        }
    }
    (p.len(), order)
}

/// Normalized similarity on the selected entries; `None` while `‖h'_k‖²`
/// is below [`ZERO_NORM_GUARD`].
pub fn similarity_bit(psi_l: &[f64], h_k: &[f64], indices: &[usize], beta: f64) -> Option<bool> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &m in indices {
        let d = psi_l[m] - h_k[m];
        num += d * d;
        den += h_k[m] * h_k[m];
    }
    (den >= ZERO_NORM_GUARD).then(|| num / den <= beta)
}

/// Unnormalized similarity over all entries.
pub fn similarity_bit_raw(psi_l: &[f64], h_k: &[f64], beta: f64) -> bool {
    let dist: f64 = psi_l
        .iter()
        .zip(h_k)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    dist <= beta
}

/// `t(i) = ν t(i−1) + (1−ν) b(i)`.
pub fn update_trust(previous: f64, bit: bool, nu: f64) -> f64 {
    nu * previous + (1.0 - nu) * if bit { 1.0 } else { 0.0 }
}

/// `[E]_{ℓk} = 1` iff `ℓ ∈ 𝓝_k` and `t_{ℓk} ≥ θ`, with the diagonal always
/// set; also returns the active sets `𝓝_{k,i}`.
pub fn update_cluster_matrix(
    trust: &DMatrix<f64>,
    neighborhoods: &[Vec<usize>],
    theta: f64,
) -> (DMatrix<u8>, Vec<Vec<usize>>) {
    let n = neighborhoods.len();
    let mut e = DMatrix::zeros(n, n);
    let mut sets = Vec::with_capacity(n);
    for (k, nb) in neighborhoods.iter().enumerate() {
        let mut set = Vec::with_capacity(nb.len());
        for &l in nb {
            if l == k || trust[(l, k)] >= theta {
                e[(l, k)] = 1;
                set.push(l);
            }
        }
        if !set.contains(&k) {
            e[(k, k)] = 1;
            set.push(k);
            set.sort_unstable();
        }
        sets.push(set);
    }
    (e, sets)
}

/// Trust levels, clustering matrix and truncation sets of a network.
#[derive(Debug, Clone)]
pub struct ClusterState {
    params: ClusterParams,
    neighborhoods: Vec<Vec<usize>>,
    trust: DMatrix<f64>,
    bits: DMatrix<u8>,
    e: DMatrix<u8>,
    active: Vec<Vec<usize>>,
    selected: Vec<Vec<usize>>,
    order: usize,
}

impl ClusterState {
    /// Starts non-cooperative: `t_{ℓk}(−1) = 0` off the diagonal, 1 on it.
    pub fn new(
        neighborhoods: Vec<Vec<usize>>,
        preconditioner: &Preconditioner,
        params: ClusterParams,
    ) -> Result<Self> {
        params.validate()?;
        let n = neighborhoods.len();
        if preconditioner.n_nodes() != n {
            return Err(Error::Dimension {
                what: "preconditioner nodes",
                expected: n,
                got: preconditioner.n_nodes(),
            });
        }
        if let Some(k) = (0..n).find(|&k| neighborhoods[k].iter().any(|&l| l >= n)) {
            return Err(Error::InvalidParameter {
                name: "neighborhoods",
                reason: format!("node {k} lists a neighbor outside 0..{n}"),
            });
        }
        let trust = DMatrix::identity(n, n);
        let (e, active) = update_cluster_matrix(&trust, &neighborhoods, params.theta);
        let mut state = Self {
            params,
            neighborhoods,
            trust,
            bits: DMatrix::zeros(n, n),
            e,
            active,
            selected: Vec::new(),
            order: preconditioner.order(),
        };
        state.set_preconditioner(preconditioner);
        Ok(state)
    }

    /// Recomputes `M_k` after a change of shift operator.
    pub fn set_preconditioner(&mut self, preconditioner: &Preconditioner) {
        self.order = preconditioner.order();
        self.selected = (0..self.neighborhoods.len())
            .map(|k| match self.params.similarity {
                Similarity::Normalized => select_mk(preconditioner.diagonal(k), self.params.tau).1,
                Similarity::Raw => (0..self.order).collect(),
            })
            .collect();
    }

    pub fn params(&self) -> &ClusterParams {
        &self.params
    }

    pub fn n_nodes(&self) -> usize {
        self.neighborhoods.len()
    }

    /// `t_{ℓk}` at `(ℓ, k)`.
    pub fn trust(&self) -> &DMatrix<f64> {
        &self.trust
    }

    /// `[E_i]_{ℓk}` at `(ℓ, k)`.
    pub fn e_matrix(&self) -> &DMatrix<u8> {
        &self.e
    }

    pub fn active_sets(&self) -> &[Vec<usize>] {
        &self.active
    }

    pub fn mk(&self, k: usize) -> usize {
        self.selected[k].len()
    }

    pub fn selected_indices(&self, k: usize) -> &[usize] {
        &self.selected[k]
    }

    /// Updates bits, trust and `E_i` from the intermediate estimates `ψ` and
    /// the estimates `h` before adaptation (both row-major `N×M`).
    pub fn update(&mut self, psi: &[f64], h_prev: &[f64]) {
        let m = self.order;
        let n = self.neighborhoods.len();
        for k in 0..n {
            let hk = &h_prev[k * m..(k + 1) * m];
            for &l in &self.neighborhoods[k] {
                if l == k {
                    continue;
                }
                let psi_l = &psi[l * m..(l + 1) * m];
                let bit = match self.params.similarity {
                    Similarity::Normalized => {
                        similarity_bit(psi_l, hk, &self.selected[k], self.params.beta)
                            .unwrap_or(self.bits[(l, k)] == 1)
                    }
                    Similarity::Raw => similarity_bit_raw(psi_l, hk, self.params.beta),
                };
                self.bits[(l, k)] = bit as u8;
                self.trust[(l, k)] = update_trust(self.trust[(l, k)], bit, self.params.nu);
            }
        }
        let (e, active) = update_cluster_matrix(&self.trust, &self.neighborhoods, self.params.theta);
        self.e = e;
        self.active = active;
    }

    /// Uniform combination over the current active sets.
    pub fn combination(&self) -> Combination {
        Combination::uniform(&self.active)
    }

    /// Resets trust to the non-cooperative start.
    pub fn reset(&mut self) {
        let n = self.neighborhoods.len();
        self.trust = DMatrix::identity(n, n);
        self.bits = DMatrix::zeros(n, n);
        let (e, active) = update_cluster_matrix(&self.trust, &self.neighborhoods, self.params.theta);
        self.e = e;
        self.active = active;
    }
}

/// Intra-cluster neighbor relations: `[E°]_{ℓk} = 1` iff `ℓ ∈ 𝓝_k` and both
/// nodes carry the same label.
pub fn ground_truth_matrix(neighborhoods: &[Vec<usize>], labels: &[usize]) -> DMatrix<u8> {
    let n = neighborhoods.len();
    let mut e = DMatrix::zeros(n, n);
    for (k, nb) in neighborhoods.iter().enumerate() {
        for &l in nb {
            if labels[l] == labels[k] {
                e[(l, k)] = 1;
            }
        }
    }
    e
}

/// Ones at `(ℓ, k)` for every `ℓ ∈ 𝓝_k`; handy as an all-trusting start.
pub fn full_trust(neighborhoods: &[Vec<usize>]) -> DMatrix<f64> {
    let n = neighborhoods.len();
    let mut t = DMatrix::zeros(n, n);
    for (k, nb) in neighborhoods.iter().enumerate() {
        for &l in nb {
            t[(l, k)] = 1.0;
        }
        t[(k, k)] = 1.0;
    }
    t
}
