//! Adaptive estimators for graph-filter coefficients.
//!
//! Centralized pieces (moments, Wiener solution, graph-LMS) sit next to the
//! adapt-then-combine diffusion family. All diffusion variants share one
//! combination step and differ only in how the local gradient is scaled:
//!
//! | variant        | adaptation scaling                        |
//! |----------------|-------------------------------------------|
//! | LMS            | `μ_k`                                     |
//! | LMS-Newton     | `μ_k (εI + R̂_{z,k}(i))^{-1}`              |
//! | preconditioned | `μ_k D_k`, `D_k = (εI + P_k)^{-1}`        |
//! | ε-NLMS         | `μ_k / (‖z_k‖² + ε)`                      |

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filter::FilterModel;
use crate::linalg;
use crate::signal::SignalStatistics;

/// Default forgetting factor of the Hessian estimate in LMS-Newton.
pub const DEFAULT_HESSIAN_FACTOR: f64 = 0.05;

/// Local covariances `R_{z,k}` for every node.
///
/// `[R_{z,k}]_{m,n} = r_m^T R_x(n − m) r_n` with `r_m` the `k`-th row of
/// `S^m`.
pub fn local_covariances(
    s: &DMatrix<f64>,
    stats: &SignalStatistics,
    order: usize,
) -> Result<Vec<DMatrix<f64>>> {
    let n = s.nrows();
    if stats.n_nodes() != n {
        return Err(Error::Dimension {
            what: "signal statistics size",
            expected: n,
            got: stats.n_nodes(),
        });
    }
    let powers = linalg::shift_powers(s, order);
    // lags −(M−1)..=(M−1), index lag + M − 1
    let lags: Vec<Option<DMatrix<f64>>> = (0..(2 * order).saturating_sub(1))
        .map(|idx| {
            let lag = idx as isize - (order as isize - 1);
            let r = stats.rx(lag);
            (r.amax() != 0.0).then_some(r)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let rows: Vec<DVector<f64>> = powers.iter().map(|p| p.row(k).transpose()).collect();
        let mut r = DMatrix::zeros(order, order);
        for a in 0..order {
            for b in a..order {
                let idx = (b as isize - a as isize + order as isize - 1) as usize;
                let v = match &lags[idx] {
                    Some(rx) => rows[a].dot(&(rx * &rows[b])),
                    None => 0.0,
                };
                r[(a, b)] = v;
                r[(b, a)] = v;
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// `R_{z,k}` for a single node.
pub fn local_covariance(
    s: &DMatrix<f64>,
    stats: &SignalStatistics,
    k: usize,
    order: usize,
) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if k >= n {
        return Err(Error::Dimension {
            what: "node index",
            expected: n,
            got: k,
        });
    }
    Ok(local_covariances(s, stats, order)?.swap_remove(k))
}

/// Global second-order moments of the centralized problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMoments {
    pub r_z: DMatrix<f64>,
    pub r_zy: DVector<f64>,
    /// Smallest eigenvalue of `R_Z`; values below `−1e−10` indicate a
    /// numerically indefinite matrix and should be reported.
    pub min_eigenvalue: f64,
}

impl GlobalMoments {
    pub fn is_numerically_indefinite(&self) -> bool {
        self.min_eigenvalue < -1e-10
    }
}

/// `R_Z = Σ_k R_{z,k}` and `r_{Zy} = Σ_k R_{z,k} h°_k`.
///
/// The cross-correlation follows from the data model with noise independent
/// of the input.
pub fn compute_global_moments(
    s: &DMatrix<f64>,
    stats: &SignalStatistics,
    filter: &FilterModel,
) -> Result<GlobalMoments> {
    let order = filter.order();
    filter.check_nodes(s.nrows())?;
    let locals = local_covariances(s, stats, order)?;
    let mut r_z = DMatrix::zeros(order, order);
    let mut r_zy = DVector::zeros(order);
    for (k, r) in locals.iter().enumerate() {
        r_z += r;
        r_zy += r * DVector::from_column_slice(filter.coefficients(k));
    }
    let min_eigenvalue = r_z.clone().symmetric_eigen().eigenvalues.min();
    Ok(GlobalMoments {
        r_z,
        r_zy,
        min_eigenvalue,
    })
}

/// How the centralized normal equations are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMode {
    Exact,
    GradientDescent { step: f64, iterations: usize },
}

/// Solves `R_Z h = r_{Zy}`.
pub fn centralized_solution(
    r_z: &DMatrix<f64>,
    r_zy: &DVector<f64>,
    mode: SolveMode,
) -> Result<DVector<f64>> {
    let m = r_z.nrows();
    if r_z.ncols() != m || r_zy.len() != m {
        return Err(Error::Dimension {
            what: "normal equations",
            expected: m,
            got: r_zy.len(),
        });
    }
    match mode {
        SolveMode::Exact => {
            let eig = r_z.clone().symmetric_eigen();
            let (lo, hi) = (eig.eigenvalues.amin(), eig.eigenvalues.amax());
            if hi == 0.0 || lo <= hi * 1e-14 {
                return Err(Error::Singular {
                    context: "R_Z in the exact Wiener solve",
                });
            }
            r_z.clone()
                .lu()
                .solve(r_zy)
                .ok_or(Error::Singular { context: "R_Z" })
        }
        SolveMode::GradientDescent { step, iterations } => {
            let lambda_max = linalg::lambda_max_symmetric(r_z);
            if !(step > 0.0 && step < 2.0 / lambda_max) {
                return Err(Error::InvalidParameter {
                    name: "step",
                    reason: format!("need 0 < μ < 2/λ_max = {}", 2.0 / lambda_max),
                });
            }
            let mut h = DVector::zeros(m);
            for _ in 0..iterations {
                h += (r_zy - r_z * &h) * step;
            }
            Ok(h)
        }
    }
}

/// Centralized graph-LMS: `h ← h + μ Z^T (y − Z h)`.
pub fn centralized_lms_step(h: &mut DVector<f64>, z: &DMatrix<f64>, y: &DVector<f64>, mu: f64) {
    let e = y - z * &*h;
    *h += z.transpose() * e * mu;
}

/// Diagonal preconditioner data: `[p_k]_m = ‖[S^m]_{k,•}‖²`, row-major `N×M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Preconditioner {
    order: usize,
    p: Vec<f64>,
}

impl Preconditioner {
    /// Wraps precomputed diagonals, row-major `N×M`.
    pub fn from_diagonals(order: usize, p: Vec<f64>) -> Result<Self> {
        if order == 0 || p.len() % order != 0 {
            return Err(Error::Dimension {
                what: "preconditioner diagonals",
                expected: order.max(1) * (p.len() / order.max(1)).max(1),
                got: p.len(),
            });
        }
        if let Some(v) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "preconditioner",
                reason: format!("diagonal entry {v} is not a nonnegative number"),
            });
        }
        Ok(Self { order, p })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.p.len() / self.order
    }

    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.p[k * self.order..(k + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Squared row norms of `S^0 … S^{M−1}`.
///
/// Rows are advanced as `[S^m]_{k,•} = [S^{m−1}]_{k,•} S`, which is what a
/// node can compute from its `M`-hop neighborhood.
pub fn compute_preconditioner(s: &DMatrix<f64>, order: usize) -> Preconditioner {
    let n = s.nrows();
    let mut p = vec![0.0; n * order];
    for k in 0..n {
        let mut row = DVector::zeros(n).transpose();
        row[k] = 1.0;
        for m in 0..order {
            if m > 0 {
                row = &row * s;
            }
            p[k * order + m] = row.norm_squared();
        }
    }
    Preconditioner { order, p }
}

/// `D_k = (εI + P_k)^{-1}` as its diagonal.
pub fn d_matrix(p_k: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    p_k.iter()
        .map(|p| {
            let denom = epsilon + p;
            if denom > 0.0 {
                Ok(1.0 / denom)
            } else {
                Err(Error::InvalidParameter {
                    name: "epsilon",
                    reason: format!("ε + p = {denom} is not positive"),
                })
            }
        })
        .collect()
}

/// Left-stochastic combination matrix stored by column.
///
/// Column `k` lists `(ℓ, a_{ℓk})` for the nodes whose intermediate estimates
/// node `k` averages.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    columns: Vec<Vec<(usize, f64)>>,
    fallbacks: Vec<usize>,
}

impl Combination {
    /// `a_{ℓk} = 1/|𝓝_k|` over each active set.
    ///
    /// Node `k` is always part of its own set; an empty set falls back to
    /// `{k}` and is listed in [`Combination::fallbacks`].
    pub fn uniform(active_sets: &[Vec<usize>]) -> Self {
        let mut fallbacks = Vec::new();
        let columns = active_sets
            .iter()
            .enumerate()
            .map(|(k, set)| {
                let mut members = set.clone();
                if members.is_empty() {
                    fallbacks.push(k);
                }
                if !members.contains(&k) {
                    members.push(k);
                }
                members.sort_unstable();
                members.dedup();
                let w = 1.0 / members.len() as f64;
                members.into_iter().map(|l| (l, w)).collect()
            })
            .collect();
        Self { columns, fallbacks }
    }

    /// `A = I`.
    pub fn identity(n: usize) -> Self {
        Self {
            columns: (0..n).map(|k| vec![(k, 1.0)]).collect(),
            fallbacks: Vec::new(),
        }
    }

    /// Wraps an explicit matrix, checking left-stochasticity.
    pub fn from_matrix(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let mut columns = Vec::with_capacity(n);
        for k in 0..n {
            let col: Vec<(usize, f64)> = (0..n)
                .filter_map(|l| {
                    let w = a[(l, k)];
                    (w != 0.0).then_some((l, w))
                })
                .collect();
            let sum: f64 = col.iter().map(|c| c.1).sum();
            if (sum - 1.0).abs() > 1e-12 || col.iter().any(|c| c.1 < 0.0) {
                return Err(Error::InvalidParameter {
                    name: "combination",
                    reason: format!("column {k} is not a probability vector (sum {sum})"),
                });
            }
            columns.push(col);
        }
        Ok(Self {
            columns,
            fallbacks: Vec::new(),
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[(usize, f64)] {
        &self.columns[k]
    }

    /// Nodes whose active set was empty when this matrix was built.
    pub fn fallbacks(&self) -> &[usize] {
        &self.fallbacks
    }

    /// Dense `A` with entries `a_{ℓk}` at `(ℓ, k)`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.columns.len();
        let mut a = DMatrix::zeros(n, n);
        for (k, col) in self.columns.iter().enumerate() {
            for &(l, w) in col {
                a[(l, k)] = w;
            }
        }
        a
    }
}

/// Builds the uniform combination matrix over the given active sets.
pub fn build_combination_matrix(active_sets: &[Vec<usize>]) -> Combination {
    Combination::uniform(active_sets)
}

/// Which local update a diffusion network runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adaptation {
    Lms,
    /// Regularized Newton step with a running Hessian estimate.
    Newton { epsilon: f64, hessian_factor: f64 },
    /// Diagonal preconditioning by `(εI + P_k)^{-1}`.
    Preconditioned { epsilon: f64 },
    NormalizedLms { epsilon: f64 },
}

impl Adaptation {
    pub fn name(&self) -> &'static str {
        match self {
            Adaptation::Lms => "lms",
            Adaptation::Newton { .. } => "lmsn",
            Adaptation::Preconditioned { .. } => "plms",
            Adaptation::NormalizedLms { .. } => "nlms",
        }
    }
}

/// Per-node estimates and adaptation state of a diffusion network.
#[derive(Debug, Clone)]
pub struct NetworkState {
    n: usize,
    order: usize,
    adaptation: Adaptation,
    mu: Vec<f64>,
    h: Vec<f64>,
    psi: Vec<f64>,
    /// Preconditioner diagonals `D_k`, row-major `N×M` (preconditioned only).
    d: Vec<f64>,
    /// Hessian estimates `R̂_{z,k}`, `N` blocks of `M×M` (Newton only).
    r_hat: Vec<f64>,
    scratch_mat: Vec<f64>,
    scratch_vec: Vec<f64>,
}

impl NetworkState {
    /// Zero-initialized network: `h_k(0) = 0`, `R̂_{z,k}(0) = 0`.
    pub fn new(
        s: &DMatrix<f64>,
        order: usize,
        step_sizes: Vec<f64>,
        adaptation: Adaptation,
    ) -> Result<Self> {
        let n = s.nrows();
        let d = match adaptation {
            Adaptation::Preconditioned { epsilon } => {
                if !(epsilon >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "epsilon",
                        reason: format!("{epsilon} is negative"),
                    });
                }
                let p = compute_preconditioner(s, order);
                d_matrix(p.as_slice(), epsilon)?
            }
            _ => Vec::new(),
        };
        Self::with_preconditioner(n, order, step_sizes, adaptation, d)
    }

    /// Like [`NetworkState::new`] but with explicit `D_k` diagonals
    /// (row-major `N×M`) for the preconditioned variant.
    pub fn with_preconditioner(
        n: usize,
        order: usize,
        step_sizes: Vec<f64>,
        adaptation: Adaptation,
        d: Vec<f64>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: "filter order must be at least 1".into(),
            });
        }
        if step_sizes.len() != n {
            return Err(Error::Dimension {
                what: "step sizes",
                expected: n,
                got: step_sizes.len(),
            });
        }
        if let Some(mu) = step_sizes.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "step size",
                reason: format!("{mu} is not a nonnegative number"),
            });
        }
        match adaptation {
            Adaptation::Newton {
                epsilon,
                hessian_factor,
            } => {
                if !(epsilon > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "epsilon",
                        reason: format!("LMS-Newton needs ε > 0, got {epsilon}"),
                    });
                }
                if !(hessian_factor > 0.0 && hessian_factor <= 0.1) {
                    return Err(Error::InvalidParameter {
                        name: "hessian_factor",
                        reason: format!("must lie in (0, 0.1], got {hessian_factor}"),
                    });
                }
            }
            Adaptation::NormalizedLms { epsilon } if !(epsilon > 0.0) => {
                return Err(Error::InvalidParameter {
                    name: "epsilon",
                    reason: format!("ε-NLMS needs ε > 0, got {epsilon}"),
                });
            }
            Adaptation::Preconditioned { .. } if d.len() != n * order => {
                return Err(Error::Dimension {
                    what: "preconditioner diagonals",
                    expected: n * order,
                    got: d.len(),
                });
            }
            _ => {}
        }
        let r_hat = match adaptation {
            Adaptation::Newton { .. } => vec![0.0; n * order * order],
            _ => Vec::new(),
        };
        Ok(Self {
            n,
            order,
            adaptation,
            mu: step_sizes,
            h: vec![0.0; n * order],
            psi: vec![0.0; n * order],
            d,
            r_hat,
            scratch_mat: vec![0.0; order * order],
            scratch_vec: vec![0.0; order],
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn adaptation(&self) -> Adaptation {
        self.adaptation
    }

    pub fn step_sizes(&self) -> &[f64] {
        &self.mu
    }

    /// Current estimates `h_k(i)`, row-major `N×M`.
    pub fn estimates(&self) -> &[f64] {
        &self.h
    }

    pub fn estimate(&self, k: usize) -> &[f64] {
        &self.h[k * self.order..(k + 1) * self.order]
    }

    /// Intermediate estimates `ψ_k(i+1)` from the last adaptation.
    pub fn intermediates(&self) -> &[f64] {
        &self.psi
    }

    pub fn intermediate(&self, k: usize) -> &[f64] {
        &self.psi[k * self.order..(k + 1) * self.order]
    }

    pub fn set_estimates(&mut self, h: &[f64]) -> Result<()> {
        if h.len() != self.h.len() {
            return Err(Error::Dimension {
                what: "estimates",
                expected: self.h.len(),
                got: h.len(),
            });
        }
        self.h.copy_from_slice(h);
        Ok(())
    }

    /// `R̂_{z,k}` (row-major `M×M`), Newton variant only.
    pub fn hessian_estimate(&self, k: usize) -> Option<&[f64]> {
        let mm = self.order * self.order;
        (!self.r_hat.is_empty()).then(|| &self.r_hat[k * mm..(k + 1) * mm])
    }

    pub fn preconditioner_diagonal(&self, k: usize) -> Option<&[f64]> {
        (!self.d.is_empty()).then(|| &self.d[k * self.order..(k + 1) * self.order])
    }

    /// Adaptation step: every `ψ_k(i+1)` from `h_k(i)`, `z_k(i)`, `y_k(i)`.
    ///
    /// `z` is row-major `N×M`. Estimates `h` are left untouched.
    pub fn adapt(&mut self, z: &[f64], y: &[f64]) {
        let m = self.order;
        debug_assert_eq!(z.len(), self.n * m);
        debug_assert_eq!(y.len(), self.n);
        for k in 0..self.n {
            let zk = &z[k * m..(k + 1) * m];
            let hk = &self.h[k * m..(k + 1) * m];
            let e = y[k] - dot(zk, hk);
            let c = self.mu[k] * e;
            let psi = &mut self.psi[k * m..(k + 1) * m];
            match self.adaptation {
                Adaptation::Lms => {
                    for j in 0..m {
                        psi[j] = hk[j] + c * zk[j];
                    }
                }
                Adaptation::Preconditioned { .. } => {
                    let dk = &self.d[k * m..(k + 1) * m];
                    for j in 0..m {
                        psi[j] = hk[j] + c * dk[j] * zk[j];
                    }
                }
                Adaptation::NormalizedLms { epsilon } => {
                    let scale = c / (dot(zk, zk) + epsilon);
                    for j in 0..m {
                        psi[j] = hk[j] + scale * zk[j];
                    }
                }
                Adaptation::Newton {
                    epsilon,
                    hessian_factor,
                } => {
                    let r = &mut self.r_hat[k * m * m..(k + 1) * m * m];
                    for a in 0..m {
                        for b in 0..m {
                            r[a * m + b] =
                                (1.0 - hessian_factor) * r[a * m + b] + hessian_factor * zk[a] * zk[b];
                        }
                    }
                    self.scratch_mat.copy_from_slice(r);
                    for a in 0..m {
                        self.scratch_mat[a * m + a] += epsilon;
                    }
                    self.scratch_vec.copy_from_slice(zk);
                    let ok = linalg::cholesky_solve_in_place(
                        &mut self.scratch_mat,
                        m,
                        &mut self.scratch_vec,
                    );
                    debug_assert!(ok || !self.scratch_vec.iter().all(|v| v.is_finite()) || !zk.iter().all(|v| v.is_finite()),
                        "regularized Hessian lost positive definiteness");
                    for j in 0..m {
                        psi[j] = if ok {
                            hk[j] + c * self.scratch_vec[j]
                        } else {
                            f64::NAN
                        };
                    }
                }
            }
        }
    }

    /// Combination step: `h_k(i+1) = Σ_ℓ a_{ℓk} ψ_ℓ(i+1)`.
    pub fn combine(&mut self, combination: &Combination) {
        let m = self.order;
        debug_assert_eq!(combination.n_nodes(), self.n);
        for k in 0..self.n {
            let hk = &mut self.h[k * m..(k + 1) * m];
            hk.iter_mut().for_each(|v| *v = 0.0);
            for &(l, w) in combination.column(k) {
                let psi = &self.psi[l * m..(l + 1) * m];
                for j in 0..m {
                    hk[j] += w * psi[j];
                }
            }
        }
    }

    /// One adapt-then-combine iteration.
    pub fn step(&mut self, z: &[f64], y: &[f64], combination: &Combination) {
        self.adapt(z, y);
        self.combine(combination);
    }

    /// `Σ_k ‖h_k − h°_k‖²` against a flat `N×M` bank.
    pub fn squared_deviation(&self, truth: &[f64]) -> f64 {
        self.h
            .iter()
            .zip(truth)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
