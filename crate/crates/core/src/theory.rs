//! Mean and mean-square performance of diffusion adaptation.
//!
//! With the stacked error `h̃ = h° − h` the network obeys, under independent
//! regressors and small step sizes,
//!
//! ```text
//! E h̃(i+1)  = 𝓑 E h̃(i)
//! 𝓑 = 𝓐^T (I − 𝓜𝓓𝓡_z),   𝓖 = 𝓐^T 𝓜𝓓𝓢𝓓𝓜 𝓐,   𝓕 ≈ 𝓑^T ⊗ 𝓑^T
//! ```
//!
//! where `𝓐 = A ⊗ I_M`, `𝓜 = diag(μ_k I_M)`, `𝓓 = bdiag(D_k)`,
//! `𝓡_z = bdiag(R_{z,k})` and `𝓢 = bdiag(σ²_{v,k} R_{z,k})`.
//!
//! The transient MSD has two evaluations: the F-form works on `(NM)²`-sized
//! vectors and is capped at [`F_FORM_CAP`]; the B-form only multiplies
//! `NM×NM` matrices. Both produce the same sequence.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::adapt;
use crate::error::{Error, Result};
use crate::linalg;
use crate::signal::{NoiseModel, SignalStatistics};

/// Largest `NM` for which `(NM)²×(NM)²` matrices are formed.
pub const F_FORM_CAP: usize = 40;
/// Relative size below which a series term ends the steady-state sum.
pub const SERIES_TOL: f64 = 1e-12;
/// Hard cap on steady-state series terms.
pub const SERIES_MAX_TERMS: usize = 1_000_000;
/// Distance from one at which `ρ(𝓑)` is reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-12;

/// The matrices `D_k` used by the adaptation.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoryPreconditioner {
    /// `D_k = I`: plain diffusion LMS.
    Identity,
    /// Diagonal `D_k`, row-major `N×M`.
    Diagonal(Vec<f64>),
    /// `D_k = (εI + R_{z,k})^{-1}`, the steady-state LMS-Newton scaling.
    Newton { epsilon: f64 },
}

/// Inputs to [`build_theory_model`].
#[derive(Debug, Clone)]
pub struct TheoryInputs<'a> {
    pub shift: &'a DMatrix<f64>,
    /// Combination matrix with `a_{ℓk}` at `(ℓ, k)`.
    pub combination: &'a DMatrix<f64>,
    pub step_sizes: &'a [f64],
    pub preconditioner: TheoryPreconditioner,
    pub statistics: &'a SignalStatistics,
    pub noise: &'a NoiseModel,
    /// Initial error `h̃(0)`, stacked `NM` (equals `h°` for zero start).
    pub h_tilde0: &'a [f64],
}

/// Linearized model of a diffusion network.
#[derive(Debug, Clone)]
pub struct TheoryModel {
    n: usize,
    order: usize,
    cal_a: DMatrix<f64>,
    mu: Vec<f64>,
    d_blocks: Vec<DMatrix<f64>>,
    rz_blocks: Vec<DMatrix<f64>>,
    cal_b: DMatrix<f64>,
    cal_g: DMatrix<f64>,
    h_tilde0: DVector<f64>,
}

/// Assembles `𝓑`, `𝓖` and the block quantities they derive from.
pub fn build_theory_model(inputs: &TheoryInputs<'_>) -> Result<TheoryModel> {
    let n = inputs.shift.nrows();
    let nm = inputs.h_tilde0.len();
    if n == 0 || nm % n != 0 {
        return Err(Error::Dimension {
            what: "initial error length",
            expected: n,
            got: nm,
        });
    }
    let order = nm / n;
    let check = |what, got: usize| {
        if got == n {
            Ok(())
        } else {
            Err(Error::Dimension { what, expected: n, got })
        }
    };
    check("combination matrix", inputs.combination.nrows())?;
    check("combination matrix", inputs.combination.ncols())?;
    check("step sizes", inputs.step_sizes.len())?;
    check("noise variances", inputs.noise.n_nodes())?;

    let rz_blocks = adapt::local_covariances(inputs.shift, inputs.statistics, order)?;
    let d_blocks: Vec<DMatrix<f64>> = match &inputs.preconditioner {
        TheoryPreconditioner::Identity => (0..n).map(|_| DMatrix::identity(order, order)).collect(),
        TheoryPreconditioner::Diagonal(d) => {
            if d.len() != nm {
                return Err(Error::Dimension {
                    what: "preconditioner diagonals",
                    expected: nm,
                    got: d.len(),
                });
            }
            d.chunks(order)
                .map(|c| DMatrix::from_diagonal(&DVector::from_column_slice(c)))
                .collect()
        }
        TheoryPreconditioner::Newton { epsilon } => rz_blocks
            .iter()
            .map(|r| {
                let reg = r + DMatrix::identity(order, order) * *epsilon;
                reg.try_inverse().ok_or(Error::Singular {
                    context: "εI + R_z in the Newton scaling",
                })
            })
            .collect::<Result<_>>()?,
    };

    let cal_a = linalg::kron(inputs.combination, &DMatrix::identity(order, order));
    let a = inputs.combination;
    let mut cal_b = DMatrix::zeros(nm, nm);
    let mut cal_g = DMatrix::zeros(nm, nm);
    let q_blocks: Vec<DMatrix<f64>> = (0..n)
        .map(|l| {
            let mu = inputs.step_sizes[l];
            let dl = &d_blocks[l];
            let q = dl * &rz_blocks[l] * dl.transpose() * (mu * mu * inputs.noise.variances()[l]);
            (&q + q.transpose()) * 0.5
        })
        .collect();
    for l in 0..n {
        let block = DMatrix::identity(order, order)
            - &d_blocks[l] * &rz_blocks[l] * inputs.step_sizes[l];
        for k in 0..n {
            let w = a[(l, k)];
            if w != 0.0 {
                cal_b
                    .view_mut((k * order, l * order), (order, order))
                    .copy_from(&(&block * w));
            }
        }
    }
    for k in 0..n {
        for j in 0..n {
            let mut acc = DMatrix::zeros(order, order);
            for l in 0..n {
                let w = a[(l, k)] * a[(l, j)];
                if w != 0.0 {
                    acc += &q_blocks[l] * w;
                }
            }
            cal_g
                .view_mut((k * order, j * order), (order, order))
                .copy_from(&acc);
        }
    }

    Ok(TheoryModel {
        n,
        order,
        cal_a,
        mu: inputs.step_sizes.to_vec(),
        d_blocks,
        rz_blocks,
        cal_b,
        cal_g,
        h_tilde0: DVector::from_column_slice(inputs.h_tilde0),
    })
}

impl TheoryModel {
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `𝓐 = A ⊗ I_M`.
    pub fn cal_a(&self) -> &DMatrix<f64> {
        &self.cal_a
    }

    pub fn cal_b(&self) -> &DMatrix<f64> {
        &self.cal_b
    }

    pub fn cal_g(&self) -> &DMatrix<f64> {
        &self.cal_g
    }

    pub fn step_sizes(&self) -> &[f64] {
        &self.mu
    }

    pub fn local_covariance(&self, k: usize) -> &DMatrix<f64> {
        &self.rz_blocks[k]
    }

    pub fn preconditioner_block(&self, k: usize) -> &DMatrix<f64> {
        &self.d_blocks[k]
    }

    pub fn h_tilde0(&self) -> &DVector<f64> {
        &self.h_tilde0
    }

    /// `𝓕 = 𝓑^T ⊗ 𝓑^T`, subject to [`F_FORM_CAP`].
    pub fn cal_f(&self) -> Result<DMatrix<f64>> {
        let nm = self.n * self.order;
        if nm > F_FORM_CAP {
            return Err(Error::TooLarge { nm, cap: F_FORM_CAP });
        }
        let bt = self.cal_b.transpose();
        Ok(linalg::kron(&bt, &bt))
    }

    /// `σ = vec(I_{NM})`, the network-MSD weighting.
    pub fn sigma_weight(&self) -> DVector<f64> {
        let nm = self.n * self.order;
        linalg::vec_of(&DMatrix::identity(nm, nm))
    }
}

/// `E h̃(i) = 𝓑^i h̃(0)` for `i = 0..=iters`.
pub fn mean_error_trajectory(tm: &TheoryModel, iters: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(iters + 1);
    let mut h = tm.h_tilde0.clone();
    out.push(h.clone());
    for _ in 0..iters {
        h = &tm.cal_b * h;
        out.push(h.clone());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanStability {
    pub spectral_radius: f64,
    pub status: Stability,
    /// Per-node `2/λ_max(D_k R_{z,k})`; a step size below it keeps node `k`
    /// stable in the i.i.d. case.
    pub sufficient_bounds: Vec<f64>,
}

impl MeanStability {
    pub fn is_stable(&self) -> bool {
        self.status == Stability::Stable
    }
}

/// Spectral-radius test on `𝓑` plus the per-node sufficient step-size bounds.
pub fn mean_stability(tm: &TheoryModel) -> Result<MeanStability> {
    let rho = linalg::spectral_radius(&tm.cal_b)?;
    let status = if (rho - 1.0).abs() <= MARGINAL_TOL {
        Stability::Marginal
    } else if rho < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let sufficient_bounds = (0..tm.n)
        .map(|k| {
            let dr = &tm.d_blocks[k] * &tm.rz_blocks[k];
            let lambda = linalg::spectral_radius(&dr)?;
            Ok(if lambda > 0.0 { 2.0 / lambda } else { f64::INFINITY })
        })
        .collect::<Result<_>>()?;
    Ok(MeanStability {
        spectral_radius: rho,
        status,
        sufficient_bounds,
    })
}

/// Transient network MSD `ζ(0..=iters)` through `𝓕`.
pub fn transient_msd_f(tm: &TheoryModel, iters: usize) -> Result<Vec<f64>> {
    let f = tm.cal_f()?;
    let n = tm.n as f64;
    let dim = f.nrows();
    let h0 = &tm.h_tilde0;
    let vec_hh = linalg::vec_of(&(h0 * h0.transpose()));
    let vec_gt = linalg::vec_of(&tm.cal_g.transpose());
    let f_minus_i = &f - DMatrix::identity(dim, dim);
    let row = (f_minus_i.tr_mul(&vec_hh) + vec_gt) / n;
    let mut power = tm.sigma_weight();
    let mut zeta = h0.norm_squared() / n;
    let mut out = Vec::with_capacity(iters + 1);
    out.push(zeta);
    for _ in 0..iters {
        zeta += row.dot(&power);
        out.push(zeta);
        power = &f * power;
    }
    Ok(out)
}

/// Column factor `L` with `𝓖 = L L^T`, dropping null directions.
fn g_factor(g: &DMatrix<f64>) -> DMatrix<f64> {
    let l = linalg::psd_factor(g);
    let scale = l.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep: Vec<usize> = (0..l.ncols())
        .filter(|&j| l.column(j).amax() > scale * 1e-12)
        .collect();
    DMatrix::from_fn(l.nrows(), keep.len(), |i, j| l[(i, keep[j])])
}

/// Transient network MSD `ζ(0..=iters)` from powers of `𝓑`.
pub fn transient_msd_b(tm: &TheoryModel, iters: usize) -> Vec<f64> {
    let n = tm.n as f64;
    let mut x = g_factor(&tm.cal_g);
    let mut u = tm.h_tilde0.clone();
    let mut u_norm = u.norm_squared();
    let mut zeta = u_norm / n;
    let mut out = Vec::with_capacity(iters + 1);
    out.push(zeta);
    for _ in 0..iters {
        let u_next = &tm.cal_b * &u;
        let u_next_norm = u_next.norm_squared();
        zeta += (x.norm_squared() + u_next_norm - u_norm) / n;
        out.push(zeta);
        x = &tm.cal_b * x;
        u = u_next;
        u_norm = u_next_norm;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyStateForm {
    /// `(1/N) vec(𝓖^T)^T (I − 𝓕)^{-1} vec(I)`.
    F,
    /// `(1/N) Σ_i Tr(𝓑^i 𝓖 (𝓑^i)^T)`, term by term.
    Series,
    /// The same series summed in blocks of doubling length; for large `NM`.
    Doubling,
}

/// Steady-state network MSD `ζ*`.
pub fn steady_state_msd(tm: &TheoryModel, form: SteadyStateForm) -> Result<f64> {
    let rho = linalg::spectral_radius(&tm.cal_b)?;
    if rho >= 1.0 {
        return Err(Error::Unstable { radius: rho });
    }
    let n = tm.n as f64;
    match form {
        SteadyStateForm::F => {
            let f = tm.cal_f()?;
            let dim = f.nrows();
            let lhs = DMatrix::identity(dim, dim) - f;
            let x = lhs
                .lu()
                .solve(&tm.sigma_weight())
                .ok_or(Error::Singular { context: "I − 𝓕" })?;
            Ok(linalg::vec_of(&tm.cal_g.transpose()).dot(&x) / n)
        }
        SteadyStateForm::Series => {
            let mut x = g_factor(&tm.cal_g);
            let mut sum = 0.0;
            for _ in 0..SERIES_MAX_TERMS {
                let term = x.norm_squared();
                sum += term;
                if term <= SERIES_TOL * sum {
                    return Ok(sum / n);
                }
                x = &tm.cal_b * x;
            }
            Err(Error::NoConvergence {
                method: "steady-state series",
                iterations: SERIES_MAX_TERMS,
                residual: x.norm_squared() / sum.max(f64::MIN_POSITIVE),
            })
        }
        SteadyStateForm::Doubling => {
            // P_j = Σ_{i<2^j} 𝓑^i 𝓖 𝓑^iT,  P_{j+1} = P_j + 𝓑^{2^j} P_j 𝓑^{2^j T}
            let mut p = tm.cal_g.clone();
            let mut b = tm.cal_b.clone();
            let mut terms = 1usize;
            while terms < SERIES_MAX_TERMS {
                let block = &b * &p * b.transpose();
                let added = block.trace();
                p += block;
                terms *= 2;
                if added.abs() <= SERIES_TOL * p.trace() {
                    return Ok(p.trace() / n);
                }
                b = &b * &b;
            }
            Err(Error::NoConvergence {
                method: "steady-state doubling",
                iterations: terms,
                residual: f64::NAN,
            })
        }
    }
}

/// Plain and preconditioned mode time constants `1/(2μλ_m)` and
/// `1/(2μ d_m λ_m)`.
pub fn time_constants(mu: f64, eigenvalues: &[f64], d: &[f64]) -> Result<Vec<(f64, f64)>> {
    if eigenvalues.len() != d.len() {
        return Err(Error::Dimension {
            what: "preconditioner diagonal",
            expected: eigenvalues.len(),
            got: d.len(),
        });
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: format!("time constants need μ > 0, got {mu}"),
        });
    }
    eigenvalues
        .iter()
        .zip(d)
        .map(|(&lambda, &dm)| {
            if lambda > 0.0 && dm > 0.0 {
                Ok((1.0 / (2.0 * mu * lambda), 1.0 / (2.0 * mu * dm * lambda)))
            } else {
                Err(Error::InvalidParameter {
                    name: "eigenvalues",
                    reason: format!("mode with λ = {lambda}, d = {dm} is not positive"),
                })
            }
        })
        .collect()
}

/// `10 log10(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, ShiftKind};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn scalar_model(mu: f64, lambda: f64, sigma_v2: f64, h0: f64) -> TheoryModel {
        let s = DMatrix::from_element(1, 1, 0.0);
        let a = DMatrix::from_element(1, 1, 1.0);
        let stats = SignalStatistics::iid(&[lambda]);
        let noise = NoiseModel::new(alloc::vec![sigma_v2]).unwrap();
        build_theory_model(&TheoryInputs {
            shift: &s,
            combination: &a,
            step_sizes: &[mu],
            preconditioner: TheoryPreconditioner::Identity,
            statistics: &stats,
            noise: &noise,
            h_tilde0: &[h0],
        })
        .unwrap()
    }

    fn random_model(n: usize, order: usize, seed: u64) -> TheoryModel {
        let (g, s) = graph::gen_erdos_renyi_thresholded(n, seed).unwrap();
        let a = adapt::build_combination_matrix(&g.neighborhoods()).to_matrix();
        let mut rng = crate::rng::stream_rng(seed, 99);
        let vars: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let noise: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.1)).collect();
        let h0: Vec<f64> = (0..n * order).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = adapt::compute_preconditioner(s.matrix(), order);
        let d = adapt::d_matrix(p.as_slice(), 0.01).unwrap();
        let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.05)).collect();
        build_theory_model(&TheoryInputs {
            shift: s.matrix(),
            combination: &a,
            step_sizes: &mu,
            preconditioner: TheoryPreconditioner::Diagonal(d),
            statistics: &SignalStatistics::iid(&vars),
            noise: &NoiseModel::new(noise).unwrap(),
            h_tilde0: &h0,
        })
        .unwrap()
    }

    #[test]
    fn scalar_reduction() {
        let tm = scalar_model(0.1, 1.0, 0.1, 1.0);
        assert_relative_eq!(tm.cal_b()[(0, 0)], 0.9, epsilon = 1e-15);
        assert_relative_eq!(tm.cal_g()[(0, 0)], 0.01 * 0.1, epsilon = 1e-15);
        let traj = mean_error_trajectory(&tm, 5);
        for (i, h) in traj.iter().enumerate() {
            assert_relative_eq!(h[0], libm::pow(0.9, i as f64), epsilon = 1e-14);
        }
    }

    #[test]
    fn scalar_steady_state() {
        let tm = scalar_model(0.1, 1.0, 0.1, 1.0);
        let expect = 1e-3 / 0.19;
        for form in [SteadyStateForm::F, SteadyStateForm::Series, SteadyStateForm::Doubling] {
            assert_relative_eq!(steady_state_msd(&tm, form).unwrap(), expect, max_relative = 1e-10);
        }
        let silent = scalar_model(0.1, 1.0, 0.0, 1.0);
        assert_eq!(steady_state_msd(&silent, SteadyStateForm::Series).unwrap(), 0.0);
    }

    #[test]
    fn scalar_transient_closed_form() {
        let (mu, lambda, sv, h0) = (0.1, 1.0, 0.1, 0.8);
        let tm = scalar_model(mu, lambda, sv, h0);
        let f = (1.0 - mu * lambda) * (1.0 - mu * lambda);
        let g = mu * mu * sv * lambda;
        let mut zeta = h0 * h0;
        let mut expect = alloc::vec![zeta];
        for i in 0..50 {
            zeta += (h0 * h0 * (f - 1.0) + g) * libm::pow(f, i as f64);
            expect.push(zeta);
        }
        let tf = transient_msd_f(&tm, 50).unwrap();
        let tb = transient_msd_b(&tm, 50);
        for i in 0..=50 {
            assert_relative_eq!(tf[i], expect[i], epsilon = 1e-14);
            assert_relative_eq!(tb[i], expect[i], epsilon = 1e-14);
        }
        // monotone tail toward the steady state
        for w in tb.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn zero_noise_zero_error_is_flat() {
        let tm = scalar_model(0.1, 1.0, 0.0, 0.0);
        assert!(transient_msd_b(&tm, 10).iter().all(|z| *z == 0.0));
        assert!(transient_msd_f(&tm, 10).unwrap().iter().all(|z| *z == 0.0));
    }

    #[test]
    fn stability_reports() {
        assert_eq!(mean_stability(&scalar_model(0.1, 1.0, 0.1, 1.0)).unwrap().status, Stability::Stable);
        assert_eq!(mean_stability(&scalar_model(2.0, 1.0, 0.1, 1.0)).unwrap().status, Stability::Marginal);
        assert_eq!(mean_stability(&scalar_model(2.5, 1.0, 0.1, 1.0)).unwrap().status, Stability::Unstable);
        assert_eq!(mean_stability(&scalar_model(0.0, 1.0, 0.1, 1.0)).unwrap().status, Stability::Marginal);
        assert!(matches!(
            steady_state_msd(&scalar_model(2.5, 1.0, 0.1, 1.0), SteadyStateForm::Series),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn iid_preconditioner_bounds_equal_two() {
        let (g, s) = graph::gen_erdos_renyi_thresholded(6, 3).unwrap();
        let a = adapt::build_combination_matrix(&g.neighborhoods()).to_matrix();
        let p = adapt::compute_preconditioner(s.matrix(), 3);
        let d = adapt::d_matrix(p.as_slice(), 0.0).unwrap();
        let tm = build_theory_model(&TheoryInputs {
            shift: s.matrix(),
            combination: &a,
            step_sizes: &[0.01; 6],
            preconditioner: TheoryPreconditioner::Diagonal(d),
            statistics: &SignalStatistics::iid(&[1.0; 6]),
            noise: &NoiseModel::new(alloc::vec![0.01; 6]).unwrap(),
            h_tilde0: &[0.0; 18],
        })
        .unwrap();
        for b in mean_stability(&tm).unwrap().sufficient_bounds {
            assert_relative_eq!(b, 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn identity_combination_is_block_diagonal() {
        let n = 4;
        let s = graph::build_shift(
            &graph::Graph::from_edges(n, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap(),
            ShiftKind::NormalizedAdjacency,
        )
        .unwrap();
        let tm = build_theory_model(&TheoryInputs {
            shift: s.matrix(),
            combination: &DMatrix::identity(n, n),
            step_sizes: &[0.05; 4],
            preconditioner: TheoryPreconditioner::Identity,
            statistics: &SignalStatistics::iid(&[1.0; 4]),
            noise: &NoiseModel::new(alloc::vec![0.01; 4]).unwrap(),
            h_tilde0: &[1.0; 8],
        })
        .unwrap();
        let b = tm.cal_b();
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    assert_eq!(b.view((2 * k, 2 * l), (2, 2)).amax(), 0.0);
                }
            }
        }
    }

    #[test]
    fn g_is_symmetric_psd() {
        let tm = random_model(6, 2, 11);
        let g = tm.cal_g();
        assert!((g - g.transpose()).amax() < 1e-15);
        assert!(g.clone().symmetric_eigen().eigenvalues.min() > -1e-14);
    }

    #[test]
    fn f_and_b_forms_agree() {
        let tm = random_model(6, 2, 5);
        let tf = transient_msd_f(&tm, 300).unwrap();
        let tb = transient_msd_b(&tm, 300);
        for (a, b) in tf.iter().zip(&tb) {
            assert!((a - b).abs() < 1e-10);
        }
        let zeta0 = tm.h_tilde0().norm_squared() / 6.0;
        assert_eq!(tb[0], zeta0);
        let b = tm.cal_b();
        let hh = tm.h_tilde0() * tm.h_tilde0().transpose();
        let first = (tm.cal_g() + hh * (b.transpose() * b - DMatrix::identity(12, 12))).trace() / 6.0;
        assert_relative_eq!(tb[1] - tb[0], first, epsilon = 1e-13);
    }

    #[test]
    fn steady_state_forms_agree() {
        let tm = random_model(5, 2, 17);
        let f = steady_state_msd(&tm, SteadyStateForm::F).unwrap();
        let s = steady_state_msd(&tm, SteadyStateForm::Series).unwrap();
        let d = steady_state_msd(&tm, SteadyStateForm::Doubling).unwrap();
        assert!(((f - s) / f).abs() < 1e-8);
        assert!(((f - d) / f).abs() < 1e-8);
    }

    #[test]
    fn f_form_cap() {
        let tm = random_model(21, 2, 1);
        assert!(matches!(transient_msd_f(&tm, 1), Err(Error::TooLarge { nm: 42, cap: 40 })));
    }

    #[test]
    fn time_constant_examples() {
        assert_eq!(time_constants(0.1, &[1.0], &[1.0]).unwrap(), alloc::vec![(5.0, 5.0)]);
        let tc = time_constants(0.1, &[1.0, 2.0, 4.0], &[1.0, 0.5, 0.25]).unwrap();
        for t in &tc {
            assert_relative_eq!(t.1, 5.0, epsilon = 1e-14);
        }
        let plain = time_constants(0.1, &[1.0, 2.0, 4.0], &[1.0; 3]).unwrap();
        for t in &plain {
            assert_eq!(t.0, t.1);
        }
        assert!(time_constants(0.1, &[0.0], &[1.0]).is_err());
    }
}
