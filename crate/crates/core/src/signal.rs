//! Streaming graph-signal sources and observation synthesis.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::filter::FilterModel;
use crate::linalg;
use crate::rng::{stream, stream_rng};

/// Largest `N` solved with the `N²×N²` direct Lyapunov system.
pub const LYAPUNOV_DIRECT_MAX_N: usize = 40;
/// Relative residual every Lyapunov solution must meet.
pub const LYAPUNOV_TOL: f64 = 1e-10;

/// Lag structure of a wide-sense stationary source.
#[derive(Debug, Clone, PartialEq)]
pub enum Autocorrelation {
    /// `R_x(τ) = 0` for `τ ≠ 0`.
    White,
    /// `R_x(τ) = S^τ R_x(0)` for `τ ≥ 0`.
    Autoregressive(DMatrix<f64>),
}

/// Second-order description of a graph-signal source.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalStatistics {
    pub rx0: DMatrix<f64>,
    pub autocorr: Autocorrelation,
    /// Graph Fourier basis, for vertex-correlated sources.
    pub gft: Option<DMatrix<f64>>,
}

impl SignalStatistics {
    pub fn white(rx0: DMatrix<f64>) -> Self {
        Self {
            rx0,
            autocorr: Autocorrelation::White,
            gft: None,
        }
    }

    /// Spatially uncorrelated, temporally white: `R_x(0) = diag(variances)`.
    pub fn iid(variances: &[f64]) -> Self {
        Self::white(DMatrix::from_diagonal(&DVector::from_column_slice(variances)))
    }

    pub fn n_nodes(&self) -> usize {
        self.rx0.nrows()
    }

    /// `R_x(lag) = E{x(i) x(i − lag)^T}`; negative lags use `R_x(−τ) = R_x(τ)^T`.
    pub fn rx(&self, lag: isize) -> DMatrix<f64> {
        let n = self.n_nodes();
        let tau = lag.unsigned_abs();
        let positive = match &self.autocorr {
            Autocorrelation::White if tau == 0 => self.rx0.clone(),
            Autocorrelation::White => DMatrix::zeros(n, n),
            Autocorrelation::Autoregressive(s) => {
                let mut r = self.rx0.clone();
                for _ in 0..tau {
                    r = s * r;
                }
                r
            }
        };
        if lag < 0 {
            positive.transpose()
        } else {
            positive
        }
    }
}

/// Per-node observation noise variances `σ²_{v,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    variances: Vec<f64>,
}

impl NoiseModel {
    pub fn new(variances: Vec<f64>) -> Result<Self> {
        if let Some(v) = variances.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "noise variance",
                reason: format!("{v} is not a nonnegative number"),
            });
        }
        Ok(Self { variances })
    }

    pub fn silent(n: usize) -> Self {
        Self {
            variances: alloc::vec![0.0; n],
        }
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn n_nodes(&self) -> usize {
        self.variances.len()
    }
}

/// A stream of graph signals `x(0), x(1), …`.
pub trait GraphSignalSource {
    fn n_nodes(&self) -> usize;

    /// Writes the next sample into `out`.
    fn next_into(&mut self, out: &mut [f64]);

    fn statistics(&self) -> SignalStatistics;

    fn next_sample(&mut self) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_nodes());
        self.next_into(out.as_mut_slice());
        out
    }
}

/// Independent zero-mean Gaussian samples with per-node variances.
#[derive(Debug, Clone)]
pub struct IidGaussianSource {
    std_dev: Vec<f64>,
    variances: Vec<f64>,
    rng: ChaCha8Rng,
}

impl IidGaussianSource {
    pub fn new(variances: &[f64], seed: u64) -> Result<Self> {
        if let Some(v) = variances.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "variance",
                reason: format!("{v} is not positive"),
            });
        }
        Ok(Self {
            std_dev: variances.iter().map(|v| libm::sqrt(*v)).collect(),
            variances: variances.to_vec(),
            rng: stream_rng(seed, stream::SOURCE),
        })
    }
}

impl GraphSignalSource for IidGaussianSource {
    fn n_nodes(&self) -> usize {
        self.std_dev.len()
    }

    fn next_into(&mut self, out: &mut [f64]) {
        for (o, s) in out.iter_mut().zip(&self.std_dev) {
            *o = s * self.rng.sample::<f64, _>(StandardNormal);
        }
    }

    fn statistics(&self) -> SignalStatistics {
        SignalStatistics::iid(&self.variances)
    }
}

/// Temporally white source with covariance `V diag(σ²) V^T`.
#[derive(Debug, Clone)]
pub struct VertexCorrelatedSource {
    basis: DMatrix<f64>,
    sigma2: Vec<f64>,
    std_dev: Vec<f64>,
    scratch: Vec<f64>,
    rng: ChaCha8Rng,
}

impl VertexCorrelatedSource {
    pub fn new(sigma2: &[f64], basis: DMatrix<f64>, seed: u64) -> Result<Self> {
        let n = sigma2.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::Dimension {
                what: "basis size",
                expected: n,
                got: basis.nrows(),
            });
        }
        let gram = basis.transpose() * &basis;
        let deviation = (gram - DMatrix::<f64>::identity(n, n)).amax();
        if deviation > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "basis",
                reason: format!("not orthonormal (max |V^T V − I| = {deviation:e})"),
            });
        }
        if let Some(v) = sigma2.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "variance",
                reason: format!("{v} is negative"),
            });
        }
        Ok(Self {
            basis,
            sigma2: sigma2.to_vec(),
            std_dev: sigma2.iter().map(|v| libm::sqrt(*v)).collect(),
            scratch: alloc::vec![0.0; n],
            rng: stream_rng(seed, stream::SOURCE),
        })
    }
}

impl GraphSignalSource for VertexCorrelatedSource {
    fn n_nodes(&self) -> usize {
        self.sigma2.len()
    }

    fn next_into(&mut self, out: &mut [f64]) {
        for (c, s) in self.scratch.iter_mut().zip(&self.std_dev) {
            *c = s * self.rng.sample::<f64, _>(StandardNormal);
        }
        let n = self.sigma2.len();
        for (k, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|j| self.basis[(k, j)] * self.scratch[j]).sum();
        }
    }

    fn statistics(&self) -> SignalStatistics {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.sigma2));
        SignalStatistics {
            rx0: &self.basis * d * self.basis.transpose(),
            autocorr: Autocorrelation::White,
            gft: Some(self.basis.clone()),
        }
    }
}

/// First-order time-vertex autoregression `x(i) = S x(i−1) + w(i)`,
/// `w ~ N(0, I)`, started from its stationary distribution.
#[derive(Debug, Clone)]
pub struct ArTimeVertexSource {
    s: DMatrix<f64>,
    rx0: DMatrix<f64>,
    factor: DMatrix<f64>,
    state: DVector<f64>,
    started: bool,
    rng: ChaCha8Rng,
}

impl ArTimeVertexSource {
    pub fn new(s: &DMatrix<f64>, seed: u64) -> Result<Self> {
        let rx0 = solve_lyapunov(s)?;
        Self::with_covariance(s, rx0, seed)
    }

    /// Reuses a stationary covariance already solved for `s`.
    pub fn with_covariance(s: &DMatrix<f64>, rx0: DMatrix<f64>, seed: u64) -> Result<Self> {
        if rx0.nrows() != s.nrows() || rx0.ncols() != s.nrows() {
            return Err(Error::Dimension {
                what: "stationary covariance size",
                expected: s.nrows(),
                got: rx0.nrows(),
            });
        }
        let factor = linalg::psd_factor(&rx0);
        let n = s.nrows();
        Ok(Self {
            s: s.clone(),
            rx0,
            factor,
            state: DVector::zeros(n),
            started: false,
            rng: stream_rng(seed, stream::SOURCE),
        })
    }

    pub fn stationary_covariance(&self) -> &DMatrix<f64> {
        &self.rx0
    }

    fn gaussian(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.sample::<f64, _>(StandardNormal))
    }
}

impl GraphSignalSource for ArTimeVertexSource {
    fn n_nodes(&self) -> usize {
        self.s.nrows()
    }

    fn next_into(&mut self, out: &mut [f64]) {
        let n = self.s.nrows();
        let w = self.gaussian(n);
        self.state = if self.started {
            &self.s * &self.state + w
        } else {
            self.started = true;
            &self.factor * w
        };
        out.copy_from_slice(self.state.as_slice());
    }

    fn statistics(&self) -> SignalStatistics {
        SignalStatistics {
            rx0: self.rx0.clone(),
            autocorr: Autocorrelation::Autoregressive(self.s.clone()),
            gft: None,
        }
    }
}

/// Solver used for `S R S^T − R + I = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapunovMethod {
    /// Direct for `N ≤ LYAPUNOV_DIRECT_MAX_N`, fixed point above.
    Auto,
    /// `(I − S⊗S) vec(R) = vec(I)`.
    Direct,
    /// `R ← S R S^T + I` from `R = I`.
    FixedPoint,
}

/// Stationary covariance of the AR source: solves `S R S^T − R + I = 0`.
pub fn solve_lyapunov(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    solve_lyapunov_with(s, LyapunovMethod::Auto)
}

pub fn solve_lyapunov_with(s: &DMatrix<f64>, method: LyapunovMethod) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::Dimension {
            what: "Lyapunov operator must be square",
            expected: n,
            got: s.ncols(),
        });
    }
    let radius = linalg::spectral_radius(s)?;
    if radius >= 1.0 {
        return Err(Error::Unstable { radius });
    }
    let direct = match method {
        LyapunovMethod::Auto => n <= LYAPUNOV_DIRECT_MAX_N,
        LyapunovMethod::Direct => true,
        LyapunovMethod::FixedPoint => false,
    };
    let r = if direct {
        let system = DMatrix::<f64>::identity(n * n, n * n) - linalg::kron(s, s);
        let rhs = linalg::vec_of(&DMatrix::identity(n, n));
        let sol = system
            .lu()
            .solve(&rhs)
            .ok_or(Error::Singular { context: "Lyapunov system" })?;
        let r = DMatrix::from_column_slice(n, n, sol.as_slice());
        (&r + r.transpose()) * 0.5
    } else {
        fixed_point_lyapunov(s)?
    };
    let residual = lyapunov_residual(s, &r);
    if residual >= LYAPUNOV_TOL {
        return Err(Error::NoConvergence {
            method: "Lyapunov solve",
            iterations: 0,
            residual,
        });
    }
    Ok(r)
}

fn fixed_point_lyapunov(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    const MAX_ITER: usize = 1_000_000;
    let n = s.nrows();
    let identity = DMatrix::<f64>::identity(n, n);
    let st = s.transpose();
    let mut r = identity.clone();
    for it in 0..MAX_ITER {
        let next = s * &r * &st + &identity;
        let change = (&next - &r).norm();
        r = next;
        if change <= 1e-14 * r.norm() {
            return Ok(r);
        }
        if it + 1 == MAX_ITER {
            return Err(Error::NoConvergence {
                method: "fixed-point Lyapunov",
                iterations: MAX_ITER,
                residual: lyapunov_residual(s, &r),
            });
        }
    }
    Ok(r)
}

/// `‖S R S^T − R + I‖_F / ‖R‖_F`.
pub fn lyapunov_residual(s: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let n = s.nrows();
    let res = s * r * s.transpose() - r + DMatrix::<f64>::identity(n, n);
    res.norm() / r.norm()
}

/// Produces `y(i) = Σ_m diag(h^{(m)}) S^m x(i−m) + v(i)` step by step.
///
/// The delay line starts from zeros, so the first `M − 1` outputs only see
/// part of the filter.
#[derive(Debug, Clone)]
pub struct ObservationStream {
    filter: FilterModel,
    s: DMatrix<f64>,
    history: VecDeque<DVector<f64>>,
    noise_std: Vec<f64>,
    rng: ChaCha8Rng,
    last_output: DVector<f64>,
}

impl ObservationStream {
    pub fn new(
        filter: FilterModel,
        s: &DMatrix<f64>,
        noise: &NoiseModel,
        seed: u64,
    ) -> Result<Self> {
        let n = s.nrows();
        filter.check_nodes(n)?;
        if noise.n_nodes() != n {
            return Err(Error::Dimension {
                what: "noise variances",
                expected: n,
                got: noise.n_nodes(),
            });
        }
        let order = filter.order();
        let history = (0..order).map(|_| DVector::zeros(n)).collect();
        Ok(Self {
            filter,
            s: s.clone(),
            history,
            noise_std: noise.variances().iter().map(|v| libm::sqrt(*v)).collect(),
            rng: stream_rng(seed, stream::NOISE),
            last_output: DVector::zeros(n),
        })
    }

    pub fn filter(&self) -> &FilterModel {
        &self.filter
    }

    /// Replaces the filter (same order), keeping the delay line.
    pub fn set_filter(&mut self, filter: FilterModel) -> Result<()> {
        if filter.order() != self.filter.order() {
            return Err(Error::Dimension {
                what: "replacement filter order",
                expected: self.filter.order(),
                got: filter.order(),
            });
        }
        filter.check_nodes(self.s.nrows())?;
        self.filter = filter;
        Ok(())
    }

    /// History `x(i), x(i−1), …` after the last step.
    pub fn history(&self) -> &VecDeque<DVector<f64>> {
        &self.history
    }

    pub fn last_output(&self) -> &DVector<f64> {
        &self.last_output
    }

    fn push(&mut self, x: DVector<f64>) {
        self.history.pop_back();
        self.history.push_front(x);
    }

    fn filtered(&mut self) -> Result<DVector<f64>> {
        let history: Vec<DVector<f64>> = self.history.iter().cloned().collect();
        let mut y = self.filter.apply(&self.s, &history)?;
        for (yk, sd) in y.iter_mut().zip(&self.noise_std) {
            if *sd > 0.0 {
                *yk += sd * self.rng.sample::<f64, _>(StandardNormal);
            }
        }
        Ok(y)
    }

    /// Feeds `x(i)` and returns `y(i)`.
    pub fn step(&mut self, x: DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.s.nrows() {
            return Err(Error::Dimension {
                what: "input sample length",
                expected: self.s.nrows(),
                got: x.len(),
            });
        }
        self.push(x);
        let y = self.filtered()?;
        self.last_output = y.clone();
        Ok(y)
    }

    /// Sampling-feedback step: `x(i) = diag(1_S) y(i)`.
    ///
    /// Sampled nodes report `observed`; the others are produced by the filter
    /// from the sampled history. Returns `(x(i), y(i))`.
    pub fn step_sampled(
        &mut self,
        observed: &DVector<f64>,
        sampled: &[bool],
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let n = self.s.nrows();
        if observed.len() != n || sampled.len() != n {
            return Err(Error::Dimension {
                what: "sampled step inputs",
                expected: n,
                got: observed.len().min(sampled.len()),
            });
        }
        let x = DVector::from_fn(n, |k, _| if sampled[k] { observed[k] } else { 0.0 });
        self.push(x.clone());
        let mut y = self.filtered()?;
        for k in 0..n {
            if sampled[k] {
                y[k] = observed[k];
            }
        }
        self.last_output = y.clone();
        Ok((x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lyapunov_trivial_cases() {
        let r = solve_lyapunov(&DMatrix::zeros(3, 3)).unwrap();
        assert_relative_eq!(r, DMatrix::identity(3, 3), epsilon = 1e-14);
        let r = solve_lyapunov(&DMatrix::from_element(1, 1, 0.9)).unwrap();
        assert_relative_eq!(r[(0, 0)], 1.0 / (1.0 - 0.81), epsilon = 1e-9);
        let r = solve_lyapunov(&DMatrix::from_element(1, 1, 0.5)).unwrap();
        assert_relative_eq!(r[(0, 0)], 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let s = DMatrix::from_element(1, 1, 1.0);
        assert!(matches!(solve_lyapunov(&s), Err(Error::Unstable { .. })));
    }

    #[test]
    fn lyapunov_methods_agree() {
        let mut rng = stream_rng(5, 0);
        let raw = DMatrix::from_fn(5, 5, |_, _| rng.sample::<f64, _>(StandardNormal));
        let s = &raw / (1.25 * linalg::spectral_radius(&raw).unwrap());
        let a = solve_lyapunov_with(&s, LyapunovMethod::Direct).unwrap();
        let b = solve_lyapunov_with(&s, LyapunovMethod::FixedPoint).unwrap();
        assert!((&a - &b).norm() < 1e-9);
        assert!(lyapunov_residual(&s, &a) < LYAPUNOV_TOL);
    }

    #[test]
    fn rx_follows_ar_recursion() {
        let s = DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.1, 0.3]);
        let src = ArTimeVertexSource::new(&s, 1).unwrap();
        let stats = src.statistics();
        assert_relative_eq!(stats.rx(2), &s * &s * &stats.rx0, epsilon = 1e-14);
        assert_relative_eq!(stats.rx(-1), (&s * &stats.rx0).transpose(), epsilon = 1e-14);
    }

    #[test]
    fn ar_with_zero_shift_is_standard_normal() {
        let src = ArTimeVertexSource::new(&DMatrix::zeros(2, 2), 3).unwrap();
        assert_relative_eq!(*src.stationary_covariance(), DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn ar_restart_is_bitwise_reproducible() {
        let s = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.2, -0.3]);
        let mut a = ArTimeVertexSource::new(&s, 9).unwrap();
        let mut b = ArTimeVertexSource::new(&s, 9).unwrap();
        for _ in 0..50 {
            assert_eq!(a.next_sample(), b.next_sample());
        }
    }

    #[test]
    fn identity_basis_reduces_to_iid() {
        let var = [1.0, 2.0, 0.5];
        let mut a = VertexCorrelatedSource::new(&var, DMatrix::identity(3, 3), 4).unwrap();
        let mut b = IidGaussianSource::new(&var, 4).unwrap();
        for _ in 0..20 {
            assert_relative_eq!(a.next_sample(), b.next_sample(), epsilon = 1e-15);
        }
        assert_eq!(a.statistics().rx0, b.statistics().rx0);
    }

    #[test]
    fn isotropic_variance_ignores_basis() {
        let c = 2.5;
        let theta: f64 = 0.3;
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[libm::cos(theta), -libm::sin(theta), libm::sin(theta), libm::cos(theta)],
        );
        let src = VertexCorrelatedSource::new(&[c, c], v, 0).unwrap();
        assert_relative_eq!(src.statistics().rx0, DMatrix::identity(2, 2) * c, epsilon = 1e-14);
    }

    #[test]
    fn non_orthonormal_basis_is_rejected() {
        let v = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(VertexCorrelatedSource::new(&[1.0, 1.0], v, 0).is_err());
        assert!(IidGaussianSource::new(&[1.0, 0.0], 0).is_err());
        assert!(NoiseModel::new(alloc::vec![-0.1]).is_err());
    }

    #[test]
    fn noiseless_stream_matches_oracle() {
        let s = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0]);
        let f = FilterModel::NodeInvariant(alloc::vec![0.4, -0.3, 0.2]);
        let mut obs = ObservationStream::new(f.clone(), &s, &NoiseModel::silent(3), 0).unwrap();
        let mut src = IidGaussianSource::new(&[1.0; 3], 8).unwrap();
        let mut hist: Vec<DVector<f64>> = alloc::vec![DVector::zeros(3); 3];
        for _ in 0..30 {
            let x = src.next_sample();
            hist.pop();
            hist.insert(0, x.clone());
            let y = obs.step(x).unwrap();
            assert_eq!(y, f.apply(&s, &hist).unwrap());
        }
    }

    #[test]
    fn sampled_step_keeps_observed_nodes() {
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = FilterModel::NodeInvariant(alloc::vec![1.0, 2.0]);
        let mut obs = ObservationStream::new(f, &s, &NoiseModel::silent(2), 0).unwrap();
        let sampled = [true, false];
        let (x0, y0) = obs
            .step_sampled(&DVector::from_vec(alloc::vec![3.0, 99.0]), &sampled)
            .unwrap();
        assert_eq!(x0.as_slice(), &[3.0, 0.0]);
        assert_eq!(y0.as_slice(), &[3.0, 0.0]);
        let (_, y1) = obs
            .step_sampled(&DVector::from_vec(alloc::vec![1.0, 99.0]), &sampled)
            .unwrap();
        // node 1: 1·x_1(1) + 2·[S x(0)]_1 = 0 + 2·3
        assert_eq!(y1.as_slice(), &[1.0, 6.0]);
    }
}
