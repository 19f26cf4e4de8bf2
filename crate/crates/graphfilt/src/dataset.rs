//! Temperature reconstruction at unobserved stations.
//!
//! Sampled stations stream `x(i) = diag(1_S) y(i)`. Node `k` regresses its
//! reading on `z_k(i) = col{[S^m x(i−m+1)]_k}_{m=1..M}` and learns its own
//! (multitask) or a shared (single-task) coefficient vector over a training
//! window; the frozen coefficients then reconstruct `ŷ_k(i) = z_k(i)^T h_k`
//! at the unobserved stations.
//!
//! The readings CSV holds `T` rows of `N` hourly values (header optional);
//! the coordinate CSV holds `N` rows of two numbers. When no files are
//! given, [`synthetic_dataset`] builds a stand-in whose unobserved stations
//! follow a clustered node-varying graph filter of the sampled ones.

use std::ops::Range;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use graphfilt_core::adapt::{self, Adaptation, Combination, NetworkState, Preconditioner};
use graphfilt_core::clustering::{ClusterParams, ClusterState};
use graphfilt_core::graph::{self, Graph, ShiftKind};
use graphfilt_core::regressor::DistributedRegressor;
use graphfilt_core::rng::{stream, stream_rng};

use crate::config::ExperimentConfig;
use crate::{io, HarnessError, Result};

/// Station count of the canonical dataset.
pub const CANONICAL_STATIONS: usize = 109;
/// Hours in the canonical dataset.
pub const CANONICAL_HOURS: usize = 8759;
/// Neighbors per station in the temperature graph.
pub const DEFAULT_KNN: usize = 7;
/// Evaluation window after a sampling switch.
pub const SWITCH_WINDOW: usize = 500;
/// Environment variable naming a directory with `readings.csv` and
/// `coords.csv`.
pub const DATA_DIR_ENV: &str = "GRAPHFILT_TEMPERATURE_DIR";

#[derive(Debug, Clone)]
pub struct TemperatureDataset {
    /// `T×N`, one row per hour.
    readings: DMatrix<f64>,
    coordinates: Vec<[f64; 2]>,
    graph: Graph,
}

impl TemperatureDataset {
    /// Validates shapes and joins each station to its `knn` nearest
    /// neighbors.
    pub fn new(readings: DMatrix<f64>, coordinates: Vec<[f64; 2]>, knn: usize) -> Result<Self> {
        if readings.ncols() != coordinates.len() {
            return Err(HarnessError::Config(format!(
                "readings have {} stations but coordinates list {}",
                readings.ncols(),
                coordinates.len()
            )));
        }
        if readings.nrows() == 0 {
            return Err(HarnessError::Config("readings are empty".into()));
        }
        let n = coordinates.len();
        let k = knn.min(n.saturating_sub(1));
        if k < knn {
            log::warn!("only {n} stations; joining each to {k} neighbors instead of {knn}");
        }
        let graph = graph::knn_graph(&coordinates, k)?;
        Ok(Self {
            readings,
            coordinates,
            graph,
        })
    }

    pub fn n_stations(&self) -> usize {
        self.readings.ncols()
    }

    pub fn n_hours(&self) -> usize {
        self.readings.nrows()
    }

    pub fn readings(&self) -> &DMatrix<f64> {
        &self.readings
    }

    pub fn coordinates(&self) -> &[[f64; 2]] {
        &self.coordinates
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_canonical(&self) -> bool {
        self.n_stations() == CANONICAL_STATIONS && self.n_hours() == CANONICAL_HOURS
    }
}

/// Loads readings (`T` rows × `N` columns) and coordinates (`N` rows × 2).
pub fn ingest_temperature_csv(readings: &Path, coords: &Path) -> Result<TemperatureDataset> {
    ingest_with_knn(readings, coords, DEFAULT_KNN)
}

pub fn ingest_with_knn(readings: &Path, coords: &Path, knn: usize) -> Result<TemperatureDataset> {
    let rows = io::read_matrix_csv(readings)?;
    let t = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if t == 0 || n == 0 {
        return Err(HarnessError::Format {
            path: readings.to_path_buf(),
            reason: "no readings".into(),
        });
    }
    let data = DMatrix::from_fn(t, n, |i, k| rows[i][k]);
    let c = io::read_matrix_csv(coords)?;
    if c.len() != n {
        return Err(HarnessError::Format {
            path: coords.to_path_buf(),
            reason: format!("{} coordinate rows for {n} stations in the readings", c.len()),
        });
    }
    if let Some(r) = c.iter().position(|r| r.len() != 2) {
        return Err(HarnessError::Format {
            path: coords.to_path_buf(),
            reason: format!("row {} has {} columns, expected 2", r + 1, c[r].len()),
        });
    }
    let points = c.iter().map(|r| [r[0], r[1]]).collect();
    TemperatureDataset::new(data, points, knn)
}

/// Canonical files from [`DATA_DIR_ENV`], if the variable names a directory
/// holding both.
pub fn canonical_files() -> Option<(std::path::PathBuf, std::path::PathBuf)> {
    let dir = std::path::PathBuf::from(std::env::var_os(DATA_DIR_ENV)?);
    let r = dir.join("readings.csv");
    let c = dir.join("coords.csv");
    (r.is_file() && c.is_file()).then_some((r, c))
}

/// Sampling sets over time.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub initial: Vec<bool>,
    /// `(time, mask)`: the mask in force from `time` on.
    pub switch: Option<(usize, Vec<bool>)>,
}

impl SamplingPlan {
    pub fn fixed(mask: Vec<bool>) -> Self {
        Self {
            initial: mask,
            switch: None,
        }
    }

    pub fn mask_at(&self, i: usize) -> &[bool] {
        match &self.switch {
            Some((t, m)) if i >= *t => m,
            _ => &self.initial,
        }
    }

    pub fn from_indices(n: usize, sampled: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &k in sampled {
            *mask.get_mut(k).ok_or_else(|| {
                HarnessError::Config(format!("sampled node {k} outside 0..{n}"))
            })? = true;
        }
        Ok(mask)
    }
}

/// `count` sampled nodes such that every other node has a sampled
/// neighbor: a greedy dominating set seeded by a random order, topped up at
/// random.
pub fn choose_sampling(graph: &Graph, count: usize, seed: u64) -> Result<Vec<bool>> {
    let n = graph.n_nodes();
    if count == 0 || count >= n {
        return Err(HarnessError::Config(format!(
            "sampled count {count} must lie in 1..{n}"
        )));
    }
    let mut rng = stream_rng(seed, stream::DATASET);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let nbrs = graph.neighborhoods();
    let mut mask = vec![false; n];
    let covered = |mask: &[bool], k: usize| mask[k] || nbrs[k].iter().any(|&l| l != k && mask[l]);
    loop {
        let best = order
            .iter()
            .copied()
            .filter(|&c| !mask[c])
            .max_by_key(|&c| {
                let gain = nbrs[c].iter().filter(|&&l| !covered(&mask, l)).count();
                // first in the random order wins ties
                (gain, n - order.iter().position(|&o| o == c).unwrap_or(0))
            });
        match best {
            Some(c) if (0..n).any(|k| !covered(&mask, k)) => mask[c] = true,
            _ => break,
        }
    }
    let used = mask.iter().filter(|&&m| m).count();
    if used > count {
        return Err(HarnessError::Config(format!(
            "{count} sampled nodes cannot cover the graph; {used} are needed"
        )));
    }
    for &c in &order {
        if mask.iter().filter(|&&m| m).count() == count {
            break;
        }
        mask[c] = true;
    }
    Ok(mask)
}

/// Stand-in dataset parameters.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub stations: usize,
    pub hours: usize,
    pub knn: usize,
    pub sampled: usize,
    pub order: usize,
    /// `(time, sampled count)` of a sampling switch.
    pub switch: Option<(usize, usize)>,
    /// Observation noise at unobserved stations.
    pub noise_std: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            stations: CANONICAL_STATIONS,
            hours: CANONICAL_HOURS,
            knn: DEFAULT_KNN,
            sampled: 37,
            order: 4,
            switch: None,
            noise_std: 0.1,
        }
    }
}

/// Seed offset of the sampling set drawn for a switch.
const SWITCH_SALT: u64 = 0x5157_17C4;

/// Per-power weights of the two regions of the stand-in.
const REGION_WEIGHTS: [[f64; 4]; 2] = [[0.55, 0.25, 0.12, 0.08], [0.3, 0.3, 0.25, 0.15]];

/// Hourly readings at random planar stations.
///
/// Sampled stations carry a smooth field: a regional mean, a daily and a
/// yearly cycle with longitude-dependent phase, and a spatially smoothed
/// AR(1) weather term. An unobserved station `k` in region `q` (west or east
/// half) reads `Σ_m w_{q,m} [S^m x(i−m+1)]_k / r_m` plus noise, where `r_m`
/// is the mean of `[S^m 1_S]_k` over unobserved stations: a clustered
/// node-varying graph filter of the sampled readings.
pub fn synthetic_dataset(spec: &SyntheticSpec, seed: u64) -> Result<(TemperatureDataset, SamplingPlan)> {
    let n = spec.stations;
    let m = spec.order;
    if m == 0 || m > REGION_WEIGHTS[0].len() {
        return Err(HarnessError::Config(format!(
            "synthetic filter order must lie in 1..={}",
            REGION_WEIGHTS[0].len()
        )));
    }
    let g = graph::gen_knn_sensor(n, spec.knn, seed)?;
    let coords = g.coordinates().expect("sensor graph has coordinates").to_vec();
    let s = graph::build_shift(&g, ShiftKind::NormalizedAdjacency)?;
    let s = s.matrix();

    let initial = choose_sampling(&g, spec.sampled, seed)?;
    let switch = match spec.switch {
        Some((t, count)) => Some((t, choose_sampling(&g, count, seed ^ SWITCH_SALT)?)),
        None => None,
    };
    let plan = SamplingPlan { initial, switch };

    // spatial smoother: row-normalized Gaussian kernel
    let kernel = DMatrix::from_fn(n, n, |a, b| {
        let dx = coords[a][0] - coords[b][0];
        let dy = coords[a][1] - coords[b][1];
        (-(dx * dx + dy * dy) / (2.0 * 0.15f64.powi(2))).exp()
    });
    let row_sums: Vec<f64> = kernel.row_iter().map(|r| r.sum()).collect();

    let powers = graphfilt_core::linalg::shift_powers(s, m + 1);
    let weights_for = |mask: &[bool]| -> Vec<f64> {
        let ones = nalgebra::DVector::from_fn(n, |k, _| if mask[k] { 1.0 } else { 0.0 });
        let hidden: Vec<usize> = (0..n).filter(|&k| !mask[k]).collect();
        let reach: Vec<f64> = (1..=m)
            .map(|p| {
                let r = &powers[p] * &ones;
                hidden.iter().map(|&k| r[k]).sum::<f64>() / hidden.len().max(1) as f64
            })
            .collect();
        let mut w = vec![0.0; n * m];
        for &k in &hidden {
            let q = usize::from(coords[k][0] >= 0.5);
            for p in 0..m {
                w[k * m + p] = REGION_WEIGHTS[q][p] / reach[p];
            }
        }
        w
    };
    let mut weights = weights_for(&plan.initial);

    let mut rng = stream_rng(seed, stream::DATASET);
    let phase: Vec<f64> = coords.iter().map(|c| 0.8 * c[0]).collect();
    let base: Vec<f64> = coords.iter().map(|c| 8.0 + 10.0 * c[1]).collect();
    let mut weather = vec![0.0; n];
    let mut reg = DistributedRegressor::new(s, m)?;
    let mut data = DMatrix::zeros(spec.hours, n);
    let mut x = vec![0.0; n];
    let mut sx = vec![0.0; n];
    let tau = std::f64::consts::TAU;
    for i in 0..spec.hours {
        if let Some((t, mask)) = &plan.switch {
            if i == *t {
                weights = weights_for(mask);
            }
        }
        let mask = plan.mask_at(i);
        let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for a in 0..n {
            let smooth: f64 = (0..n).map(|b| kernel[(a, b)] * w[b]).sum::<f64>() / row_sums[a];
            weather[a] = 0.97 * weather[a] + 0.6 * smooth;
        }
        let hour = i as f64;
        for k in 0..n {
            let field = base[k]
                + 6.0 * (tau * hour / 24.0 - phase[k]).sin()
                + 9.0 * (tau * hour / 8760.0 - 1.9).sin()
                + weather[k];
            x[k] = if mask[k] { field } else { 0.0 };
        }
        shift_into(s, &x, &mut sx);
        reg.step(&sx);
        let z = reg.regressors();
        for k in 0..n {
            data[(i, k)] = if mask[k] {
                x[k]
            } else {
                let v: f64 = (0..m).map(|p| weights[k * m + p] * z[k * m + p]).sum();
                v + spec.noise_std * rng.sample::<f64, _>(StandardNormal)
            };
        }
    }
    let ds = TemperatureDataset {
        readings: data,
        coordinates: coords,
        graph: g,
    };
    Ok((ds, plan))
}

fn shift_into(s: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = s.row(k).iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// `Σ_i ‖diag(mask)(y − ŷ)‖² / Σ_i ‖diag(mask) y‖²` over rows `window`.
pub fn nmse(truth: &DMatrix<f64>, estimates: &DMatrix<f64>, mask: &[bool], window: Range<usize>) -> Result<f64> {
    if truth.shape() != estimates.shape() || mask.len() != truth.ncols() {
        return Err(HarnessError::Config(format!(
            "nmse shapes disagree: truth {:?}, estimates {:?}, mask {}",
            truth.shape(),
            estimates.shape(),
            mask.len()
        )));
    }
    if window.end > truth.nrows() {
        return Err(HarnessError::Config(format!(
            "window end {} beyond {} rows",
            window.end,
            truth.nrows()
        )));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in window {
        for k in (0..mask.len()).filter(|&k| mask[k]) {
            let y = truth[(i, k)];
            num += (y - estimates[(i, k)]).powi(2);
            den += y * y;
        }
    }
    if den == 0.0 {
        return Err(HarnessError::Config(
            "NMSE undefined: no unobserved signal energy in the window".into(),
        ));
    }
    Ok(num / den)
}

/// How [`reconstruct_experiment`] learns.
#[derive(Debug, Clone)]
pub struct ReconstructionSettings {
    pub order: usize,
    pub adaptation: Adaptation,
    pub mu: f64,
    /// Per-node coefficients with learned clusters; otherwise one shared
    /// vector diffused over all neighbors.
    pub multitask: bool,
    pub clustering: ClusterParams,
    /// Hours used for learning; ignored when the plan switches masks, where
    /// learning runs throughout.
    pub train: usize,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// `T×N` reconstruction; zero before the evaluation window.
    pub estimates: DMatrix<f64>,
    /// NMSE over the test window (after training), unobserved stations.
    pub nmse: f64,
    /// Coefficients after learning, row-major `N×M`.
    pub coefficients: Vec<f64>,
    /// Final clustering matrix (multitask only).
    pub clusters: Option<DMatrix<u8>>,
    pub tracking: Option<SwitchTracking>,
}

/// NMSE over `[t, t + SWITCH_WINDOW)` after a sampling switch at `t`.
#[derive(Debug, Clone, Copy)]
pub struct SwitchTracking {
    pub switch_at: usize,
    /// With the coefficients frozen just before the switch.
    pub frozen: f64,
    /// With the coefficients reached at the end of the stream.
    pub adapted: f64,
}

impl SwitchTracking {
    pub fn ratio(&self) -> f64 {
        self.frozen / self.adapted
    }
}

/// Learns on the dataset under `plan` and reconstructs the unobserved
/// stations.
///
/// Without a switch, coefficients learn over `[0, train)` and are frozen on
/// `[train, T)`, where the NMSE is measured. With a switch at `t`, learning
/// runs over the whole stream and the NMSE on `[t, t + 500)` is reported
/// both for the coefficients of `t − 1` and of the last hour.
pub fn reconstruct_experiment(
    ds: &TemperatureDataset,
    plan: &SamplingPlan,
    set: &ReconstructionSettings,
) -> Result<Reconstruction> {
    let n = ds.n_stations();
    let t_total = ds.n_hours();
    let m = set.order;
    if plan.initial.len() != n || plan.switch.as_ref().is_some_and(|(_, s)| s.len() != n) {
        return Err(HarnessError::Config("sampling mask length differs from station count".into()));
    }
    let unobserved = |i: usize| -> Vec<bool> { plan.mask_at(i).iter().map(|b| !b).collect() };
    if !unobserved(0).iter().any(|&u| u) {
        return Err(HarnessError::Config(
            "NMSE undefined: every station is sampled".into(),
        ));
    }
    let learn_until = match &plan.switch {
        Some((t, _)) => {
            if *t == 0 || t + SWITCH_WINDOW > t_total {
                return Err(HarnessError::Config(format!(
                    "switch at {t} leaves no {SWITCH_WINDOW}-hour window in {t_total} hours"
                )));
            }
            t_total
        }
        None => {
            if set.train == 0 || set.train >= t_total {
                return Err(HarnessError::Config(format!(
                    "training length {} must lie in 1..{t_total}",
                    set.train
                )));
            }
            set.train
        }
    };

    let shift = graph::build_shift(ds.graph(), ShiftKind::NormalizedAdjacency)?;
    let s = shift.matrix();
    // regressor entries are S^1 … S^M of the masked stream
    let full = adapt::compute_preconditioner(s, m + 1);
    let p: Vec<f64> = (0..n).flat_map(|k| full.diagonal(k)[1..].to_vec()).collect();
    let pre = Preconditioner::from_diagonals(m, p)?;
    let d = match set.adaptation {
        Adaptation::Preconditioned { epsilon } => adapt::d_matrix(pre.as_slice(), epsilon)?,
        _ => Vec::new(),
    };
    let mut state = NetworkState::with_preconditioner(n, m, vec![set.mu; n], set.adaptation, d)?;
    let neighborhoods = ds.graph().neighborhoods();
    let mut cluster = if set.multitask {
        Some(ClusterState::new(neighborhoods.clone(), &pre, set.clustering)?)
    } else {
        None
    };
    let uniform = Combination::uniform(&neighborhoods);

    let mut reg = DistributedRegressor::new(s, m)?;
    let mut x = vec![0.0; n];
    let mut sx = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut zs: Vec<f64> = Vec::new();
    let mut estimates = DMatrix::zeros(t_total, n);
    let mut frozen: Option<Vec<f64>> = None;
    let eval_from = plan.switch.as_ref().map_or(set.train, |(t, _)| *t);
    for i in 0..t_total {
        let mask = plan.mask_at(i);
        for k in 0..n {
            y[k] = ds.readings[(i, k)];
            x[k] = if mask[k] { y[k] } else { 0.0 };
        }
        shift_into(s, &x, &mut sx);
        reg.step(&sx);
        let z = reg.regressors();
        if plan.switch.as_ref().is_some_and(|(t, _)| i == *t) {
            frozen = Some(state.estimates().to_vec());
        }
        if i >= eval_from {
            let h = state.estimates();
            for k in 0..n {
                estimates[(i, k)] = adapt::dot(&z[k * m..(k + 1) * m], &h[k * m..(k + 1) * m]);
            }
            if plan.switch.is_some() && i < eval_from + SWITCH_WINDOW {
                zs.extend_from_slice(z);
            }
        }
        if i < learn_until {
            state.adapt(z, &y);
            match cluster.as_mut() {
                Some(c) => {
                    c.update(state.intermediates(), state.estimates());
                    let comb = c.combination();
                    state.combine(&comb);
                }
                None => state.combine(&uniform),
            }
            if state.estimates().iter().any(|v| !v.is_finite()) {
                return Err(HarnessError::Divergence(format!(
                    "reconstruction estimates diverged at hour {i}"
                )));
            }
        }
    }

    let tracking = match (&plan.switch, frozen) {
        (Some((t, _)), Some(before)) => {
            let window = *t..t + SWITCH_WINDOW;
            let after = state.estimates();
            let mut est_frozen = DMatrix::zeros(t_total, n);
            let mut est_adapted = DMatrix::zeros(t_total, n);
            for (row, i) in window.clone().enumerate() {
                let z = &zs[row * n * m..(row + 1) * n * m];
                for k in 0..n {
                    let zk = &z[k * m..(k + 1) * m];
                    est_frozen[(i, k)] = adapt::dot(zk, &before[k * m..(k + 1) * m]);
                    est_adapted[(i, k)] = adapt::dot(zk, &after[k * m..(k + 1) * m]);
                }
            }
            let mask = unobserved(*t);
            Some(SwitchTracking {
                switch_at: *t,
                frozen: nmse(&ds.readings, &est_frozen, &mask, window.clone())?,
                adapted: nmse(&ds.readings, &est_adapted, &mask, window)?,
            })
        }
        _ => None,
    };
    let nmse_test = nmse(&ds.readings, &estimates, &unobserved(eval_from), eval_from..t_total)?;
    Ok(Reconstruction {
        estimates,
        nmse: nmse_test,
        coefficients: state.estimates().to_vec(),
        clusters: cluster.map(|c| c.e_matrix().clone()),
        tracking,
    })
}

/// Dataset, sampling plan and learner described by `cfg`'s `[dataset]`
/// section. Without readings files the synthetic stand-in is generated from
/// `seed`, with `cfg.graph.nodes` stations.
pub fn prepare_reconstruction(
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<(TemperatureDataset, SamplingPlan, ReconstructionSettings)> {
    let d = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| HarnessError::Config("config has no [dataset] section".into()))?;
    let (ds, plan) = match (&d.readings, &d.coords) {
        (Some(r), Some(c)) => {
            let ds = ingest_with_knn(r, c, d.knn)?;
            let n = ds.n_stations();
            let pick = |list: &[usize], count: usize, salt: u64| -> Result<Vec<bool>> {
                if list.is_empty() {
                    choose_sampling(ds.graph(), count, seed ^ salt)
                } else {
                    SamplingPlan::from_indices(n, list)
                }
            };
            let initial = pick(&d.sampled, d.sampled_count, 0)?;
            let switch = match d.switch_at {
                Some(t) => {
                    let list = d.sampled_after_switch.as_deref().unwrap_or(&[]);
                    Some((t, pick(list, d.sampled_count_after_switch, SWITCH_SALT)?))
                }
                None => None,
            };
            (ds, SamplingPlan { initial, switch })
        }
        (None, None) => {
            if !d.sampled.is_empty() || d.sampled_after_switch.is_some() {
                return Err(HarnessError::Config(
                    "explicit sampling sets need readings and coordinate files".into(),
                ));
            }
            let spec = SyntheticSpec {
                stations: cfg.graph.nodes,
                knn: d.knn,
                sampled: d.sampled_count,
                order: cfg.filter.order.min(REGION_WEIGHTS[0].len()),
                switch: d.switch_at.map(|t| (t, d.sampled_count_after_switch)),
                ..SyntheticSpec::default()
            };
            synthetic_dataset(&spec, seed)?
        }
        _ => {
            return Err(HarnessError::Config(
                "dataset.readings and dataset.coords must be given together".into(),
            ))
        }
    };
    let settings = ReconstructionSettings {
        order: cfg.filter.order,
        adaptation: cfg.algorithm.adaptation(),
        mu: cfg.algorithm.mu,
        multitask: d.multitask,
        clustering: cfg.clustering.params(),
        train: d.train,
    };
    Ok((ds, plan, settings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmse_closed_forms() {
        let y = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mask = [false, true];
        assert_eq!(nmse(&y, &y, &mask, 0..3).unwrap(), 0.0);
        assert_eq!(nmse(&y, &DMatrix::zeros(3, 2), &mask, 0..3).unwrap(), 1.0);
        // constant offset c on the one unobserved node
        let c = 0.5;
        let mut est = y.clone();
        est.column_mut(1).add_scalar_mut(c);
        let expected = c * c * 3.0 / (4.0 + 16.0 + 36.0);
        assert!((nmse(&y, &est, &mask, 0..3).unwrap() - expected).abs() < 1e-15);
        assert!(nmse(&y, &y, &[false, false], 0..3).is_err());
    }

    #[test]
    fn sampling_dominates_the_graph() {
        let g = graph::gen_knn_sensor(60, 5, 3).unwrap();
        let mask = choose_sampling(&g, 25, 3).unwrap();
        assert_eq!(mask.iter().filter(|&&m| m).count(), 25);
        for (k, nb) in g.neighborhoods().iter().enumerate() {
            assert!(mask[k] || nb.iter().any(|&l| mask[l]), "node {k} uncovered");
        }
        assert!(choose_sampling(&g, 1, 3).is_err());
    }
}
