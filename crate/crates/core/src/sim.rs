//! Single-run simulation of a diffusion network on synthetic data.
//!
//! Observations are produced as `y_k(i) = z_k(i)^T h°_k + v_k(i)`, which is
//! the graph-filter output written through the regressors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::adapt::{compute_preconditioner, Adaptation, Combination, NetworkState};
use crate::clustering::{ClusterParams, ClusterState};
use crate::error::{Error, Result};
use crate::filter::FilterModel;
use crate::regressor::DistributedRegressor;
use crate::rng::{stream, stream_rng};
use crate::signal::{GraphSignalSource, NoiseModel};

/// Per-node MSD above which a run counts as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// A filter that is in effect from iteration `start` onward.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub start: usize,
    pub filter: FilterModel,
    /// Ground-truth cluster label of every node.
    pub labels: Vec<usize>,
}

impl Stage {
    /// A single node-invariant stage starting at 0.
    pub fn invariant(h: Vec<f64>, n: usize) -> Self {
        Self {
            start: 0,
            filter: FilterModel::NodeInvariant(h),
            labels: vec![0; n],
        }
    }
}

/// How combination weights are chosen at every iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum CombinationPolicy {
    /// Uniform over the full neighborhood.
    Uniform,
    /// `A = I`.
    NonCooperative,
    /// Uniform over neighbors with the same ground-truth label.
    Oracle,
    /// Uniform over neighbors trusted by the online clustering rule.
    Learned(ClusterParams),
}

#[derive(Debug, Clone)]
pub struct RunSpec<'a> {
    pub shift: &'a DMatrix<f64>,
    /// `𝓝_k`, each including `k`.
    pub neighborhoods: &'a [Vec<usize>],
    /// Stages sorted by start; the first starts at 0.
    pub stages: &'a [Stage],
    pub step_sizes: &'a [f64],
    pub adaptation: Adaptation,
    pub policy: CombinationPolicy,
    pub noise: &'a NoiseModel,
    pub iterations: usize,
    /// Iterations at which the clustering matrix is recorded.
    pub snapshots: &'a [usize],
    /// Nodes whose estimates are recorded every iteration.
    pub trace_nodes: &'a [usize],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// `(1/N)‖h° − h(i)‖²` for `i = 0..=iterations` (shorter if divergent).
    pub msd: Vec<f64>,
    /// `(iteration, E)` with `[E]_{ℓk} = 1` when `a_{ℓk} > 0`.
    pub snapshots: Vec<(usize, DMatrix<u8>)>,
    /// Per traced node, `h_k(i)` for `i = 0..=iterations`, row-major.
    pub traces: Vec<Vec<f64>>,
    pub diverged_at: Option<usize>,
    pub final_estimates: Vec<f64>,
}

fn validate(spec: &RunSpec<'_>, n: usize) -> Result<usize> {
    let first = spec.stages.first().ok_or(Error::InvalidParameter {
        name: "stages",
        reason: "at least one stage is required".into(),
    })?;
    if first.start != 0 {
        return Err(Error::InvalidParameter {
            name: "stages",
            reason: format!("first stage starts at {} instead of 0", first.start),
        });
    }
    let order = first.filter.order();
    for (idx, st) in spec.stages.iter().enumerate() {
        st.filter.check_nodes(n)?;
        if st.filter.order() != order {
            return Err(Error::Dimension {
                what: "stage filter order",
                expected: order,
                got: st.filter.order(),
            });
        }
        if st.labels.len() != n {
            return Err(Error::Dimension {
                what: "stage labels",
                expected: n,
                got: st.labels.len(),
            });
        }
        if idx > 0 && st.start <= spec.stages[idx - 1].start {
            return Err(Error::InvalidParameter {
                name: "stages",
                reason: "stage starts must increase".into(),
            });
        }
    }
    if spec.neighborhoods.len() != n {
        return Err(Error::Dimension {
            what: "neighborhoods",
            expected: n,
            got: spec.neighborhoods.len(),
        });
    }
    if spec.noise.n_nodes() != n {
        return Err(Error::Dimension {
            what: "noise variances",
            expected: n,
            got: spec.noise.n_nodes(),
        });
    }
    if let Some(&k) = spec.trace_nodes.iter().find(|&&k| k >= n) {
        return Err(Error::Dimension {
            what: "traced node",
            expected: n,
            got: k,
        });
    }
    Ok(order)
}

fn label_sets(neighborhoods: &[Vec<usize>], labels: &[usize]) -> Vec<Vec<usize>> {
    neighborhoods
        .iter()
        .enumerate()
        .map(|(k, nb)| nb.iter().copied().filter(|&l| labels[l] == labels[k]).collect())
        .collect()
}

fn support(c: &Combination) -> DMatrix<u8> {
    c.to_matrix().map(|w| (w > 0.0) as u8)
}

/// Runs one realization. The source supplies `x(i)`; `seed` drives the
/// observation noise.
pub fn run_single(
    spec: &RunSpec<'_>,
    source: &mut dyn GraphSignalSource,
    seed: u64,
) -> Result<RunOutput> {
    let n = spec.shift.nrows();
    if source.n_nodes() != n {
        return Err(Error::Dimension {
            what: "source nodes",
            expected: n,
            got: source.n_nodes(),
        });
    }
    let order = validate(spec, n)?;
    let mut state = NetworkState::new(spec.shift, order, spec.step_sizes.to_vec(), spec.adaptation)?;
    let mut regressor = DistributedRegressor::new(spec.shift, order)?;
    let mut noise_rng = stream_rng(seed, stream::NOISE);
    let noise_std: Vec<f64> = spec.noise.variances().iter().map(|v| libm::sqrt(*v)).collect();

    let mut cluster = match &spec.policy {
        CombinationPolicy::Learned(params) => Some(ClusterState::new(
            spec.neighborhoods.to_vec(),
            &compute_preconditioner(spec.shift, order),
            *params,
        )?),
        _ => None,
    };

    let mut stage_idx = 0;
    let mut truth = spec.stages[0].filter.bank(n);
    let static_comb = |labels: &[usize]| match &spec.policy {
        CombinationPolicy::Uniform => Combination::uniform(spec.neighborhoods),
        CombinationPolicy::Oracle => Combination::uniform(&label_sets(spec.neighborhoods, labels)),
        _ => Combination::identity(n),
    };
    let mut comb = static_comb(&spec.stages[0].labels);

    let mut msd = Vec::with_capacity(spec.iterations + 1);
    let mut traces: Vec<Vec<f64>> = spec
        .trace_nodes
        .iter()
        .map(|_| Vec::with_capacity((spec.iterations + 1) * order))
        .collect();
    let mut snapshots = Vec::new();
    let record_traces = |state: &NetworkState, traces: &mut Vec<Vec<f64>>| {
        for (t, &k) in traces.iter_mut().zip(spec.trace_nodes) {
            t.extend_from_slice(state.estimate(k));
        }
    };

    msd.push(state.squared_deviation(&truth) / n as f64);
    record_traces(&state, &mut traces);
    if spec.snapshots.contains(&0) {
        let e = match &cluster {
            Some(c) => c.e_matrix().clone(),
            None => support(&comb),
        };
        snapshots.push((0, e));
    }

    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut diverged_at = None;
    for i in 0..spec.iterations {
        while stage_idx + 1 < spec.stages.len() && spec.stages[stage_idx + 1].start <= i {
            stage_idx += 1;
            truth = spec.stages[stage_idx].filter.bank(n);
            if cluster.is_none() {
                comb = static_comb(&spec.stages[stage_idx].labels);
            }
        }
        source.next_into(&mut x);
        regressor.step(&x);
        let z = regressor.regressors();
        for k in 0..n {
            let zk = &z[k * order..(k + 1) * order];
            let hk = &truth[k * order..(k + 1) * order];
            let mut yk: f64 = zk.iter().zip(hk).map(|(a, b)| a * b).sum();
            if noise_std[k] > 0.0 {
                yk += noise_std[k] * noise_rng.sample::<f64, _>(StandardNormal);
            }
            y[k] = yk;
        }
        state.adapt(z, &y);
        if let Some(c) = cluster.as_mut() {
            c.update(state.intermediates(), state.estimates());
            comb = c.combination();
        }
        state.combine(&comb);

        // MSD against the model in force for the data just processed
        let value = state.squared_deviation(&truth) / n as f64;
        msd.push(value);
        record_traces(&state, &mut traces);
        if spec.snapshots.contains(&(i + 1)) {
            let e = match &cluster {
                Some(c) => c.e_matrix().clone(),
                None => support(&comb),
            };
            snapshots.push((i + 1, e));
        }
        if !(value <= DIVERGENCE_THRESHOLD) {
            diverged_at = Some(i + 1);
            break;
        }
    }

    Ok(RunOutput {
        msd,
        snapshots,
        traces,
        diverged_at,
        final_estimates: state.estimates().to_vec(),
    })
}
