//! Parallel Monte-Carlo averaging of independent runs.
//!
//! Runs are seeded by `run_seed(master, index)` and executed on the rayon
//! pool; results are collected in index order and summed sequentially, so
//! the averages do not depend on thread scheduling.

use nalgebra::DMatrix;
use rayon::prelude::*;

use graphfilt_core::rng::run_seed;
use graphfilt_core::sim::{run_single, RunOutput};

use crate::experiment::{theory_curve, Experiment};
use crate::{HarnessError, Result};

/// What each run keeps beyond its MSD curve.
#[derive(Debug, Clone, Default)]
pub struct Recording {
    pub snapshots: Vec<usize>,
    pub trace_nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub index: usize,
    pub diverged_at: Option<usize>,
    pub snapshots: Vec<(usize, DMatrix<u8>)>,
}

#[derive(Debug, Clone)]
pub struct MonteCarloOutcome {
    /// Average over the runs that did not diverge.
    pub mean_msd: Vec<f64>,
    pub completed: usize,
    pub runs: Vec<RunSummary>,
    /// Estimate traces of the first run.
    pub traces: Vec<Vec<f64>>,
}

impl MonteCarloOutcome {
    pub fn divergent(&self) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().filter(|r| r.diverged_at.is_some())
    }

    /// Mean of the last `window` averaged MSD values.
    pub fn steady_state(&self, window: usize) -> f64 {
        steady_state(&self.mean_msd, window)
    }
}

/// Mean of the last `window` entries.
pub fn steady_state(curve: &[f64], window: usize) -> f64 {
    let w = window.clamp(1, curve.len());
    curve[curve.len() - w..].iter().sum::<f64>() / w as f64
}

/// Runs `runs` realizations of `exp` for `iterations` steps.
pub fn run_monte_carlo(
    exp: &Experiment,
    runs: usize,
    iterations: usize,
    master_seed: u64,
    recording: &Recording,
) -> Result<MonteCarloOutcome> {
    let spec = exp.run_spec(iterations, &recording.snapshots, &recording.trace_nodes);
    let outputs: Vec<RunOutput> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(master_seed, r as u64);
            let mut source = exp.source.build(seed)?;
            Ok(run_single(&spec, source.as_mut(), seed)?)
        })
        .collect::<Result<_>>()?;

    let mut sum = vec![0.0; iterations + 1];
    let mut completed = 0;
    let mut summaries = Vec::with_capacity(runs);
    let mut traces = Vec::new();
    for (index, out) in outputs.into_iter().enumerate() {
        if index == 0 {
            traces = out.traces;
        }
        if out.diverged_at.is_none() {
            completed += 1;
            for (acc, v) in sum.iter_mut().zip(&out.msd) {
                *acc += v;
            }
        }
        summaries.push(RunSummary {
            index,
            diverged_at: out.diverged_at,
            snapshots: out.snapshots,
        });
    }
    let divergent = runs - completed;
    if divergent > 0 {
        log::warn!(
            "{divergent} of {runs} runs diverged (MSD above {:e}) and are excluded from the average",
            graphfilt_core::sim::DIVERGENCE_THRESHOLD
        );
    }
    if completed == 0 {
        return Err(HarnessError::Divergence(format!("all {runs} runs diverged")));
    }
    let mean_msd = sum.into_iter().map(|v| v / completed as f64).collect();
    Ok(MonteCarloOutcome {
        mean_msd,
        completed,
        runs: summaries,
        traces,
    })
}

/// Theory overlay for `exp`, if its model admits one.
pub fn theory_overlay(exp: &Experiment, iterations: usize) -> Option<Result<(Vec<f64>, f64)>> {
    exp.theory_model()
        .map(|tm| tm.and_then(|tm| theory_curve(&tm, iterations)))
}
