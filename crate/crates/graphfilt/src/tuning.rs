//! Step sizes matched on predicted steady-state MSD.
//!
//! ε-NLMS has no exact linear model; it is predicted as LMS with the
//! per-node effective step `μ / (tr R_{z,k} + ε)`.

use graphfilt_core::adapt::{self, Adaptation};
use graphfilt_core::theory::{self, SteadyStateForm, TheoryModel, TheoryPreconditioner};

use crate::experiment::Experiment;
use crate::monte_carlo::{run_monte_carlo, Recording};
use crate::{HarnessError, Result};

/// Relative accuracy of [`match_steady_state`] on the MSD scale.
pub const MATCH_TOL: f64 = 1e-3;
const MAX_STEPS: usize = 60;

fn model(exp: &Experiment) -> Result<TheoryModel> {
    let built = match exp.adaptation {
        Adaptation::NormalizedLms { epsilon } => {
            let r = adapt::local_covariances(exp.shift.matrix(), &exp.statistics, exp.order)?;
            let eff: Vec<f64> = exp
                .step_sizes
                .iter()
                .zip(&r)
                .map(|(mu, rk)| mu / (rk.trace() + epsilon))
                .collect();
            exp.theory_model_with(&eff, TheoryPreconditioner::Identity)
        }
        _ => exp.theory_model(),
    };
    built.unwrap_or_else(|| {
        Err(HarnessError::Config(
            "steady-state prediction needs a single stage and a fixed combination".into(),
        ))
    })
}

/// Predicted network steady-state MSD of `exp` at its current step sizes.
pub fn predicted_steady_state(exp: &Experiment) -> Result<f64> {
    let tm = model(exp)?;
    let form = if tm.n_nodes() * tm.order() <= theory::F_FORM_CAP {
        SteadyStateForm::F
    } else {
        SteadyStateForm::Doubling
    };
    Ok(theory::steady_state_msd(&tm, form)?)
}

/// Sets a uniform step size whose predicted steady-state MSD equals
/// `target`, and returns it.
pub fn match_steady_state(exp: &mut Experiment, target: f64) -> Result<f64> {
    search(exp, target, MATCH_TOL, |exp| match predicted_steady_state(exp) {
        Ok(v) => Ok(v),
        Err(HarnessError::Core(graphfilt_core::Error::Unstable { .. })) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    })
}

/// Like [`match_steady_state`], measuring the steady state as the mean of
/// the last `window` MSD values of `runs` simulated runs.
///
/// Meant for ε-NLMS, whose normalization makes the linear prediction
/// optimistic when `‖z_k‖²` has a heavy lower tail.
pub fn match_steady_state_simulated(
    exp: &mut Experiment,
    target: f64,
    sim: &SimulatedSteadyState,
) -> Result<f64> {
    search(exp, target, sim.tolerance, |exp| {
        match run_monte_carlo(exp, sim.runs, sim.iterations, sim.seed, &Recording::default()) {
            Ok(mc) => Ok(mc.steady_state(sim.window)),
            Err(HarnessError::Divergence(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    })
}

/// Simulation budget of [`match_steady_state_simulated`].
#[derive(Debug, Clone, Copy)]
pub struct SimulatedSteadyState {
    pub runs: usize,
    pub iterations: usize,
    pub window: usize,
    pub seed: u64,
    /// Relative accuracy on the MSD scale.
    pub tolerance: f64,
}

/// Starts from the current first step size. Steady-state MSD grows about
/// linearly with μ at small steps, so the search runs a secant on
/// `log μ ↦ log MSD`, falling back to bisection once a bracket is known.
fn search(
    exp: &mut Experiment,
    target: f64,
    tol: f64,
    mut measure: impl FnMut(&Experiment) -> Result<f64>,
) -> Result<f64> {
    let n = exp.n_nodes();
    let lt = target.ln();
    let mut mu = exp.step_sizes[0];
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    for _ in 0..MAX_STEPS {
        exp.step_sizes = vec![mu; n];
        let v = measure(exp)?;
        if (v / target - 1.0).abs() <= tol {
            return Ok(mu);
        }
        let lv = v.ln();
        if v < target {
            lo = Some((mu.ln(), lv));
        } else {
            hi = Some((mu.ln(), lv));
        }
        let next = match (lo, hi) {
            (Some((a, fa)), Some((b, fb))) if fb.is_finite() => {
                let x = a + (lt - fa) * (b - a) / (fb - fa);
                let (l, r) = (a.min(b), a.max(b));
                if x > l && x < r { x } else { 0.5 * (a + b) }
            }
            (Some((a, _)), Some((b, _))) => 0.5 * (a + b),
            _ => mu.ln() + (lt - lv).clamp(-3.0, 3.0),
        };
        mu = next.exp();
    }
    Err(HarnessError::Config(format!(
        "no step size matches steady-state MSD {target:e}"
    )))
}

/// First index at which `curve` is at or below `level`.
pub fn first_crossing(curve: &[f64], level: f64) -> Option<usize> {
    curve.iter().position(|&v| v <= level)
}
