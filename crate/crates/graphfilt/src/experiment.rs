//! Realizing a config into concrete matrices, sources and run specs.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use graphfilt_core::adapt::{self, Adaptation, Combination};
use graphfilt_core::filter::FilterModel;
use graphfilt_core::graph::{self, Graph, ShiftKind, ShiftMatrix};
use graphfilt_core::rng::{stream, stream_rng};
use graphfilt_core::signal::{
    solve_lyapunov, ArTimeVertexSource, GraphSignalSource, IidGaussianSource, NoiseModel,
    SignalStatistics, VertexCorrelatedSource,
};
use graphfilt_core::sim::{CombinationPolicy, RunSpec, Stage};
use graphfilt_core::theory::{self, TheoryInputs, TheoryModel, TheoryPreconditioner};

use crate::config::{
    CombinationKind, ExperimentConfig, GraphKind, SignalKind,
};
use crate::{io, HarnessError, Result};

/// Per-run input generator.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    Iid(Vec<f64>),
    VertexCorrelated { sigma2: Vec<f64>, basis: DMatrix<f64> },
    Autoregressive { s: DMatrix<f64>, rx0: DMatrix<f64> },
}

impl SourceSpec {
    pub fn build(&self, seed: u64) -> Result<Box<dyn GraphSignalSource + Send>> {
        Ok(match self {
            SourceSpec::Iid(v) => Box::new(IidGaussianSource::new(v, seed)?),
            SourceSpec::VertexCorrelated { sigma2, basis } => {
                Box::new(VertexCorrelatedSource::new(sigma2, basis.clone(), seed)?)
            }
            SourceSpec::Autoregressive { s, rx0 } => {
                Box::new(ArTimeVertexSource::with_covariance(s, rx0.clone(), seed)?)
            }
        })
    }
}

/// A config realized for one master seed.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub graph: Graph,
    pub shift: ShiftMatrix,
    pub neighborhoods: Vec<Vec<usize>>,
    pub stages: Vec<Stage>,
    pub source: SourceSpec,
    pub statistics: SignalStatistics,
    pub noise: NoiseModel,
    pub step_sizes: Vec<f64>,
    pub adaptation: Adaptation,
    pub policy: CombinationPolicy,
    pub order: usize,
}

fn uniform_draws(n: usize, low: f64, high: f64, seed: u64, stream_id: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream_id);
    (0..n)
        .map(|_| if high > low { rng.random_range(low..high) } else { low })
        .collect()
}

/// Node labels for consecutive blocks of the given sizes.
pub fn block_labels(sizes: &[usize], n: usize) -> Result<Vec<usize>> {
    let total: usize = sizes.iter().sum();
    if total != n {
        return Err(HarnessError::Config(format!(
            "cluster sizes add up to {total}, the graph has {n} nodes"
        )));
    }
    Ok(sizes
        .iter()
        .enumerate()
        .flat_map(|(q, &size)| std::iter::repeat_n(q, size))
        .collect())
}

pub fn build_graph(cfg: &ExperimentConfig, seed: u64) -> Result<(Graph, ShiftMatrix)> {
    let g = &cfg.graph;
    let graph_seed = g.seed.unwrap_or(seed);
    let kind = ShiftKind::parse(&cfg.shift.kind)
        .ok_or_else(|| HarnessError::Config(format!("unknown shift kind `{}`", cfg.shift.kind)))?;
    match g.kind {
        GraphKind::ErdosRenyi => Ok(graph::gen_erdos_renyi_thresholded(g.nodes, graph_seed)?),
        GraphKind::KnnSensor => {
            let graph = graph::gen_knn_sensor(g.nodes, g.k, graph_seed)?;
            let shift = graph::build_shift(&graph, kind)?;
            Ok((graph, shift))
        }
        GraphKind::File => {
            let edges = g.edges.as_ref().ok_or_else(|| {
                HarnessError::Config("graph.kind = \"file\" needs graph.edges".into())
            })?;
            let mut graph = io::read_edge_list(edges)?;
            if let Some(c) = &g.coords {
                graph = graph.with_coordinates(io::read_coordinates(c)?)?;
            }
            let shift = graph::build_shift(&graph, kind)?;
            Ok((graph, shift))
        }
    }
}

impl Experiment {
    pub fn build(cfg: &ExperimentConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let (graph, shift) = build_graph(cfg, seed)?;
        let n = graph.n_nodes();
        let order = cfg.filter.order;
        let neighborhoods = graph.neighborhoods();

        let stages = if cfg.filter.stages.is_empty() {
            let h = match &cfg.filter.coefficients {
                Some(h) => h.clone(),
                None => uniform_draws(order, 0.0, 1.0, seed, stream::COEFFICIENTS),
            };
            vec![Stage::invariant(h, n)]
        } else {
            cfg.filter
                .stages
                .iter()
                .map(|st| {
                    let labels = block_labels(&st.cluster_sizes, n)?;
                    Ok(Stage {
                        start: st.start,
                        filter: FilterModel::from_clusters(&labels, &st.coefficients)?,
                        labels,
                    })
                })
                .collect::<Result<_>>()?
        };

        let variances = uniform_draws(
            n,
            cfg.signal.variance_low,
            cfg.signal.variance_high,
            seed,
            stream::VARIANCES,
        );
        let s = shift.matrix();
        let (source, statistics) = match cfg.signal.kind {
            SignalKind::Iid => (
                SourceSpec::Iid(variances.clone()),
                SignalStatistics::iid(&variances),
            ),
            SignalKind::VertexCorrelated => {
                let basis = gft_basis(s);
                let rx0 = &basis * DMatrix::from_diagonal(&DVector::from_vec(variances.clone()))
                    * basis.transpose();
                let mut stats = SignalStatistics::white(rx0);
                stats.gft = Some(basis.clone());
                (
                    SourceSpec::VertexCorrelated {
                        sigma2: variances,
                        basis,
                    },
                    stats,
                )
            }
            SignalKind::Autoregressive => {
                let rx0 = solve_lyapunov(s)?;
                let stats = SignalStatistics {
                    rx0: rx0.clone(),
                    autocorr: graphfilt_core::signal::Autocorrelation::Autoregressive(s.clone()),
                    gft: None,
                };
                (
                    SourceSpec::Autoregressive { s: s.clone(), rx0 },
                    stats,
                )
            }
        };
        let noise_vars = uniform_draws(
            n,
            cfg.noise.variance_low,
            cfg.noise.variance_high,
            seed,
            stream::NOISE_VARIANCES,
        );
        let noise = NoiseModel::new(noise_vars)?;

        let a = &cfg.algorithm;
        let adaptation = a.adaptation();
        let step_sizes = match a.mu_bound_fraction {
            None => vec![a.mu; n],
            Some(f) => adapt::local_covariances(s, &statistics, order)?
                .iter()
                .map(|r| f * 2.0 / graphfilt_core::linalg::lambda_max_symmetric(r))
                .collect(),
        };
        let policy = match a.combination {
            CombinationKind::Uniform => CombinationPolicy::Uniform,
            CombinationKind::NonCooperative => CombinationPolicy::NonCooperative,
            CombinationKind::Oracle => CombinationPolicy::Oracle,
            CombinationKind::Learned => CombinationPolicy::Learned(cfg.clustering.params()),
        };
        for st in &stages {
            st.filter.check_nodes(n)?;
        }
        Ok(Self {
            graph,
            shift,
            neighborhoods,
            stages,
            source,
            statistics,
            noise,
            step_sizes,
            adaptation,
            policy,
            order,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn run_spec<'a>(
        &'a self,
        iterations: usize,
        snapshots: &'a [usize],
        trace_nodes: &'a [usize],
    ) -> RunSpec<'a> {
        RunSpec {
            shift: self.shift.matrix(),
            neighborhoods: &self.neighborhoods,
            stages: &self.stages,
            step_sizes: &self.step_sizes,
            adaptation: self.adaptation,
            policy: self.policy.clone(),
            noise: &self.noise,
            iterations,
            snapshots,
            trace_nodes,
        }
    }

    /// Combination matrix of a fixed policy for stage `idx`.
    pub fn combination_matrix(&self, idx: usize) -> Option<DMatrix<f64>> {
        let n = self.n_nodes();
        let labels = &self.stages[idx].labels;
        match self.policy {
            CombinationPolicy::Uniform => Some(Combination::uniform(&self.neighborhoods).to_matrix()),
            CombinationPolicy::NonCooperative => Some(DMatrix::identity(n, n)),
            CombinationPolicy::Oracle => {
                let sets: Vec<Vec<usize>> = self
                    .neighborhoods
                    .iter()
                    .enumerate()
                    .map(|(k, nb)| nb.iter().copied().filter(|&l| labels[l] == labels[k]).collect())
                    .collect();
                Some(Combination::uniform(&sets).to_matrix())
            }
            CombinationPolicy::Learned(_) => None,
        }
    }

    fn theory_preconditioner(&self) -> Option<TheoryPreconditioner> {
        match self.adaptation {
            Adaptation::Lms => Some(TheoryPreconditioner::Identity),
            Adaptation::Preconditioned { epsilon } => {
                let p = adapt::compute_preconditioner(self.shift.matrix(), self.order);
                adapt::d_matrix(p.as_slice(), epsilon)
                    .ok()
                    .map(TheoryPreconditioner::Diagonal)
            }
            Adaptation::Newton { epsilon, .. } => Some(TheoryPreconditioner::Newton { epsilon }),
            Adaptation::NormalizedLms { .. } => None,
        }
    }

    /// Linearized model when one applies: a single stage, a fixed
    /// combination policy and a non-normalized update.
    pub fn theory_model(&self) -> Option<Result<TheoryModel>> {
        let preconditioner = self.theory_preconditioner()?;
        self.theory_model_with(&self.step_sizes, preconditioner)
    }

    /// Linearized model with explicit step sizes and preconditioner; `None`
    /// under the same conditions as [`Experiment::theory_model`], NLMS aside.
    pub fn theory_model_with(
        &self,
        step_sizes: &[f64],
        preconditioner: TheoryPreconditioner,
    ) -> Option<Result<TheoryModel>> {
        if self.stages.len() != 1 {
            return None;
        }
        let a = self.combination_matrix(0)?;
        let h0 = self.stages[0].filter.bank(self.n_nodes());
        Some(
            theory::build_theory_model(&TheoryInputs {
                shift: self.shift.matrix(),
                combination: &a,
                step_sizes,
                preconditioner,
                statistics: &self.statistics,
                noise: &self.noise,
                h_tilde0: &h0,
            })
            .map_err(HarnessError::from),
        )
    }
}

/// Orthonormal eigenvectors of the symmetric part of `s`.
pub fn gft_basis(s: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (s + s.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvectors
}

/// Transient and steady-state theory for `iterations` steps.
pub fn theory_curve(tm: &TheoryModel, iterations: usize) -> Result<(Vec<f64>, f64)> {
    let transient = theory::transient_msd_b(tm, iterations);
    let nm = tm.n_nodes() * tm.order();
    let form = if nm <= theory::F_FORM_CAP {
        theory::SteadyStateForm::F
    } else {
        theory::SteadyStateForm::Doubling
    };
    let steady = theory::steady_state_msd(tm, form)?;
    Ok((transient, steady))
}
