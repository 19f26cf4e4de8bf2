//! Named experiment setups with their published hyperparameters.
//!
//! A preset is a list of labelled variants that share a graph and data
//! model and differ in the algorithm or combination policy.

use crate::config::{
    AlgorithmConfig, AlgorithmKind, ClusteringConfig, CombinationKind, DatasetConfig,
    ExperimentConfig, FilterConfig, GraphConfig, GraphKind, RunConfig, ShiftConfig, SignalConfig,
    SignalKind, SimilarityKind, StageConfig,
};
use crate::{HarnessError, Result};

pub const PRESET_NAMES: [&str; 10] = [
    "fig1", "fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5", "fig7", "fig8", "table1",
];

/// Cluster coefficient vectors of the three-cluster scenario.
pub const CLUSTER_COEFFICIENTS: [[f64; 3]; 3] = [[0.5, 0.4, 0.9], [0.3, 0.1, 0.4], [0.9, 0.3, 0.7]];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub variants: Vec<(String, ExperimentConfig)>,
}

fn base(graph: GraphKind, shift: &str, order: usize) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphConfig {
            kind: graph,
            nodes: 60,
            k: 5,
            ..Default::default()
        },
        shift: ShiftConfig { kind: shift.into() },
        filter: FilterConfig {
            order,
            ..Default::default()
        },
        run: RunConfig {
            runs: 500,
            iterations: 3000,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn with_algorithm(mut cfg: ExperimentConfig, kind: AlgorithmKind, mu: f64) -> ExperimentConfig {
    cfg.algorithm = AlgorithmConfig {
        kind,
        mu,
        ..cfg.algorithm
    };
    cfg
}

fn label(kind: AlgorithmKind) -> &'static str {
    match kind {
        AlgorithmKind::Lms => "lms",
        AlgorithmKind::Lmsn => "lmsn",
        AlgorithmKind::Plms => "plms",
        AlgorithmKind::Nlms => "nlms",
    }
}

fn sweep(cfg: &ExperimentConfig, steps: &[(AlgorithmKind, f64)]) -> Vec<(String, ExperimentConfig)> {
    steps
        .iter()
        .map(|&(kind, mu)| (label(kind).to_string(), with_algorithm(cfg.clone(), kind, mu)))
        .collect()
}

fn stage(start: usize, sizes: &[usize], coefficients: &[[f64; 3]]) -> StageConfig {
    StageConfig {
        start,
        cluster_sizes: sizes.to_vec(),
        coefficients: coefficients.iter().map(|c| c.to_vec()).collect(),
    }
}

fn clustered(stages: Vec<StageConfig>, nu: f64) -> ExperimentConfig {
    let mut cfg = base(GraphKind::KnnSensor, "normalized-adjacency", 3);
    cfg.filter.stages = stages;
    cfg.run.theory = false;
    cfg.clustering = ClusteringConfig {
        nu,
        ..Default::default()
    };
    with_algorithm(cfg, AlgorithmKind::Plms, 0.01)
}

fn policy(mut cfg: ExperimentConfig, combination: CombinationKind) -> ExperimentConfig {
    cfg.algorithm.combination = combination;
    cfg
}

pub fn preset(name: &str) -> Result<Preset> {
    use AlgorithmKind::*;
    let p = match name {
        "fig1" => Preset {
            name: "fig1",
            description: "Erdős–Rényi graph, i.i.d. input, M = 5",
            variants: sweep(
                &base(GraphKind::ErdosRenyi, "normalized-adjacency", 5),
                &[(Lms, 0.08), (Plms, 0.008), (Lmsn, 0.01), (Nlms, 0.05)],
            ),
        },
        "fig2a" => Preset {
            name: "fig2a",
            description: "sensor graph, normalized adjacency shift, i.i.d. input, M = 5",
            variants: sweep(
                &base(GraphKind::KnnSensor, "normalized-adjacency", 5),
                &[(Lms, 0.08), (Plms, 0.005), (Lmsn, 0.0055)],
            ),
        },
        "fig2b" => Preset {
            name: "fig2b",
            description: "sensor graph, normalized Laplacian shift, i.i.d. input, M = 5",
            variants: sweep(
                &base(GraphKind::KnnSensor, "normalized-laplacian", 5),
                &[(Lms, 0.004), (Lmsn, 0.01), (Plms, 0.008)],
            ),
        },
        "fig2c" => {
            let cfg = base(GraphKind::KnnSensor, "adjacency", 5);
            let mut variants = sweep(&cfg, &[(Lmsn, 0.02), (Plms, 0.018)]);
            let mut lms = with_algorithm(cfg, Lms, 0.0);
            lms.algorithm.mu_bound_fraction = Some(0.05);
            variants.insert(0, ("lms".into(), lms));
            Preset {
                name: "fig2c",
                description: "sensor graph, adjacency shift, i.i.d. input, M = 5",
                variants,
            }
        }
        "fig3" => {
            let mut cfg = base(GraphKind::KnnSensor, "normalized-adjacency", 3);
            cfg.signal = SignalConfig {
                kind: SignalKind::VertexCorrelated,
                ..Default::default()
            };
            Preset {
                name: "fig3",
                description: "sensor graph, input correlated over vertices, M = 3",
                variants: sweep(&cfg, &[(Lms, 0.08), (Plms, 0.005), (Lmsn, 0.0055)]),
            }
        }
        "fig4" => {
            let mut cfg = base(GraphKind::KnnSensor, "normalized-adjacency", 3);
            cfg.signal.kind = SignalKind::Autoregressive;
            cfg.algorithm.epsilon = 0.1;
            Preset {
                name: "fig4",
                description: "sensor graph, input correlated over time and vertices, M = 3",
                variants: sweep(&cfg, &[(Lms, 0.1), (Lmsn, 0.038), (Plms, 0.03)]),
            }
        }
        "fig5" => {
            let stages = vec![stage(0, &[20, 20, 20], &CLUSTER_COEFFICIENTS)];
            let cfg = clustered(stages, 0.98);
            let mut raw = policy(cfg.clone(), CombinationKind::Learned);
            raw.clustering.similarity = SimilarityKind::Raw;
            Preset {
                name: "fig5",
                description: "three clusters of node-varying filters, PLMS",
                variants: vec![
                    ("clustered".into(), policy(cfg.clone(), CombinationKind::Learned)),
                    ("clustered-basic".into(), raw),
                    ("oracle".into(), policy(cfg.clone(), CombinationKind::Oracle)),
                    ("no-clustering".into(), policy(cfg.clone(), CombinationKind::Uniform)),
                    ("non-cooperative".into(), policy(cfg, CombinationKind::NonCooperative)),
                ],
            }
        }
        "fig7" => {
            let [c1, c2, c3] = CLUSTER_COEFFICIENTS;
            let stages = vec![stage(0, &[30, 30], &[c1, c2]), stage(1000, &[30, 30], &[c3, c1])];
            let mut cfg = clustered(stages, 0.98);
            cfg.run.iterations = 2000;
            Preset {
                name: "fig7",
                description: "two clusters whose models change at i = 1000",
                variants: vec![
                    ("clustered".into(), policy(cfg.clone(), CombinationKind::Learned)),
                    ("oracle".into(), policy(cfg, CombinationKind::Oracle)),
                ],
            }
        }
        "fig8" => {
            let [c1, c2, c3] = CLUSTER_COEFFICIENTS;
            let stages = vec![
                stage(0, &[30, 30], &[c1, c2]),
                stage(1000, &[20, 20, 20], &[c2, c3, c1]),
                stage(2000, &[25, 35], &[c3, c2]),
            ];
            let mut cfg = clustered(stages, 0.4);
            cfg.run.snapshots = vec![1000, 2000, 3000];
            Preset {
                name: "fig8",
                description: "clusters and models change at i = 1000 and i = 2000",
                variants: vec![
                    ("clustered".into(), policy(cfg.clone(), CombinationKind::Learned)),
                    ("oracle".into(), policy(cfg, CombinationKind::Oracle)),
                ],
            }
        }
        "table1" => {
            let mut cfg = base(GraphKind::KnnSensor, "normalized-adjacency", 4);
            cfg.graph.nodes = 109;
            cfg.graph.k = 7;
            cfg.run.runs = 1;
            cfg.run.theory = false;
            cfg.dataset = Some(DatasetConfig::default());
            let mk = |kind, mu, multitask: bool| {
                let mut c = with_algorithm(cfg.clone(), kind, mu);
                c.algorithm.combination = if multitask {
                    CombinationKind::Learned
                } else {
                    CombinationKind::Uniform
                };
                if let Some(ds) = c.dataset.as_mut() {
                    ds.multitask = multitask;
                }
                c
            };
            Preset {
                name: "table1",
                description: "temperature reconstruction at unobserved stations, M = 4",
                variants: vec![
                    ("multitask-lms".into(), mk(Lms, 1e-5, true)),
                    ("multitask-plms".into(), mk(Plms, 1e-4, true)),
                    ("multitask-lmsn".into(), mk(Lmsn, 1e-4, true)),
                    ("singletask-lmsn".into(), mk(Lmsn, 1e-4, false)),
                ],
            }
        }
        other => return Err(HarnessError::UnknownPreset(other.to_string())),
    };
    Ok(p)
}

pub fn scenario_library() -> Vec<Preset> {
    PRESET_NAMES
        .iter()
        .map(|n| preset(n).expect("listed presets exist"))
        .collect()
}
