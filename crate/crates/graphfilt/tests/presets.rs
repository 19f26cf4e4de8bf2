use graphfilt::config::{AlgorithmKind, CombinationKind, GraphKind, SignalKind};
use graphfilt::experiment::Experiment;
use graphfilt::presets::{self, CLUSTER_COEFFICIENTS, PRESET_NAMES};

fn mu_of(name: &str, kind: AlgorithmKind) -> f64 {
    presets::preset(name)
        .unwrap()
        .variants
        .iter()
        .find(|(_, c)| c.algorithm.kind == kind)
        .map(|(_, c)| c.algorithm.mu)
        .unwrap()
}

#[test]
fn every_preset_builds() {
    for name in PRESET_NAMES {
        let p = presets::preset(name).unwrap();
        assert!(!p.variants.is_empty());
        for (label, cfg) in &p.variants {
            cfg.validate().unwrap_or_else(|e| panic!("{name}/{label}: {e}"));
            if cfg.dataset.is_none() {
                Experiment::build(cfg, 1).unwrap_or_else(|e| panic!("{name}/{label}: {e}"));
            }
        }
    }
    let err = presets::preset("fig6").err().unwrap();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn fig1_scale() {
    for (_, cfg) in presets::preset("fig1").unwrap().variants {
        assert_eq!(cfg.graph.kind, GraphKind::ErdosRenyi);
        assert_eq!(cfg.graph.nodes, 60);
        assert_eq!(cfg.filter.order, 5);
        assert_eq!(cfg.run.runs, 500);
    }
}

#[test]
fn fig4_step_sizes() {
    assert_eq!(mu_of("fig4", AlgorithmKind::Lms), 0.1);
    assert_eq!(mu_of("fig4", AlgorithmKind::Lmsn), 0.038);
    assert_eq!(mu_of("fig4", AlgorithmKind::Plms), 0.03);
    for (_, cfg) in presets::preset("fig4").unwrap().variants {
        assert_eq!(cfg.signal.kind, SignalKind::Autoregressive);
        assert_eq!(cfg.algorithm.epsilon, 0.1);
    }
}

#[test]
fn fig5_clusters() {
    assert_eq!(
        CLUSTER_COEFFICIENTS,
        [[0.5, 0.4, 0.9], [0.3, 0.1, 0.4], [0.9, 0.3, 0.7]]
    );
    let p = presets::preset("fig5").unwrap();
    let (_, learned) = &p.variants[0];
    assert_eq!(learned.algorithm.combination, CombinationKind::Learned);
    let c = &learned.clustering;
    assert_eq!((c.tau, c.beta, c.theta, c.nu), (0.9, 0.01, 0.5, 0.98));
    let exp = Experiment::build(learned, 1).unwrap();
    assert_eq!(exp.n_nodes(), 60);
    let labels = &exp.stages[0].labels;
    for q in 0..3 {
        assert_eq!(labels.iter().filter(|&&l| l == q).count(), 20);
    }
    for k in 0..60 {
        assert_eq!(exp.stages[0].filter.coefficients(k), &CLUSTER_COEFFICIENTS[labels[k]]);
    }
}
