//! Experiment configuration, read from and written to TOML.
//!
//! Every section has defaults, so a config file only needs the keys that
//! differ from them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphConfig,
    pub shift: ShiftConfig,
    pub filter: FilterConfig,
    pub signal: SignalConfig,
    pub noise: NoiseConfig,
    pub algorithm: AlgorithmConfig,
    pub clustering: ClusteringConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig::default(),
            shift: ShiftConfig::default(),
            filter: FilterConfig::default(),
            signal: SignalConfig::default(),
            noise: NoiseConfig::default(),
            algorithm: AlgorithmConfig::default(),
            clustering: ClusteringConfig::default(),
            run: RunConfig::default(),
            output: OutputConfig::default(),
            dataset: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    ErdosRenyi,
    KnnSensor,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub kind: GraphKind,
    pub nodes: usize,
    /// Neighbors per node for the sensor graph.
    pub k: usize,
    /// Graph seed; defaults to the master seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<PathBuf>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            kind: GraphKind::KnnSensor,
            nodes: 60,
            k: 5,
            seed: None,
            edges: None,
            coords: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftConfig {
    /// `adjacency`, `normalized-adjacency`, `laplacian` or
    /// `normalized-laplacian`; ignored by the Erdős–Rényi generator, which
    /// produces its own signed shift.
    pub kind: String,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        Self {
            kind: "normalized-adjacency".into(),
        }
    }
}

/// One period of a piecewise-constant filter model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub start: usize,
    /// Sizes of consecutive node blocks forming the clusters.
    pub cluster_sizes: Vec<usize>,
    /// One coefficient vector per cluster.
    pub coefficients: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub order: usize,
    /// Node-invariant coefficients; drawn from `U(0, 1)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    /// Node-varying stages; override `coefficients` when present.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageConfig>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            order: 5,
            coefficients: None,
            stages: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    /// Independent Gaussian samples with per-node variances.
    Iid,
    /// `R_x = V diag(σ²) V^T` with `V` the graph Fourier basis.
    VertexCorrelated,
    /// `x(i) = S x(i−1) + w(i)`.
    Autoregressive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub kind: SignalKind,
    pub variance_low: f64,
    pub variance_high: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            kind: SignalKind::Iid,
            variance_low: 1.0,
            variance_high: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub variance_low: f64,
    pub variance_high: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            variance_low: 0.1,
            variance_high: 0.15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Lms,
    Lmsn,
    Plms,
    Nlms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinationKind {
    Uniform,
    NonCooperative,
    Oracle,
    Learned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    /// Uniform step size.
    pub mu: f64,
    /// When set, node `k` uses `fraction · 2/λ_max(R_{z,k})` instead of `mu`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_bound_fraction: Option<f64>,
    pub epsilon: f64,
    pub hessian_factor: f64,
    pub combination: CombinationKind,
}

impl AlgorithmConfig {
    pub fn adaptation(&self) -> graphfilt_core::adapt::Adaptation {
        use graphfilt_core::adapt::Adaptation;
        match self.kind {
            AlgorithmKind::Lms => Adaptation::Lms,
            AlgorithmKind::Lmsn => Adaptation::Newton {
                epsilon: self.epsilon,
                hessian_factor: self.hessian_factor,
            },
            AlgorithmKind::Plms => Adaptation::Preconditioned { epsilon: self.epsilon },
            AlgorithmKind::Nlms => Adaptation::NormalizedLms { epsilon: self.epsilon },
        }
    }
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            kind: AlgorithmKind::Plms,
            mu: 0.008,
            mu_bound_fraction: None,
            epsilon: 0.01,
            hessian_factor: graphfilt_core::adapt::DEFAULT_HESSIAN_FACTOR,
            combination: CombinationKind::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKind {
    Normalized,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    pub tau: f64,
    pub beta: f64,
    pub theta: f64,
    pub nu: f64,
    pub similarity: SimilarityKind,
}

impl ClusteringConfig {
    pub fn params(&self) -> graphfilt_core::clustering::ClusterParams {
        use graphfilt_core::clustering::Similarity;
        graphfilt_core::clustering::ClusterParams {
            tau: self.tau,
            beta: self.beta,
            theta: self.theta,
            nu: self.nu,
            similarity: match self.similarity {
                SimilarityKind::Normalized => Similarity::Normalized,
                SimilarityKind::Raw => Similarity::Raw,
            },
        }
    }
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            tau: 0.9,
            beta: 0.01,
            theta: 0.5,
            nu: 0.98,
            similarity: SimilarityKind::Normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub runs: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Overlay the closed-form MSD when the model allows it.
    pub theory: bool,
    /// Iterations at which clustering matrices are written.
    pub snapshots: Vec<usize>,
    /// Nodes whose estimate trajectories are written (first run only).
    pub trace_nodes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            runs: 500,
            iterations: 3000,
            seed: 1,
            theory: true,
            snapshots: Vec::new(),
            trace_nodes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Temperature reconstruction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Readings CSV (`T` rows, `N` columns); a synthetic stand-in is
    /// generated when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub readings: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<PathBuf>,
    /// Sampled node indices (0-based); chosen automatically when empty.
    pub sampled: Vec<usize>,
    /// Sampling set after `switch_at`, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_after_switch: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_at: Option<usize>,
    pub train: usize,
    pub knn: usize,
    pub sampled_count: usize,
    /// Size of the automatically chosen set after `switch_at`.
    pub sampled_count_after_switch: usize,
    /// Learn per-node coefficients (otherwise one shared vector).
    pub multitask: bool,
    /// Nodes whose reconstruction traces are written.
    pub trace_nodes: Vec<usize>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            readings: None,
            coords: None,
            sampled: Vec::new(),
            sampled_after_switch: None,
            switch_at: None,
            train: 6570,
            knn: 7,
            sampled_count: 37,
            sampled_count_after_switch: 54,
            multitask: true,
            trace_nodes: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Interprets relative file paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.graph.edges);
        fix(&mut self.graph.coords);
        if let Some(ds) = &mut self.dataset {
            fix(&mut ds.readings);
            fix(&mut ds.coords);
        }
    }

    fn check_files(&self) -> Result<(), HarnessError> {
        let mut files: Vec<&PathBuf> = Vec::new();
        files.extend(self.graph.edges.iter());
        files.extend(self.graph.coords.iter());
        if let Some(ds) = &self.dataset {
            files.extend(ds.readings.iter());
            files.extend(ds.coords.iter());
        }
        match files.into_iter().find(|p| !p.exists()) {
            Some(p) => Err(HarnessError::Config(format!("{} does not exist", p.display()))),
            None => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.run.runs == 0 {
            return fail("run.runs must be at least 1".into());
        }
        if self.run.iterations == 0 {
            return fail("run.iterations must be at least 1".into());
        }
        if self.filter.order == 0 {
            return fail("filter.order must be at least 1".into());
        }
        if self.graph.kind == GraphKind::File && self.graph.edges.is_none() {
            return fail("graph.kind = \"file\" needs graph.edges".into());
        }
        if graphfilt_core::graph::ShiftKind::parse(&self.shift.kind).is_none() {
            return fail(format!("unknown shift kind `{}`", self.shift.kind));
        }
        if let Some(h) = &self.filter.coefficients {
            if h.len() != self.filter.order {
                return fail(format!(
                    "filter.coefficients has {} entries, filter.order is {}",
                    h.len(),
                    self.filter.order
                ));
            }
        }
        for (idx, st) in self.filter.stages.iter().enumerate() {
            if st.cluster_sizes.len() != st.coefficients.len() {
                return fail(format!(
                    "stage {idx}: {} cluster sizes but {} coefficient vectors",
                    st.cluster_sizes.len(),
                    st.coefficients.len()
                ));
            }
            if st.coefficients.iter().any(|c| c.len() != self.filter.order) {
                return fail(format!("stage {idx}: coefficient length differs from filter.order"));
            }
            if idx == 0 && st.start != 0 {
                return fail("the first stage must start at 0".into());
            }
            if idx > 0 && st.start <= self.filter.stages[idx - 1].start {
                return fail("stage starts must increase".into());
            }
        }
        if !(self.signal.variance_low > 0.0 && self.signal.variance_low <= self.signal.variance_high) {
            return fail("signal variances need 0 < low <= high".into());
        }
        if !(self.noise.variance_low >= 0.0 && self.noise.variance_low <= self.noise.variance_high) {
            return fail("noise variances need 0 <= low <= high".into());
        }
        if !(self.algorithm.mu >= 0.0) {
            return fail("algorithm.mu must be nonnegative".into());
        }
        Ok(())
    }
}
