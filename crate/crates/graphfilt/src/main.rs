use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graphfilt::config::{CombinationKind, ExperimentConfig};
use graphfilt::dataset::{prepare_reconstruction, reconstruct_experiment};
use graphfilt::experiment::{theory_curve, Experiment};
use graphfilt::monte_carlo::{run_monte_carlo, theory_overlay, Recording};
use graphfilt::{io, presets, HarnessError, Result};
use graphfilt_core::theory::{self, to_db};

/// Adaptive graph-filter estimation over networks.
#[derive(Parser)]
#[command(name = "graphfilt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo MSD curves, with the theory overlay when one applies.
    Simulate(WithConfig),
    /// Closed-form transient and steady-state MSD.
    Theory(WithConfig),
    /// Simulation that also writes clustering matrices.
    Cluster(WithConfig),
    /// Temperature reconstruction at unobserved stations.
    Reconstruct(WithConfig),
    /// Runs a named preset, or writes its configs with `--emit-config`.
    Preset {
        /// fig1, fig2a, fig2b, fig2c, fig3, fig4, fig5, fig7, fig8 or table1.
        name: String,
        /// Write one config per variant instead of running.
        #[arg(long)]
        emit_config: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct WithConfig {
    /// Experiment file (TOML).
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Iterations per run.
    #[arg(long)]
    iters: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(r) = self.runs {
            cfg.run.runs = r;
        }
        if let Some(i) = self.iters {
            cfg.run.iterations = i;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        cfg.validate()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(wc: &WithConfig) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&wc.config)?;
    wc.overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(wc) => simulate(&load(&wc)?, false),
        Command::Cluster(wc) => simulate(&load(&wc)?, true),
        Command::Theory(wc) => theory_only(&load(&wc)?),
        Command::Reconstruct(wc) => reconstruct(&load(&wc)?),
        Command::Preset {
            name,
            emit_config,
            overrides,
        } => preset(&name, emit_config, &overrides),
    }
}

fn out_dir(cfg: &ExperimentConfig) -> Result<&Path> {
    let dir = cfg.output.dir.as_path();
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(dir)
}

fn simulate(cfg: &ExperimentConfig, clusters: bool) -> Result<()> {
    let seed = cfg.run.seed;
    let iters = cfg.run.iterations;
    let exp = Experiment::build(cfg, seed)?;
    let mut snapshots = cfg.run.snapshots.clone();
    if clusters && snapshots.is_empty() {
        snapshots.push(iters);
    }
    let recording = Recording {
        snapshots,
        trace_nodes: cfg.run.trace_nodes.clone(),
    };
    let mc = run_monte_carlo(&exp, cfg.run.runs, iters, seed, &recording)?;
    let overlay = if cfg.run.theory {
        match theory_overlay(&exp, iters) {
            Some(Ok((curve, steady))) => Some((curve, steady)),
            Some(Err(e)) => {
                log::warn!("no theory overlay: {e}");
                None
            }
            None => None,
        }
    } else {
        None
    };
    let dir = out_dir(cfg)?;
    io::write_msd_csv(&dir.join("msd.csv"), &mc.mean_msd, overlay.as_ref().map(|o| o.0.as_slice()))?;
    for (trace, &k) in mc.traces.iter().zip(&cfg.run.trace_nodes) {
        io::write_trace_csv(&dir.join(format!("trace_node{}.csv", k + 1)), k, exp.order, trace)?;
    }
    if clusters || !cfg.run.snapshots.is_empty() {
        if let Some(first) = mc.runs.first() {
            for (i, e) in &first.snapshots {
                io::write_cluster_csv(&dir.join(format!("clusters_{i}.csv")), e)?;
            }
        }
    }
    let window = (iters / 10).max(1);
    println!(
        "{} of {} runs completed; steady-state MSD {:.2} dB (last {window} iterations)",
        mc.completed,
        cfg.run.runs,
        to_db(mc.steady_state(window))
    );
    if let Some((_, steady)) = overlay {
        println!("theory steady-state MSD {:.2} dB", to_db(steady));
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn theory_only(cfg: &ExperimentConfig) -> Result<()> {
    let exp = Experiment::build(cfg, cfg.run.seed)?;
    let tm = exp.theory_model().ok_or_else(|| {
        HarnessError::Config(
            "no closed-form model: needs one stage, a fixed combination and a non-normalized update"
                .into(),
        )
    })??;
    let stability = theory::mean_stability(&tm)?;
    println!(
        "mean stability: spectral radius {:.6} ({:?})",
        stability.spectral_radius, stability.status
    );
    let (curve, steady) = theory_curve(&tm, cfg.run.iterations)?;
    let dir = out_dir(cfg)?;
    io::write_theory_csv(&dir.join("theory.csv"), &curve)?;
    println!("steady-state MSD {:.2} dB", to_db(steady));
    println!("wrote {}", dir.display());
    Ok(())
}

fn reconstruct(cfg: &ExperimentConfig) -> Result<()> {
    let (ds, plan, settings) = prepare_reconstruction(cfg, cfg.run.seed)?;
    let rec = reconstruct_experiment(&ds, &plan, &settings)?;
    let dir = out_dir(cfg)?;
    let mut report = format!("nmse {}\n", rec.nmse);
    if let Some(t) = &rec.tracking {
        report.push_str(&format!(
            "switch_at {}\nnmse_frozen {}\nnmse_adapted {}\n",
            t.switch_at, t.frozen, t.adapted
        ));
    }
    let path = dir.join("nmse.txt");
    fs::write(&path, &report).map_err(|source| HarnessError::Io { path, source })?;
    let start = plan.switch.as_ref().map_or(settings.train, |(t, _)| *t);
    let trace_nodes = cfg.dataset.as_ref().map(|d| d.trace_nodes.clone()).unwrap_or_default();
    for &k in &trace_nodes {
        if k >= ds.n_stations() {
            return Err(HarnessError::Config(format!("trace node {k} outside 0..{}", ds.n_stations())));
        }
        let rows: Vec<Vec<f64>> = (start..ds.n_hours())
            .map(|i| vec![i as f64, ds.readings()[(i, k)], rec.estimates[(i, k)]])
            .collect();
        io::write_matrix_csv(&dir.join(format!("trace_node{}.csv", k + 1)), &rows)?;
    }
    if let Some(e) = &rec.clusters {
        io::write_cluster_csv(&dir.join(format!("clusters_{}.csv", ds.n_hours())), e)?;
    }
    print!("{report}");
    println!("wrote {}", dir.display());
    Ok(())
}

fn preset(name: &str, emit: bool, overrides: &Overrides) -> Result<()> {
    let p = presets::preset(name)?;
    let root = overrides
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(p.name));
    for (variant, cfg) in &p.variants {
        let mut cfg = cfg.clone();
        let sub = Overrides {
            out: Some(root.join(variant)),
            ..overrides.clone()
        };
        sub.apply(&mut cfg)?;
        if emit {
            fs::create_dir_all(&root).map_err(|source| HarnessError::Io {
                path: root.clone(),
                source,
            })?;
            let path = root.join(format!("{variant}.toml"));
            fs::write(&path, cfg.to_toml()).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            println!("{}", path.display());
            continue;
        }
        println!("== {}/{variant}", p.name);
        if cfg.dataset.is_some() {
            reconstruct(&cfg)?;
        } else {
            let learned = cfg.algorithm.combination == CombinationKind::Learned;
            simulate(&cfg, learned && !cfg.run.snapshots.is_empty())?;
        }
    }
    Ok(())
}
