use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use matr_cli::config::{DeltaMode, ExperimentConfig, ExperimentKind, GeneratorKind};
use matr_cli::{io, run_experiment, RunOptions};
use matr_core::metrics::evaluate;
use matr_core::HardMembership;

#[derive(Parser)]
#[command(name = "matr", version, about = "Max-trace tuning of clustering hyperparameters")]
struct Cli {
    /// Seeds, comma separated; each (setting, seed) pair is one run.
    #[arg(long, global = true, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON report path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML manifest; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tune λ of SDP-1 by MATR, against the CL heuristic.
    TuneLambda(Common),
    /// Tune the kernel bandwidth of spectral clustering by MATR, against DS, KNN and MST.
    TuneBandwidth {
        #[command(flatten)]
        common: Common,
        /// Standardize CSV columns.
        #[arg(long)]
        standardize: bool,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Select the number of clusters with SDP-2 and MATR-CV.
    SelectRSdp {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cv: CvArgs,
    },
    /// Select the number of MMSB communities with MATR-CV.
    SelectRMmsb {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cv: CvArgs,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Solve one SDP and round it.
    SolveSdp {
        #[command(flatten)]
        common: Common,
        /// SDP-1 penalty.
        #[arg(long, conflicts_with = "r_prime")]
        lambda: Option<f64>,
        /// SDP-2 trace.
        #[arg(long)]
        r_prime: Option<usize>,
    },
    /// Compare a predicted labeling with the truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    generator: Option<Generator>,
    /// Edge list, or CSV points for bandwidth tuning.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Generator sweep (ρ, or mixture separation), comma separated.
    #[arg(long, value_delimiter = ',')]
    settings: Option<Vec<f64>>,
    /// Candidate values, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Number of clusters.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct CvArgs {
    /// Repetitions.
    #[arg(long)]
    j_reps: Option<usize>,
    #[arg(long)]
    gamma_train: Option<f64>,
    /// Fixed trace gap; the kind's default rule otherwise.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Generator {
    SbmTuneEqual,
    SbmTuneUnequal,
    SbmSelectEqual,
    SbmSelectUnequal,
    Mmsb,
    Mixture,
}

impl From<Generator> for GeneratorKind {
    fn from(g: Generator) -> Self {
        match g {
            Generator::SbmTuneEqual => Self::SbmTuneEqual,
            Generator::SbmTuneUnequal => Self::SbmTuneUnequal,
            Generator::SbmSelectEqual => Self::SbmSelectEqual,
            Generator::SbmSelectUnequal => Self::SbmSelectUnequal,
            Generator::Mmsb => Self::Mmsb,
            Generator::Mixture => Self::Mixture,
        }
    }
}

impl Common {
    fn into_config(self, kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind: Some(kind),
            generator: self.generator.map(Into::into),
            dataset: self.dataset,
            labels: self.labels,
            settings: self.settings,
            grid: self.grid,
            r: self.r,
            n: self.n,
            restarts: self.restarts,
            tolerance: self.tolerance,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

impl CvArgs {
    fn apply(self, mut c: ExperimentConfig) -> ExperimentConfig {
        c.j_reps = self.j_reps;
        c.gamma_train = self.gamma_train;
        c.delta = self.delta.map(DeltaMode::Fixed);
        c
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let flags = match cli.cmd {
        Command::Eval { pred, truth } => return eval(&pred, &truth),
        Command::TuneLambda(c) => c.into_config(ExperimentKind::Sdp1Tune),
        Command::TuneBandwidth {
            common,
            standardize,
            weights,
            d,
        } => ExperimentConfig {
            standardize: standardize.then_some(true),
            weights,
            d,
            ..common.into_config(ExperimentKind::BandwidthTune)
        },
        Command::SelectRSdp { common, cv } => cv.apply(common.into_config(ExperimentKind::Sdp2Select)),
        Command::SelectRMmsb { common, cv, p, q } => ExperimentConfig {
            p,
            q,
            ..cv.apply(common.into_config(ExperimentKind::MmsbSelect))
        },
        Command::SolveSdp {
            common,
            lambda,
            r_prime,
        } => ExperimentConfig {
            lambda,
            r_prime,
            ..common.into_config(ExperimentKind::Custom)
        },
    };
    let flags = ExperimentConfig {
        seeds: cli.seed,
        output: cli.out,
        ..flags
    };
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let (Some(k), Some(f)) = (base.kind, flags.kind) {
        if k != f {
            log::warn!("config kind {k:?} replaced by subcommand {f:?}");
        }
    }
    let report = run_experiment(base.overlay(flags), &RunOptions { jobs: cli.jobs })?;
    print!("{}", report.summary_table());
    for r in report.runs.iter().filter(|r| r.error.is_some()) {
        eprintln!("setting {:?}, seed {}: {}", r.setting, r.seed, r.error.as_deref().unwrap_or(""));
    }
    if report.aggregates.per_setting.iter().all(|a| a.failed == a.runs) {
        anyhow::bail!("every run failed");
    }
    Ok(())
}

fn eval(pred: &std::path::Path, truth: &std::path::Path) -> anyhow::Result<()> {
    let p = HardMembership::from_labels(io::load_labels(pred)?);
    let t = HardMembership::from_labels(io::load_labels(truth)?);
    let rep = evaluate(&p, &t)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(())
}
