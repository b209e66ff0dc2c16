//! Executes a resolved [`ExperimentConfig`].

use std::time::Instant;

use rayon::prelude::*;

use matr_core::metrics::{exact_recovery, nmi};
use matr_core::rng::derive_seed;
use matr_core::sdp::{solve_sdp1, solve_sdp2, spectral_round, SolverOptions};
use matr_core::similarity::{gaussian_kernel, neg_sq_dist};
use matr_core::tuning::{
    baseline_bandwidth, lambda_cl, matr, matr_cv, spectral_clustering, BandwidthHeuristic, CandidateGrid,
    CvModel, CvOptions, DeltaRule, MmsbCv, Sdp1Path, Sdp2Cv, SelectionResult,
};
use matr_core::{AdjacencyMatrix, HardMembership, Matrix};

use crate::config::{DeltaMode, ExperimentConfig, ExperimentKind};
use crate::recipes::{self, Data};
use crate::report::{Baseline, RepLog, RunReport, SeedRun, SolveLog, WallTime};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
}

/// Resolves `config`, runs every `(setting, seed)` pair and writes the report
/// to `config.output` when set. A failing pair is recorded in its run entry
/// and the others continue.
pub fn run_experiment(config: ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let cfg = config.resolved()?;
    let dataset = recipes::load_dataset(&cfg)?;
    let settings: Vec<Option<f64>> = match &cfg.settings {
        Some(s) => s.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let seeds = cfg.seeds.clone().unwrap_or_default();
    let pairs: Vec<(Option<f64>, u64)> =
        settings.iter().flat_map(|&s| seeds.iter().map(move |&seed| (s, seed))).collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let results: Vec<(SeedRun, f64)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(setting, seed)| {
                let t0 = Instant::now();
                let run = run_pair(&cfg, dataset.as_ref(), setting, seed);
                (run, t0.elapsed().as_secs_f64())
            })
            .collect()
    });
    let (runs, per_run_s): (Vec<SeedRun>, Vec<f64>) = results.into_iter().unzip();
    let report = RunReport::new(
        cfg.clone(),
        runs,
        WallTime {
            total_s: start.elapsed().as_secs_f64(),
            per_run_s,
        },
    );
    if let Some(path) = &cfg.output {
        report.write(path)?;
    }
    Ok(report)
}

fn run_pair(cfg: &ExperimentConfig, dataset: Option<&Data>, setting: Option<f64>, seed: u64) -> SeedRun {
    let data = match (dataset, setting) {
        (Some(d), _) => Ok(d.clone()),
        (None, Some(s)) => recipes::generate(cfg, s, seed),
        (None, None) => Err(CliError::Config("no input".into())),
    };
    let result = data.and_then(|data| {
        let mut run = match cfg.kind.expect("resolved config has a kind") {
            ExperimentKind::Sdp1Tune => sdp1_tune(cfg, &data, seed),
            ExperimentKind::BandwidthTune => bandwidth_tune(cfg, &data, seed),
            ExperimentKind::Sdp2Select => {
                let model = Sdp2Cv {
                    opts: solver_options(cfg),
                    restarts: restarts(cfg),
                };
                select(cfg, &data, seed, &model, false)
            }
            ExperimentKind::MmsbSelect => select(cfg, &data, seed, &MmsbCv, true),
            ExperimentKind::Custom => custom(cfg, &data, seed),
        }?;
        run.setting = setting;
        run.seed = seed;
        Ok(run)
    });
    result.unwrap_or_else(|e| {
        log::warn!("setting {setting:?}, seed {seed}: {e}");
        SeedRun {
            setting,
            seed,
            error: Some(e.to_string()),
            ..Default::default()
        }
    })
}

pub fn solver_options(cfg: &ExperimentConfig) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(t) = cfg.tolerance {
        o.tolerance = t;
    }
    if let Some(m) = cfg.max_iter {
        o.max_iter = m;
    }
    o
}

fn restarts(cfg: &ExperimentConfig) -> usize {
    cfg.restarts.unwrap_or(matr_core::matrices::DEFAULT_RESTARTS)
}

/// Adjacency, hard labels and true cluster count of a graph input.
type GraphParts<'a> = (&'a AdjacencyMatrix, Option<&'a [usize]>, Option<usize>);

fn graph(data: &Data) -> Result<GraphParts<'_>, CliError> {
    match data {
        Data::Graph { a, truth, r_true } => Ok((a, truth.as_deref(), *r_true)),
        Data::Points { .. } => Err(CliError::Config("this kind needs a graph".into())),
    }
}

fn cluster_count(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    cfg.r.ok_or_else(|| CliError::Config("cluster count `r` is required".into()))
}

/// `(nmi, exact)` against the truth, when there is one.
fn score(pred: &HardMembership, truth: Option<&[usize]>) -> Result<(Option<f64>, Option<bool>), CliError> {
    let Some(t) = truth else {
        return Ok((None, None));
    };
    let z0 = HardMembership::from_labels(t.to_vec());
    Ok((Some(nmi(pred.labels(), t)?), Some(exact_recovery(pred, &z0))))
}

fn f64_grid(cfg: &ExperimentConfig) -> Result<Option<CandidateGrid<f64>>, CliError> {
    Ok(cfg.grid.clone().map(CandidateGrid::new).transpose()?)
}

fn sdp1_tune(cfg: &ExperimentConfig, data: &Data, seed: u64) -> Result<SeedRun, CliError> {
    let (a, truth, _) = graph(data)?;
    let r = cluster_count(cfg)?;
    let grid = f64_grid(cfg)?.unwrap_or_else(CandidateGrid::lambda_default);
    let opts = solver_options(cfg);
    let s_hat = a.to_dense();
    let mut path = Sdp1Path::new(a, r, opts.clone(), restarts(cfg), seed);
    let res = matr(&grid, &s_hat, |l| path.cluster(l))?;
    let pred = res.chosen_membership().hard_labels();
    let (nmi_v, exact) = score(&pred, truth)?;

    let lam = lambda_cl(a);
    let cl = solve_sdp1(a, lam, &opts)
        .and_then(|sol| spectral_round(&sol.x_tilde, r, restarts(cfg), derive_seed(seed, &[lam.to_bits()])));
    let baseline = match cl {
        Ok(z) => Baseline {
            name: "cl".into(),
            value: Some(lam),
            nmi: score(&z, truth)?.0,
            error: None,
        },
        Err(e) => Baseline {
            name: "cl".into(),
            value: Some(lam),
            nmi: None,
            error: Some(e.to_string()),
        },
    };
    Ok(SeedRun {
        chosen: Some(res.chosen),
        nmi: nmi_v,
        exact,
        traces: res.traces,
        baselines: vec![baseline],
        solver: path
            .log
            .iter()
            .map(|&(param, iterations, converged)| SolveLog {
                param,
                iterations,
                converged,
            })
            .collect(),
        failures: res.failures.iter().map(|(t, m)| format!("candidate {t}: {m}")).collect(),
        ..Default::default()
    })
}

fn kernel_clusters(y: &Matrix, theta: f64, r: usize, restarts: usize, seed: u64) -> matr_core::Result<HardMembership> {
    spectral_clustering(&gaussian_kernel(y, theta)?, r, restarts, derive_seed(seed, &[theta.to_bits()]))
}

fn bandwidth_tune(cfg: &ExperimentConfig, data: &Data, seed: u64) -> Result<SeedRun, CliError> {
    let Data::Points { y, truth } = data else {
        return Err(CliError::Config("bandwidth tuning needs points".into()));
    };
    let truth = truth.as_deref();
    let r = cluster_count(cfg)?;
    let grid = match f64_grid(cfg)? {
        Some(g) => g,
        None => CandidateGrid::bandwidth(y)?,
    };
    let res = matr(&grid, &neg_sq_dist(y), |t| kernel_clusters(y, t, r, restarts(cfg), seed).map(Into::into))?;
    let pred = res.chosen_membership().hard_labels();
    let (nmi_v, exact) = score(&pred, truth)?;
    let mut baselines = Vec::new();
    for (name, h) in [
        ("ds", BandwidthHeuristic::Ds),
        ("knn", BandwidthHeuristic::Knn),
        ("mst", BandwidthHeuristic::Mst),
    ] {
        let b = baseline_bandwidth(y, h).and_then(|t| Ok((t, kernel_clusters(y, t, r, restarts(cfg), seed)?)));
        baselines.push(match b {
            Ok((t, z)) => Baseline {
                name: name.into(),
                value: Some(t),
                nmi: score(&z, truth)?.0,
                error: None,
            },
            Err(e) => Baseline {
                name: name.into(),
                value: None,
                nmi: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(SeedRun {
        chosen: Some(res.chosen),
        nmi: nmi_v,
        exact,
        traces: res.traces,
        baselines,
        failures: res.failures.iter().map(|(t, m)| format!("candidate {t}: {m}")).collect(),
        ..Default::default()
    })
}

fn count_grid(cfg: &ExperimentConfig, a: &AdjacencyMatrix, mmsb: bool) -> Result<CandidateGrid<usize>, CliError> {
    match &cfg.grid {
        Some(g) => {
            let v: Vec<usize> = g
                .iter()
                .map(|&x| {
                    if x >= 1.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(CliError::Config(format!("cluster count {x} is not a positive integer")))
                    }
                })
                .collect::<Result<_, _>>()?;
            Ok(CandidateGrid::new(v)?)
        }
        None if mmsb => Ok(CandidateGrid::up_to_density(a)?),
        None => Ok(CandidateGrid::up_to_sqrt(a.n())?),
    }
}

fn select(cfg: &ExperimentConfig, data: &Data, seed: u64, model: &dyn CvModel, mmsb: bool) -> Result<SeedRun, CliError> {
    let (a, _, r_true) = graph(data)?;
    let grid = count_grid(cfg, a, mmsb)?;
    let delta = match cfg.delta.unwrap_or(DeltaMode::Sdp2) {
        DeltaMode::Sdp2 => DeltaRule::Sdp2,
        DeltaMode::MmsbHalving => DeltaRule::MmsbHalving,
        DeltaMode::Fixed(d) => DeltaRule::Fixed(d),
    };
    let cv = CvOptions {
        j_reps: cfg.j_reps.unwrap_or(5),
        gamma_train: cfg.gamma_train.unwrap_or(0.5),
        delta,
        seed,
    };
    let res: SelectionResult = matr_cv(model, a, &grid, &cv)?;
    let mut failures = Vec::new();
    for (j, rep) in res.per_rep.iter().enumerate() {
        for (t, m) in &rep.failures {
            failures.push(format!("repetition {j}, candidate {t}: {m}"));
        }
    }
    if res.dropped > 0 {
        failures.push(format!("{} repetition(s) dropped", res.dropped));
    }
    Ok(SeedRun {
        r_hat: Some(res.r_hat),
        exact: r_true.map(|r| r == res.r_hat),
        repetitions: res
            .per_rep
            .into_iter()
            .map(|r| RepLog {
                r_star: r.r_star,
                delta: r.delta,
                traces: r.traces,
            })
            .collect(),
        failures,
        ..Default::default()
    })
}

fn custom(cfg: &ExperimentConfig, data: &Data, seed: u64) -> Result<SeedRun, CliError> {
    let (a, truth, _) = graph(data)?;
    let opts = solver_options(cfg);
    let (sol, r, param) = match (cfg.lambda, cfg.r_prime) {
        (Some(l), None) => (solve_sdp1(a, l, &opts)?, cluster_count(cfg)?, l),
        (None, Some(rp)) => (solve_sdp2(a, rp, &opts)?, rp, rp as f64),
        _ => return Err(CliError::Config("custom runs need exactly one of `lambda`, `r_prime`".into())),
    };
    let z = spectral_round(&sol.x_tilde, r, restarts(cfg), seed)?;
    let (nmi_v, exact) = score(&z, truth)?;
    Ok(SeedRun {
        chosen: Some(param),
        nmi: nmi_v,
        exact,
        solver: vec![SolveLog {
            param,
            iterations: sol.iterations,
            converged: sol.converged,
        }],
        ..Default::default()
    })
}
