//! Synthetic settings and dataset loading for each experiment kind.

use matr_core::generators::{
    sample_mixture, sample_mmsb, sample_sbm, sparse_means, MixtureParams, MmsbParams, SbmParams,
};
use matr_core::rng::derive_seed;
use matr_core::{AdjacencyMatrix, Matrix};

use crate::config::{ExperimentConfig, ExperimentKind, GeneratorKind};
use crate::{io, CliError};

/// Hierarchical 4-block `B`: 0.8 on the diagonal, `near` between blocks 1–2
/// and 3–4, 0.3 elsewhere.
pub fn hierarchical_b(near: f64) -> Matrix {
    Matrix::from_fn(4, 4, |i, j| {
        if i == j {
            0.8
        } else if i / 2 == j / 2 {
            near
        } else {
            0.3
        }
    })
}

pub fn sbm_params(g: GeneratorKind, rho: f64) -> Result<SbmParams, CliError> {
    let (near, sizes) = match g {
        GeneratorKind::SbmTuneEqual => (0.6, vec![100; 4]),
        GeneratorKind::SbmTuneUnequal => (0.6, vec![100, 50, 100, 50]),
        GeneratorKind::SbmSelectEqual => (0.5, vec![100; 4]),
        GeneratorKind::SbmSelectUnequal => (0.5, vec![120, 80, 120, 80]),
        other => return Err(CliError::Config(format!("{other:?} is not an SBM generator"))),
    };
    Ok(SbmParams::new(hierarchical_b(near), sizes, rho)?)
}

/// Three components, means `N(0, 0.1²)` in the first two of `d`
/// coordinates times `separation`, unit noise.
pub fn mixture_params(
    separation: f64,
    n: usize,
    d: usize,
    weights: Option<&[f64]>,
    seed: u64,
) -> Result<MixtureParams, CliError> {
    let r = 3;
    let weights = weights.map_or_else(|| vec![1.0 / r as f64; r], <[f64]>::to_vec);
    if weights.len() != r {
        return Err(CliError::Config(format!("mixture needs {r} weights")));
    }
    let p = MixtureParams {
        means: sparse_means(r, d, 2.min(d), 0.1, separation, seed)?,
        sigmas: vec![1.0; r],
        weights,
        n,
    };
    p.validate()?;
    Ok(p)
}

/// Input to one run.
#[derive(Debug, Clone)]
pub enum Data {
    Graph {
        a: AdjacencyMatrix,
        /// Hard labels when known.
        truth: Option<Vec<usize>>,
        /// True cluster count when known.
        r_true: Option<usize>,
    },
    Points {
        y: Matrix,
        truth: Option<Vec<usize>>,
    },
}

/// Loads the configured dataset once; `None` for generator configs.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Option<Data>, CliError> {
    let Some(path) = &cfg.dataset else {
        return Ok(None);
    };
    let truth = cfg.labels.as_deref().map(io::load_labels).transpose()?;
    let r_true = truth.as_ref().map(|t| distinct(t));
    let data = if cfg.kind == Some(ExperimentKind::BandwidthTune) {
        let y = io::load_points_csv(path, cfg.standardize.unwrap_or(false))?;
        if let Some(t) = &truth {
            check_len(t.len(), y.rows())?;
        }
        Data::Points { y, truth }
    } else {
        let a = io::load_edge_list(path)?;
        if let Some(t) = &truth {
            check_len(t.len(), a.n())?;
        }
        Data::Graph { a, truth, r_true }
    };
    Ok(Some(data))
}

fn check_len(labels: usize, n: usize) -> Result<(), CliError> {
    if labels != n {
        return Err(CliError::Config(format!("{labels} labels for {n} items")));
    }
    Ok(())
}

fn distinct(labels: &[usize]) -> usize {
    let mut v = labels.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Draws the synthetic input for one `(setting, seed)` pair.
pub fn generate(cfg: &ExperimentConfig, setting: f64, seed: u64) -> Result<Data, CliError> {
    let g = cfg
        .generator
        .ok_or_else(|| CliError::Config("no generator configured".into()))?;
    match g {
        GeneratorKind::Mmsb => {
            let r = cfg.r.unwrap_or(4);
            let p = MmsbParams::symmetric(
                r,
                cfg.p.unwrap_or(1.0),
                cfg.q.unwrap_or(0.1),
                cfg.n.unwrap_or(2000),
                setting,
            )?;
            let (a, _) = sample_mmsb(&p, seed)?;
            Ok(Data::Graph {
                a,
                truth: None,
                r_true: Some(r),
            })
        }
        GeneratorKind::Mixture => {
            let p = mixture_params(
                setting,
                cfg.n.unwrap_or(500),
                cfg.d.unwrap_or(20),
                cfg.weights.as_deref(),
                derive_seed(seed, &[0]),
            )?;
            let s = sample_mixture(&p, seed)?;
            Ok(Data::Points {
                y: s.y,
                truth: Some(s.truth.into_labels()),
            })
        }
        sbm => {
            let p = sbm_params(sbm, setting)?;
            let (a, z) = sample_sbm(&p, seed)?;
            Ok(Data::Graph {
                a,
                truth: Some(z.into_labels()),
                r_true: Some(p.r()),
            })
        }
    }
}
