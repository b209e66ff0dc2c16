//! Flat experiment manifests.
//!
//! ```toml
//! kind = "sdp2-select"
//! generator = "sbm-select-equal"
//! settings = [0.2, 0.3, 0.4, 0.5, 0.6]   # ρ, or the mixture separation
//! seeds = [0, 1, 2, 3, 4]
//! j_reps = 5
//! gamma_train = 0.5
//! delta = "sdp2"
//! ```
//!
//! Every key but `kind` is optional; [`ExperimentConfig::resolved`] fills in
//! the recipe defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// MATR over `λ` for SDP-1, against the CL baseline.
    Sdp1Tune,
    /// MATR over the Gaussian-kernel bandwidth, against DS, KNN and MST.
    BandwidthTune,
    /// MATR-CV with the SDP-2 clusterer.
    Sdp2Select,
    /// MATR-CV with eigen + SPA estimation.
    MmsbSelect,
    /// A single SDP solve (`lambda` for SDP-1 or `r_prime` for SDP-2).
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// 4 × 100 nodes, `B` with 0.8 / 0.6 / 0.3 blocks.
    SbmTuneEqual,
    /// 100, 50, 100, 50 nodes, same `B`.
    SbmTuneUnequal,
    /// 4 × 100 nodes, `B` with 0.8 / 0.5 / 0.3 blocks.
    SbmSelectEqual,
    /// 120, 80, 120, 80 nodes, same `B`.
    SbmSelectUnequal,
    /// `B = (p − q)I + qE`, Dirichlet(1/r) memberships.
    Mmsb,
    /// Three Gaussian components in `d` dimensions.
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    Sdp2,
    MmsbHalving,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub generator: Option<GeneratorKind>,
    /// Edge list (graph kinds) or CSV points (bandwidth).
    pub dataset: Option<PathBuf>,
    /// Ground-truth labels for a dataset.
    pub labels: Option<PathBuf>,
    /// Swept generator parameter: `ρ` for graphs, separation for mixtures.
    /// Absent for datasets.
    pub settings: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    /// Known cluster count (tuning) or true count (MMSB generator).
    pub r: Option<usize>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub d: Option<usize>,
    pub weights: Option<Vec<f64>>,
    pub standardize: Option<bool>,
    pub grid: Option<Vec<f64>>,
    pub j_reps: Option<usize>,
    pub gamma_train: Option<f64>,
    pub delta: Option<DeltaMode>,
    pub restarts: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub lambda: Option<f64>,
    pub r_prime: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(mut self, over: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            kind, generator, dataset, labels, settings, seeds, r, n, p, q, d, weights, standardize, grid,
            j_reps, gamma_train, delta, restarts, tolerance, max_iter, lambda, r_prime, output
        );
        self
    }

    /// Fills recipe defaults and checks the combination is runnable.
    pub fn resolved(mut self) -> Result<Self, CliError> {
        let kind = self.kind.ok_or_else(|| CliError::Config("missing `kind`".into()))?;
        match (&self.generator, &self.dataset) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("set either `generator` or `dataset`, not both".into()))
            }
            (None, None) => {
                self.generator = Some(match kind {
                    ExperimentKind::Sdp1Tune | ExperimentKind::Custom => GeneratorKind::SbmTuneEqual,
                    ExperimentKind::BandwidthTune => GeneratorKind::Mixture,
                    ExperimentKind::Sdp2Select => GeneratorKind::SbmSelectEqual,
                    ExperimentKind::MmsbSelect => GeneratorKind::Mmsb,
                });
            }
            _ => {}
        }
        if let Some(g) = self.generator {
            let ok = match kind {
                ExperimentKind::BandwidthTune => g == GeneratorKind::Mixture,
                ExperimentKind::MmsbSelect => g == GeneratorKind::Mmsb,
                _ => !matches!(g, GeneratorKind::Mixture | GeneratorKind::Mmsb),
            };
            if !ok {
                return Err(CliError::Config(format!("generator {g:?} does not fit kind {kind:?}")));
            }
        }
        if self.generator.is_none() {
            if self.settings.is_some() {
                return Err(CliError::Config("`settings` only applies to generators".into()));
            }
        } else if self.settings.is_none() {
            self.settings = Some(match kind {
                ExperimentKind::Sdp1Tune => vec![0.2, 0.4, 0.6, 0.8, 1.0],
                ExperimentKind::BandwidthTune => vec![0.0, 50.0, 100.0, 150.0, 200.0],
                ExperimentKind::Sdp2Select => vec![0.2, 0.3, 0.4, 0.5, 0.6],
                ExperimentKind::MmsbSelect => vec![0.01, 0.05, 0.11, 0.13],
                ExperimentKind::Custom => vec![0.6],
            });
        }
        if self.settings.as_ref().is_some_and(|s| s.is_empty()) {
            return Err(CliError::Config("`settings` must be non-empty".into()));
        }
        if self.seeds.as_ref().is_none_or(|s| s.is_empty()) {
            if self.seeds.is_some() {
                return Err(CliError::Config("`seeds` must be non-empty".into()));
            }
            self.seeds = Some((0..5).collect());
        }
        self.r = self.r.or(match (kind, self.generator) {
            (_, Some(GeneratorKind::Mixture)) => Some(3),
            (_, Some(_)) => Some(4),
            _ => None,
        });
        if matches!(kind, ExperimentKind::Sdp1Tune | ExperimentKind::BandwidthTune) && self.r.is_none() {
            return Err(CliError::Config("tuning needs the cluster count `r`".into()));
        }
        if kind == ExperimentKind::Custom && self.lambda.is_none() == self.r_prime.is_none() {
            return Err(CliError::Config("custom runs need exactly one of `lambda`, `r_prime`".into()));
        }
        self.n = self.n.or(match self.generator {
            Some(GeneratorKind::Mmsb) => Some(2000),
            Some(GeneratorKind::Mixture) => Some(500),
            _ => None,
        });
        if self.generator == Some(GeneratorKind::Mmsb) {
            self.p = self.p.or(Some(1.0));
            self.q = self.q.or(Some(0.1));
        }
        if self.generator == Some(GeneratorKind::Mixture) {
            self.d = self.d.or(Some(20));
        }
        self.j_reps = self.j_reps.or(Some(5));
        self.gamma_train = self.gamma_train.or(Some(0.5));
        self.delta = self.delta.or(match kind {
            ExperimentKind::MmsbSelect => Some(DeltaMode::MmsbHalving),
            _ => Some(DeltaMode::Sdp2),
        });
        self.restarts = self.restarts.or(Some(matr_core::matrices::DEFAULT_RESTARTS));
        self.standardize = self.standardize.or(Some(false));
        self.kind = Some(kind);
        Ok(self)
    }
}
