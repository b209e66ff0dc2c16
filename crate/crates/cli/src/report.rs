//! JSON run reports.
//!
//! `runs` holds one entry per `(setting, seed)` and is fully determined by the
//! config. `aggregates.per_setting` is a pure function of `runs`
//! ([`aggregate`]); wall-clock times live beside it in `aggregates.wall_time`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub runs: Vec<SeedRun>,
    pub aggregates: Aggregates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub per_setting: Vec<Aggregate>,
    pub wall_time: WallTime,
    pub conventions: Conventions,
}

/// Choices that affect how the numbers in a report compare with others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    /// NMI normalization.
    pub nmi: String,
    /// Degree quantiles kept by the CL heuristic.
    pub cl_degree_band: [f64; 2],
    pub log: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            nmi: "geometric-mean".into(),
            cl_degree_band: [0.25, 0.75],
            log: "natural".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WallTime {
    pub total_s: f64,
    /// Parallel to `runs`.
    pub per_run_s: Vec<f64>,
}

/// Result of one `(setting, seed)` pair.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeedRun {
    /// Generator parameter; `None` for datasets.
    pub setting: Option<f64>,
    pub seed: u64,
    /// Tuned `λ` or bandwidth.
    pub chosen: Option<f64>,
    /// Selected cluster count.
    pub r_hat: Option<usize>,
    /// Against the ground truth, when labels are known.
    pub nmi: Option<f64>,
    /// Exact label recovery (tuning) or `r̂ = r` (selection).
    pub exact: Option<bool>,
    /// MATR traces per candidate.
    pub traces: Vec<Option<f64>>,
    pub baselines: Vec<Baseline>,
    pub solver: Vec<SolveLog>,
    pub repetitions: Vec<RepLog>,
    pub failures: Vec<String>,
    /// Set when the whole run failed; the other fields are then empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub name: String,
    pub value: Option<f64>,
    pub nmi: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveLog {
    pub param: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// One MATR-CV repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepLog {
    pub r_star: usize,
    pub delta: f64,
    pub traces: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub setting: Option<f64>,
    pub runs: usize,
    pub failed: usize,
    pub nmi_mean: Option<f64>,
    pub nmi_median: Option<f64>,
    /// Population standard deviation.
    pub nmi_std: Option<f64>,
    /// Lower median.
    pub r_hat_median: Option<usize>,
    /// Fraction of runs with `exact = true` among those reporting it.
    pub exact_fraction: Option<f64>,
    pub baseline_nmi_mean: Vec<(String, f64)>,
}

/// Groups runs by setting, in first-appearance order.
pub fn aggregate(runs: &[SeedRun]) -> Vec<Aggregate> {
    let mut keys: Vec<Option<f64>> = Vec::new();
    for r in runs {
        if !keys.iter().any(|k| same_setting(*k, r.setting)) {
            keys.push(r.setting);
        }
    }
    keys.into_iter()
        .map(|key| {
            let group: Vec<&SeedRun> = runs.iter().filter(|r| same_setting(r.setting, key)).collect();
            let nmis: Vec<f64> = group.iter().filter_map(|r| r.nmi).collect();
            let mut r_hats: Vec<usize> = group.iter().filter_map(|r| r.r_hat).collect();
            r_hats.sort_unstable();
            let exact: Vec<bool> = group.iter().filter_map(|r| r.exact).collect();
            let mut names: Vec<&str> = Vec::new();
            for r in &group {
                for b in &r.baselines {
                    if !names.contains(&b.name.as_str()) {
                        names.push(&b.name);
                    }
                }
            }
            let baseline_nmi_mean = names
                .into_iter()
                .filter_map(|name| {
                    let v: Vec<f64> = group
                        .iter()
                        .flat_map(|r| r.baselines.iter())
                        .filter(|b| b.name == name)
                        .filter_map(|b| b.nmi)
                        .collect();
                    mean(&v).map(|m| (name.to_string(), m))
                })
                .collect();
            Aggregate {
                setting: key,
                runs: group.len(),
                failed: group.iter().filter(|r| r.error.is_some()).count(),
                nmi_mean: mean(&nmis),
                nmi_median: median(&nmis),
                nmi_std: std_dev(&nmis),
                r_hat_median: (!r_hats.is_empty()).then(|| r_hats[(r_hats.len() - 1) / 2]),
                exact_fraction: (!exact.is_empty())
                    .then(|| exact.iter().filter(|&&e| e).count() as f64 / exact.len() as f64),
                baseline_nmi_mean,
            }
        })
        .collect()
}

fn same_setting(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
        (None, None) => true,
        _ => false,
    }
}

pub fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Midpoint median.
pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { 0.5 * (s[m - 1] + s[m]) })
}

pub fn std_dev(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    Some((v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt())
}

impl RunReport {
    pub fn new(config: ExperimentConfig, runs: Vec<SeedRun>, wall_time: WallTime) -> Self {
        let per_setting = aggregate(&runs);
        Self {
            version: REPORT_VERSION.to_string(),
            config,
            runs,
            aggregates: Aggregates {
                per_setting,
                wall_time,
                conventions: Conventions::default(),
            },
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let r: RunReport = serde_json::from_str(text)?;
        if r.version != REPORT_VERSION {
            return Err(CliError::Config(format!("unsupported report version {:?}", r.version)));
        }
        Ok(r)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| CliError::io(path, e))
    }

    /// The `runs` section alone, as written to the report.
    pub fn runs_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(&self.runs)?)
    }

    /// One row per setting.
    pub fn summary_table(&self) -> String {
        let aggs = &self.aggregates.per_setting;
        let mut names: Vec<&str> = Vec::new();
        for a in aggs {
            for (n, _) in &a.baseline_nmi_mean {
                if !names.contains(&n.as_str()) {
                    names.push(n);
                }
            }
        }
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        let mut out = String::new();
        let _ = write!(out, "{:>10} {:>5} {:>6} {:>14} {:>7} {:>7}", "setting", "runs", "failed", "NMI", "r_hat", "exact");
        for n in &names {
            let _ = write!(out, " {:>8}", n);
        }
        out.push('\n');
        for a in aggs {
            let nmi = match (a.nmi_mean, a.nmi_std) {
                (Some(m), Some(s)) => format!("{m:.3} ± {s:.3}"),
                _ => "-".into(),
            };
            let _ = write!(
                out,
                "{:>10} {:>5} {:>6} {:>14} {:>7} {:>7}",
                a.setting.map_or("data".into(), |s| format!("{s}")),
                a.runs,
                a.failed,
                nmi,
                a.r_hat_median.map_or("-".into(), |r| r.to_string()),
                opt(a.exact_fraction),
            );
            for n in &names {
                let v = a.baseline_nmi_mean.iter().find(|(m, _)| m == n).map(|p| p.1);
                let _ = write!(out, " {:>8}", opt(v));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "wall time {:.1} s", self.aggregates.wall_time.total_s);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(setting: f64, seed: u64, nmi: f64, r_hat: usize) -> SeedRun {
        SeedRun {
            setting: Some(setting),
            seed,
            nmi: Some(nmi),
            r_hat: Some(r_hat),
            exact: Some(r_hat == 4),
            baselines: vec![Baseline {
                name: "cl".into(),
                value: Some(0.1),
                nmi: Some(nmi / 2.0),
                error: None,
            }],
            ..Default::default()
        }
    }

    #[test]
    fn grouping_and_statistics() {
        let runs = vec![run(0.2, 0, 0.5, 2), run(0.4, 0, 1.0, 4), run(0.2, 1, 0.7, 4), run(0.2, 2, 0.9, 3)];
        let a = aggregate(&runs);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].setting, Some(0.2));
        assert_eq!(a[0].runs, 3);
        assert!((a[0].nmi_mean.unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(a[0].nmi_median, Some(0.7));
        assert!((a[0].nmi_std.unwrap() - (0.08f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(a[0].r_hat_median, Some(3));
        assert!((a[0].exact_fraction.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((a[0].baseline_nmi_mean[0].1 - 0.35).abs() < 1e-12);
        assert_eq!(median(&[1.0, 3.0]), Some(2.0));
    }

    #[test]
    fn json_roundtrip_recomputes_aggregates() {
        let runs = vec![run(0.2, 0, 0.1 + 0.2, 2), run(0.2, 1, 1.0 / 3.0, 4)];
        let rep = RunReport::new(ExperimentConfig::default(), runs, WallTime::default());
        let back = RunReport::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(aggregate(&back.runs), rep.aggregates.per_setting);
        assert!(rep.summary_table().contains("0.2"));
    }
}
