//! Semidefinite relaxations for community detection, solved by ADMM, and
//! spectral rounding of their output.
//!
//! * SDP-1: `max ⟨A − λE, X⟩` s.t. `X ⪰ 0`, `X ≥ 0`, `diag X = 1`.
//! * SDP-2: `max ⟨A, X⟩` s.t. `X ⪰ 0`, `X ≥ 0`, `X1 = 1`, `tr X = r′`.

mod admm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{AdjacencyMatrix, HardMembership};
use crate::matrices::{kmeans, sym_eig, sym_eigenvalues, SymMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Relative primal/dual residual cutoff.
    pub tolerance: f64,
    /// Absolute floor, per entry.
    pub abs_tolerance: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty.
    pub penalty: f64,
    pub adaptive_penalty: bool,
    /// Over-relaxation factor in `(0, 2)`.
    pub relaxation: f64,
    pub warm_start: Option<WarmStart>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            abs_tolerance: 1e-6,
            max_iter: 5000,
            penalty: 1.0,
            adaptive_penalty: true,
            relaxation: 1.6,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.abs_tolerance >= 0.0) {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if !(self.penalty > 0.0) {
            return Err(Error::Parameter("penalty must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::Parameter("relaxation must lie in (0, 2)".into()));
        }
        Ok(())
    }

    /// Same options, started from a previous solution.
    pub fn warm_from(&self, previous: &SdpSolution) -> Self {
        Self {
            warm_start: Some(previous.warm.clone()),
            ..self.clone()
        }
    }
}

/// Solver state carried between solves of a hyperparameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub x: SymMatrix,
    pub z: SymMatrix,
    /// Unscaled dual variable of the consensus constraint.
    pub dual: SymMatrix,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// The PSD iterate.
    pub x_tilde: SymMatrix,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `⟨C, X̃⟩` for the program's objective matrix `C`.
    pub objective: f64,
    pub converged: bool,
    pub tolerance: f64,
    pub warm: WarmStart,
}

/// `max ⟨A − λE, X⟩` over `{X ⪰ 0, X ≥ 0, diag X = 1}`.
pub fn solve_sdp1(a: &AdjacencyMatrix, lambda: f64, opts: &SolverOptions) -> Result<SdpSolution> {
    opts.validate()?;
    if !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda = {lambda}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        log::warn!("SDP-1 penalty λ = {lambda} outside [0, 1]");
    }
    let n = a.n();
    if n == 0 {
        return Err(Error::Parameter("empty graph".into()));
    }
    let mut c = a.to_dense();
    for v in c.data_mut() {
        *v -= lambda;
    }
    admm::run(&admm::Sdp1Cones { n }, &c, opts)
}

/// `max ⟨A, X⟩` over `{X ⪰ 0, X ≥ 0, X1 = 1, tr X = r′}`.
pub fn solve_sdp2(a: &AdjacencyMatrix, r_prime: usize, opts: &SolverOptions) -> Result<SdpSolution> {
    opts.validate()?;
    let n = a.n();
    if r_prime == 0 || r_prime > n {
        return Err(Error::Parameter(format!("r′ = {r_prime} outside 1..={n}")));
    }
    let c = a.to_dense();
    admm::run(
        &admm::Sdp2Cones {
            n,
            r_prime: r_prime as f64,
        },
        &c,
        opts,
    )
}

/// k-means on the rows of the top-`r` eigenvectors.
pub fn spectral_round(m: &SymMatrix, r: usize, restarts: usize, seed: u64) -> Result<HardMembership> {
    let pairs = sym_eig(m, r)?;
    let labels = kmeans(&pairs.vectors, r, restarts, seed)?;
    HardMembership::new(labels, r)
}

/// Which program's constraints to check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Program {
    Sdp1 { lambda: f64 },
    Sdp2 { r_prime: usize },
}

/// Constraint diagnostics; violations are reported as magnitudes except the
/// two minima, which are reported as values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub min_eigenvalue: f64,
    pub min_entry: f64,
    /// `max |X_ii − 1|` (SDP-1).
    pub diag_violation: Option<f64>,
    /// `‖X1 − 1‖∞` (SDP-2).
    pub row_sum_violation: Option<f64>,
    /// `|tr X − r′|` (SDP-2).
    pub trace_violation: Option<f64>,
}

impl FeasibilityReport {
    /// Largest violation over all constraints.
    pub fn max_violation(&self) -> f64 {
        [
            (-self.min_eigenvalue).max(0.0),
            (-self.min_entry).max(0.0),
            self.diag_violation.unwrap_or(0.0),
            self.row_sum_violation.unwrap_or(0.0),
            self.trace_violation.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn feasibility_report(x: &SymMatrix, program: Program) -> Result<FeasibilityReport> {
    let min_eigenvalue = *sym_eigenvalues(x)?.last().expect("n ≥ 1");
    let min_entry = x.min_entry();
    let mut report = FeasibilityReport {
        min_eigenvalue,
        min_entry,
        diag_violation: None,
        row_sum_violation: None,
        trace_violation: None,
    };
    match program {
        Program::Sdp1 { .. } => {
            report.diag_violation = Some(x.diag().iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max));
        }
        Program::Sdp2 { r_prime } => {
            report.row_sum_violation = Some(x.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max));
            report.trace_violation = Some((x.trace() - r_prime as f64).abs());
        }
    }
    Ok(report)
}
