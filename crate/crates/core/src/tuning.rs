//! Max-trace tuning (MATR), its cross-validated model-selection variant
//! (MATR-CV) and the baseline heuristics it is compared against.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{check_dim, Error, Result};
use crate::generators::{AdjacencyMatrix, HardMembership, Membership, SoftMembership};
use crate::matrices::{kmeans, pairwise_sq_dist, sym_eig, Matrix, SymMatrix};
use crate::rng::{derive_seed, random_permutation};
use crate::sdp::{solve_sdp1, solve_sdp2, spectral_round, SdpSolution, SolverOptions};
use crate::similarity::{pinv_contract, trace_membership};
use crate::spacl::{estimate_mmsb_from_eigen, regress_test_memberships};

/// Repetitions before the MMSB halving loop gives up.
const MAX_HALVINGS: usize = 50;

/// Non-empty, strictly increasing list of candidate values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid<T> {
    values: Vec<T>,
}

impl<T: PartialOrd + Copy + std::fmt::Debug> CandidateGrid<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("empty candidate grid".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter(format!("grid {values:?} is not strictly increasing")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl CandidateGrid<f64> {
    /// `{0, 1, ..., 20} / 20`.
    pub fn lambda_default() -> Self {
        Self {
            values: (0..=20).map(|t| t as f64 / 20.0).collect(),
        }
    }

    /// `{tα/20 : t = 1..20}` with `α` the largest pairwise distance.
    pub fn bandwidth(y: &Matrix) -> Result<Self> {
        let alpha = pairwise_sq_dist(y).as_slice().iter().fold(0.0f64, |m, &v| m.max(v)).sqrt();
        if alpha == 0.0 {
            return Err(Error::Degenerate("all points coincide".into()));
        }
        Self::new((1..=20).map(|t| t as f64 * alpha / 20.0).collect())
    }
}

impl CandidateGrid<usize> {
    /// `{lo, ..., hi}`.
    pub fn counts(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(Error::Parameter(format!("count range {lo}..={hi}")));
        }
        Ok(Self {
            values: (lo..=hi).collect(),
        })
    }

    /// `{1, ..., ⌊√n⌋}`.
    pub fn up_to_sqrt(n: usize) -> Result<Self> {
        Self::counts(1, ((n as f64).sqrt().floor() as usize).max(1))
    }

    /// `{1, ..., ⌊ρ̂n⌋}`.
    pub fn up_to_density(a: &AdjacencyMatrix) -> Result<Self> {
        let hi = (density_estimate(a) * a.n() as f64).floor() as usize;
        Self::counts(1, hi.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult<T> {
    pub chosen: T,
    pub chosen_index: usize,
    /// `⟨Ŝ, X̂_t⟩`, `None` where the clusterer failed.
    pub traces: Vec<Option<f64>>,
    pub memberships: Vec<Option<Membership>>,
    /// `(candidate index, message)`.
    pub failures: Vec<(usize, String)>,
}

impl<T> TuningResult<T> {
    pub fn chosen_membership(&self) -> &Membership {
        self.memberships[self.chosen_index]
            .as_ref()
            .expect("chosen candidate has a membership")
    }
}

/// Runs `clusterer` at every candidate and keeps the one maximizing
/// `⟨Ŝ, X̂⟩`; ties go to the smallest candidate. Clusterer errors are
/// recorded and the candidate is skipped.
pub fn matr<T: Copy>(
    grid: &CandidateGrid<T>,
    s_hat: &SymMatrix,
    mut clusterer: impl FnMut(T) -> Result<Membership>,
) -> Result<TuningResult<T>> {
    let mut traces = Vec::with_capacity(grid.values.len());
    let mut memberships = Vec::with_capacity(grid.values.len());
    let mut failures = Vec::new();
    for (t, &value) in grid.values.iter().enumerate() {
        match clusterer(value) {
            Ok(m) => {
                check_dim(s_hat.n(), m.n())?;
                let l = trace_membership(s_hat, &m)?;
                if l.is_finite() {
                    traces.push(Some(l));
                    memberships.push(Some(m));
                } else {
                    failures.push((t, format!("trace is {l}")));
                    traces.push(None);
                    memberships.push(None);
                }
            }
            Err(e) => {
                log::debug!("MATR candidate {t} failed: {e}");
                failures.push((t, e.to_string()));
                traces.push(None);
                memberships.push(None);
            }
        }
    }
    let chosen_index = argmax_first(&traces)
        .ok_or_else(|| Error::Tuning("every candidate failed".into()))?;
    Ok(TuningResult {
        chosen: grid.values[chosen_index],
        chosen_index,
        traces,
        memberships,
        failures,
    })
}

/// Index of the largest present value, earliest on ties.
fn argmax_first(v: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if let Some(x) = x {
            if best.is_none_or(|b| *x > v[b].unwrap()) {
                best = Some(i);
            }
        }
    }
    best
}

/// Node split into training (`Q₁`) and test (`Q₂`) indices, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndex {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Uniform split with `|Q₁| = round(nγ)`.
pub fn node_splitting(n: usize, gamma_train: f64, seed: u64) -> Result<SplitIndex> {
    if !(gamma_train > 0.0 && gamma_train < 1.0) {
        return Err(Error::Parameter(format!("γ_train = {gamma_train} outside (0, 1)")));
    }
    let m = (n as f64 * gamma_train).round() as usize;
    if m == 0 || m >= n {
        return Err(Error::Parameter(format!(
            "split of {n} nodes at γ = {gamma_train} leaves an empty side"
        )));
    }
    let p = random_permutation(n, seed);
    let mut train = p[..m].to_vec();
    let mut test = p[m..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndex { train, test })
}

/// Assigns each test node to the training cluster it links to most, with
/// link counts divided by cluster size. Ties go to the smallest cluster.
pub fn cluster_test(a21: &Matrix, z11: &HardMembership) -> Result<HardMembership> {
    check_dim(a21.cols(), z11.n())?;
    let sizes = z11.sizes();
    if let Some(k) = sizes.iter().position(|&m| m == 0) {
        return Err(Error::Contract(format!("training cluster {k} is empty")));
    }
    let l = z11.labels();
    let r = z11.r();
    let mut labels = Vec::with_capacity(a21.rows());
    let mut score = vec![0.0; r];
    for i in 0..a21.rows() {
        score.iter_mut().for_each(|s| *s = 0.0);
        for (j, &v) in a21.row(i).iter().enumerate() {
            if v != 0.0 {
                score[l[j]] += v;
            }
        }
        let mut best = 0;
        for k in 0..r {
            score[k] /= sizes[k] as f64;
            if score[k] > score[best] {
                best = k;
            }
        }
        labels.push(best);
    }
    HardMembership::new(labels, r)
}

/// A clustering method plus the similarity used to score its test-node
/// memberships inside MATR-CV.
pub trait CvModel {
    /// Fits on `A[Q₁, Q₁]` at every candidate count and extends each fit to
    /// the test nodes; entry `t` belongs to `grid[t]`.
    fn fit_split(
        &self,
        a: &AdjacencyMatrix,
        split: &SplitIndex,
        grid: &[usize],
        seed: u64,
    ) -> Vec<Result<Membership>>;

    /// `⟨Ŝ²², X̂²²⟩` for a membership of the test nodes.
    fn test_trace(&self, a: &AdjacencyMatrix, split: &SplitIndex, m: &Membership) -> Result<f64>;
}

/// `⟨A²², X⟩`: test-block adjacency as the similarity.
fn adjacency_test_trace(a: &AdjacencyMatrix, split: &SplitIndex, m: &Membership) -> Result<f64> {
    check_dim(split.test.len(), m.n())?;
    trace_membership(&a.induced(&split.test).to_dense(), m)
}

/// Any hard clusterer of the training graph, extended by [`cluster_test`]
/// and scored against the test-block adjacency.
pub struct SbmCv<F> {
    pub clusterer: F,
}

impl<F> CvModel for SbmCv<F>
where
    F: Fn(&AdjacencyMatrix, usize, u64) -> Result<HardMembership>,
{
    fn fit_split(
        &self,
        a: &AdjacencyMatrix,
        split: &SplitIndex,
        grid: &[usize],
        seed: u64,
    ) -> Vec<Result<Membership>> {
        let a11 = a.induced(&split.train);
        let a21 = a.cross_block(&split.test, &split.train);
        grid.iter()
            .enumerate()
            .map(|(t, &r)| {
                let z11 = (self.clusterer)(&a11, r, derive_seed(seed, &[t as u64]))?;
                Ok(cluster_test(&a21, &z11)?.into())
            })
            .collect()
    }

    fn test_trace(&self, a: &AdjacencyMatrix, split: &SplitIndex, m: &Membership) -> Result<f64> {
        adjacency_test_trace(a, split, m)
    }
}

/// SDP-2 with `r′ = r` plus spectral rounding on the training graph, solved
/// along the grid with warm starts, then [`cluster_test`].
#[derive(Debug, Clone)]
pub struct Sdp2Cv {
    pub opts: SolverOptions,
    pub restarts: usize,
}

impl CvModel for Sdp2Cv {
    fn fit_split(
        &self,
        a: &AdjacencyMatrix,
        split: &SplitIndex,
        grid: &[usize],
        seed: u64,
    ) -> Vec<Result<Membership>> {
        let a11 = a.induced(&split.train);
        let a21 = a.cross_block(&split.test, &split.train);
        let mut prev: Option<SdpSolution> = None;
        grid.iter()
            .enumerate()
            .map(|(t, &r)| {
                let opts = match &prev {
                    Some(s) => self.opts.warm_from(s),
                    None => self.opts.clone(),
                };
                let sol = solve_sdp2(&a11, r, &opts)?;
                if !sol.converged {
                    log::warn!("SDP-2 at r′ = {r} stopped after {} iterations", sol.iterations);
                }
                let z11 = spectral_round(&sol.x_tilde, r, self.restarts, derive_seed(seed, &[t as u64]));
                prev = Some(sol);
                Ok(cluster_test(&a21, &z11?)?.into())
            })
            .collect()
    }

    fn test_trace(&self, a: &AdjacencyMatrix, split: &SplitIndex, m: &Membership) -> Result<f64> {
        adjacency_test_trace(a, split, m)
    }
}

/// Eigen + SPA estimation on the training graph, regression to the test
/// nodes, scored with `Ŝ = A² − diag(A²)` of the full graph.
#[derive(Debug, Clone, Default)]
pub struct MmsbCv;

impl CvModel for MmsbCv {
    fn fit_split(
        &self,
        a: &AdjacencyMatrix,
        split: &SplitIndex,
        grid: &[usize],
        _seed: u64,
    ) -> Vec<Result<Membership>> {
        let a11 = a.induced(&split.train);
        let a21 = a.cross_block(&split.test, &split.train);
        let r_top = grid.iter().copied().max().unwrap_or(1).min(a11.n());
        // one decomposition serves every candidate
        let pairs = match sym_eig(&a11.to_dense(), r_top) {
            Ok(p) => p,
            Err(e) => return grid.iter().map(|_| Err(e.clone())).collect(),
        };
        grid.iter()
            .map(|&r| {
                let est = estimate_mmsb_from_eigen(&pairs, r)?;
                Ok(regress_test_memberships(&a21, &est.theta_hat, &est.b_hat)?.into())
            })
            .collect()
    }

    fn test_trace(&self, a: &AdjacencyMatrix, split: &SplitIndex, m: &Membership) -> Result<f64> {
        let test = &split.test;
        check_dim(test.len(), m.n())?;
        let theta = match m {
            Membership::Soft(t) => t.theta().clone(),
            Membership::Hard(z) => SoftMembership::from_hard(z).theta().clone(),
        };
        let r = theta.cols();
        let n = a.n();
        // F = A[:, Q₂]Θ, so Θᵀ(A²)[Q₂, Q₂]Θ = FᵀF; the diagonal of A² is the degree
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in test.iter().enumerate() {
            pos[i] = k;
        }
        let mut f = Matrix::zeros(n, r);
        for i in 0..n {
            let out = f.row_mut(i);
            for &j in a.neighbors(i) {
                if pos[j] != usize::MAX {
                    for (o, t) in out.iter_mut().zip(theta.row(pos[j])) {
                        *o += t;
                    }
                }
            }
        }
        let mut core = f.tmatmul(&f)?;
        for (k, &i) in test.iter().enumerate() {
            let d = a.degree(i) as f64;
            let row = theta.row(k);
            for x in 0..r {
                for y in 0..r {
                    core.set(x, y, core.get(x, y) - d * row[x] * row[y]);
                }
            }
        }
        pinv_contract(&theta, &core)
    }
}

/// How the trace gap `Δ` is set in each repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeltaRule {
    Fixed(f64),
    /// `√(r_max ln n)` with `r_max` the trace maximizer of the repetition.
    Sdp2,
    /// Start at `(nρ̂)^{3/2}(ln n)^{1.01}` and halve until the selected count
    /// clears its predecessor by more than `Δ`.
    MmsbHalving,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub j_reps: usize,
    pub gamma_train: f64,
    pub delta: DeltaRule,
    pub seed: u64,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            j_reps: 5,
            gamma_train: 0.5,
            delta: DeltaRule::Sdp2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub r_star: usize,
    /// Per candidate; `None` where fitting or scoring failed.
    pub traces: Vec<Option<f64>>,
    pub delta: f64,
    pub failures: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub r_hat: usize,
    pub per_rep: Vec<RepRecord>,
    pub j_reps: usize,
    /// Repetitions in which every candidate failed.
    pub dropped: usize,
}

/// Model selection by repeated node splitting.
///
/// Repetition `j` splits with seed `derive_seed(seed, [j, 0])` and fits with
/// `derive_seed(seed, [j, 1])`, so the outcome does not depend on the order
/// repetitions are run in.
pub fn matr_cv<M: CvModel + ?Sized>(
    model: &M,
    a: &AdjacencyMatrix,
    grid: &CandidateGrid<usize>,
    opts: &CvOptions,
) -> Result<SelectionResult> {
    if opts.j_reps == 0 {
        return Err(Error::Parameter("J must be at least 1".into()));
    }
    let n = a.n();
    let rho_hat = density_estimate(a);
    let mut per_rep = Vec::with_capacity(opts.j_reps);
    let mut dropped = 0;
    for j in 0..opts.j_reps as u64 {
        let split = node_splitting(n, opts.gamma_train, derive_seed(opts.seed, &[j, 0]))?;
        let fits = model.fit_split(a, &split, &grid.values, derive_seed(opts.seed, &[j, 1]));
        let mut traces = Vec::with_capacity(grid.len());
        let mut failures = Vec::new();
        for (t, fit) in fits.into_iter().enumerate() {
            match fit.and_then(|m| model.test_trace(a, &split, &m)) {
                Ok(l) if l.is_finite() => traces.push(Some(l)),
                Ok(l) => {
                    failures.push((t, format!("trace is {l}")));
                    traces.push(None);
                }
                Err(e) => {
                    log::debug!("repetition {j}, candidate {t}: {e}");
                    failures.push((t, e.to_string()));
                    traces.push(None);
                }
            }
        }
        let Some(best) = argmax_first(&traces) else {
            dropped += 1;
            continue;
        };
        let (idx, delta) = match opts.delta {
            DeltaRule::Fixed(d) => (threshold_select(&traces, d), d),
            DeltaRule::Sdp2 => {
                let d = delta_sdp2(grid.values[best], n)?;
                (threshold_select(&traces, d), d)
            }
            DeltaRule::MmsbHalving => delta_mmsb_select(&traces, n, rho_hat),
        };
        per_rep.push(RepRecord {
            r_star: grid.values[idx],
            traces,
            delta,
            failures,
        });
    }
    if per_rep.is_empty() {
        return Err(Error::Tuning("every repetition failed".into()));
    }
    let mut picks: Vec<usize> = per_rep.iter().map(|r| r.r_star).collect();
    picks.sort_unstable();
    Ok(SelectionResult {
        r_hat: picks[(picks.len() - 1) / 2],
        per_rep,
        j_reps: opts.j_reps,
        dropped,
    })
}

/// Smallest index whose trace is within `Δ` of the maximum. Missing traces
/// never qualify.
///
/// Panics if every trace is missing.
pub fn threshold_select(traces: &[Option<f64>], delta: f64) -> usize {
    let best = argmax_first(traces).expect("at least one trace");
    let cut = traces[best].unwrap() - delta;
    traces.iter().position(|l| l.is_some_and(|l| l >= cut)).unwrap_or(best)
}

/// `√(r_max ln n)`.
pub fn delta_sdp2(r_max: usize, n: usize) -> Result<f64> {
    if r_max == 0 || n < 2 {
        return Err(Error::Parameter(format!("r_max = {r_max}, n = {n}")));
    }
    Ok((r_max as f64 * (n as f64).ln()).sqrt())
}

/// Halving selection; returns `(index, final Δ)`.
///
/// With `r̂` the current threshold pick, `δ = l_r̂ − l_{r̂−1}` (previous grid
/// entry). The pick is accepted once `δ > Δ`; otherwise `Δ` is halved, at
/// most 50 times. A pick at the first grid entry never clears the test.
pub fn delta_mmsb_select(traces: &[Option<f64>], n: usize, rho_hat: f64) -> (usize, f64) {
    let nf = n as f64;
    let mut delta = (nf * rho_hat).powf(1.5) * nf.ln().powf(1.01);
    let mut idx = threshold_select(traces, delta);
    if traces.len() == 1 {
        return (idx, delta);
    }
    for _ in 0..MAX_HALVINGS {
        let gap = if idx == 0 {
            f64::NEG_INFINITY
        } else {
            let cur = traces[idx].expect("picked trace exists");
            traces[idx - 1].map_or(f64::INFINITY, |prev| cur - prev)
        };
        if gap > delta {
            break;
        }
        delta /= 2.0;
        idx = threshold_select(traces, delta);
    }
    (idx, delta)
}

/// `Σ_{i<j} A_ij / C(n, 2)`.
pub fn density_estimate(a: &AdjacencyMatrix) -> f64 {
    a.density()
}

/// Edge density among nodes whose degree lies between the 25th and 75th
/// percentiles; the global density if fewer than two nodes qualify.
pub fn lambda_cl(a: &AdjacencyMatrix) -> f64 {
    let deg: Vec<f64> = a.degrees().iter().map(|&d| d as f64).collect();
    if deg.len() < 2 {
        return 0.0;
    }
    let mut sorted = deg.clone();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (quantile(&sorted, 0.25), quantile(&sorted, 0.75));
    let keep: Vec<usize> = (0..deg.len()).filter(|&i| deg[i] >= lo && deg[i] <= hi).collect();
    if keep.len() < 2 {
        return a.density();
    }
    a.induced(&keep).density()
}

/// Linear-interpolation quantile of sorted data (`p` in `[0, 1]`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandwidthHeuristic {
    /// 95% quantile of per-point 5% distance quantiles over `√χ²_{d,0.95}`.
    Ds,
    /// Mean distance to the `k`-th nearest neighbor, `k = round(ln n) + 1`.
    Knn,
    /// Longest edge of the Euclidean minimum spanning tree.
    Mst,
}

pub fn baseline_bandwidth(y: &Matrix, method: BandwidthHeuristic) -> Result<f64> {
    let n = y.rows();
    if n < 2 {
        return Err(Error::Parameter("bandwidth heuristics need two points".into()));
    }
    let dist = pairwise_sq_dist(y);
    let d = |i: usize, j: usize| dist.get(i, j).max(0.0).sqrt();
    match method {
        BandwidthHeuristic::Ds => {
            let mut q: Vec<f64> = (0..n)
                .map(|i| {
                    let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d(i, j)).collect();
                    row.sort_by(f64::total_cmp);
                    quantile(&row, 0.05)
                })
                .collect();
            q.sort_by(f64::total_cmp);
            let chi = ChiSquared::new(y.cols() as f64)
                .map_err(|e| Error::Parameter(format!("χ² with {} dof: {e}", y.cols())))?;
            Ok(quantile(&q, 0.95) / chi.inverse_cdf(0.95).sqrt())
        }
        BandwidthHeuristic::Knn => {
            let k = ((n as f64).ln().round() as usize + 1).min(n - 1);
            knn_bandwidth(y, k)
        }
        BandwidthHeuristic::Mst => {
            // Prim on the complete graph
            let mut in_tree = vec![false; n];
            let mut best = vec![f64::INFINITY; n];
            best[0] = 0.0;
            let mut longest = 0.0f64;
            for _ in 0..n {
                let mut u = usize::MAX;
                for v in 0..n {
                    if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                        u = v;
                    }
                }
                in_tree[u] = true;
                longest = longest.max(best[u]);
                for v in 0..n {
                    if !in_tree[v] {
                        best[v] = best[v].min(d(u, v));
                    }
                }
            }
            Ok(longest)
        }
    }
}

/// Mean distance from each point to its `k`-th nearest other point.
pub fn knn_bandwidth(y: &Matrix, k: usize) -> Result<f64> {
    let n = y.rows();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("k = {k} with {n} points")));
    }
    let dist = pairwise_sq_dist(y);
    let total: f64 = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist.get(i, j).max(0.0)).collect();
            row.select_nth_unstable_by(k - 1, f64::total_cmp);
            row[k - 1].sqrt()
        })
        .sum();
    Ok(total / n as f64)
}

/// Normalized spectral clustering of a similarity matrix: top-`r`
/// eigenvectors of `D^{-1/2} K D^{-1/2}`, rows scaled to unit length, then
/// k-means.
pub fn spectral_clustering(k: &SymMatrix, r: usize, restarts: usize, seed: u64) -> Result<HardMembership> {
    let n = k.n();
    let deg = k.row_sums();
    let inv: Vec<f64> = deg.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    let l = SymMatrix::from_fn(n, |i, j| inv[i] * k.get(i, j) * inv[j]);
    let mut u = sym_eig(&l, r)?.vectors;
    for i in 0..n {
        let row = u.row_mut(i);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    HardMembership::new(kmeans(&u, r, restarts, seed)?, r)
}

/// SDP-1 followed by spectral rounding, swept over `λ` with each solve warm
/// started from the previous one.
pub struct Sdp1Path<'a> {
    a: &'a AdjacencyMatrix,
    r: usize,
    opts: SolverOptions,
    restarts: usize,
    seed: u64,
    last: Option<SdpSolution>,
    /// `(λ, iterations, converged)` per solve.
    pub log: Vec<(f64, usize, bool)>,
}

impl<'a> Sdp1Path<'a> {
    pub fn new(a: &'a AdjacencyMatrix, r: usize, opts: SolverOptions, restarts: usize, seed: u64) -> Self {
        Self {
            a,
            r,
            opts,
            restarts,
            seed,
            last: None,
            log: Vec::new(),
        }
    }

    pub fn cluster(&mut self, lambda: f64) -> Result<Membership> {
        let opts = match &self.last {
            Some(s) => self.opts.warm_from(s),
            None => self.opts.clone(),
        };
        let sol = solve_sdp1(self.a, lambda, &opts)?;
        self.log.push((lambda, sol.iterations, sol.converged));
        let z = spectral_round(&sol.x_tilde, self.r, self.restarts, derive_seed(self.seed, &[lambda.to_bits()]));
        self.last = Some(sol);
        Ok(z?.into())
    }
}
