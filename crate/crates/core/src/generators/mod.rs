//! Synthetic networks and point clouds, plus the population-level matrices
//! used as oracles (`P̃`, `p_gap`, reference matrix).

mod graph;
mod membership;

pub use graph::AdjacencyMatrix;
pub use membership::{HardMembership, Membership, SoftMembership};

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::matrices::{Matrix, SymMatrix};
use crate::rng::rng_from_seed;

/// Stochastic blockmodel with contiguous ground-truth blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub b: Matrix,
    pub sizes: Vec<usize>,
    pub rho: f64,
}

impl SbmParams {
    pub fn new(b: Matrix, sizes: Vec<usize>, rho: f64) -> Result<Self> {
        let p = Self { b, sizes, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn r(&self) -> usize {
        self.sizes.len()
    }

    pub fn truth(&self) -> HardMembership {
        HardMembership::from_sizes(&self.sizes)
    }

    pub fn validate(&self) -> Result<()> {
        check_block_matrix(&self.b, self.rho)?;
        check_dim(self.b.rows(), self.sizes.len())?;
        if self.sizes.is_empty() || self.n() < 2 {
            return Err(Error::Parameter("SBM needs r ≥ 1 and n ≥ 2".into()));
        }
        Ok(())
    }
}

/// Mixed-membership blockmodel with Dirichlet memberships.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsbParams {
    pub b: Matrix,
    pub alpha: Vec<f64>,
    pub n: usize,
    pub rho: f64,
}

impl MmsbParams {
    /// `B = (p − q)·I + q·E` with `α = 1/r` in every coordinate.
    pub fn symmetric(r: usize, p: f64, q: f64, n: usize, rho: f64) -> Result<Self> {
        let b = Matrix::from_fn(r, r, |i, j| if i == j { p } else { q });
        let params = Self {
            b,
            alpha: vec![1.0 / r as f64; r],
            n,
            rho,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_block_matrix(&self.b, self.rho)?;
        check_dim(self.b.rows(), self.alpha.len())?;
        if self.alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Parameter("Dirichlet concentrations must be positive".into()));
        }
        if self.n < 2 {
            return Err(Error::Parameter("MMSB needs n ≥ 2".into()));
        }
        Ok(())
    }
}

/// Gaussian mixture `Y_i = μ_a + W_i`, `W_i ~ N(0, σ_a² I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    /// `r x d`.
    pub means: Matrix,
    pub sigmas: Vec<f64>,
    pub weights: Vec<f64>,
    pub n: usize,
}

impl MixtureParams {
    pub fn validate(&self) -> Result<()> {
        let r = self.means.rows();
        check_dim(r, self.sigmas.len())?;
        check_dim(r, self.weights.len())?;
        if self.sigmas.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::Parameter("noise scales must be non-negative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter("weights must lie on the simplex".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSample {
    /// `n x d` observations.
    pub y: Matrix,
    pub truth: HardMembership,
    /// `n x d` noise `W`.
    pub noise: Matrix,
    /// `r x d` component means.
    pub means: Matrix,
}

fn check_block_matrix(b: &Matrix, rho: f64) -> Result<()> {
    let r = b.rows();
    check_dim(r, b.cols())?;
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::Parameter(format!("rho = {rho}")));
    }
    for i in 0..r {
        for j in 0..r {
            let p = rho * b.get(i, j);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("rho*B[{i}][{j}] = {p} is not a probability")));
            }
            if (b.get(i, j) - b.get(j, i)).abs() > 1e-12 {
                return Err(Error::Parameter("B must be symmetric".into()));
            }
        }
    }
    Ok(())
}

/// Draws an SBM graph; node order follows the contiguous ground truth.
pub fn sample_sbm(p: &SbmParams, seed: u64) -> Result<(AdjacencyMatrix, HardMembership)> {
    p.validate()?;
    let truth = p.truth();
    let n = truth.n();
    let labels = truth.labels();
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = p.rho * p.b.get(labels[i], labels[j]);
            if rng.random::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    Ok((AdjacencyMatrix::from_edges(n, edges)?, truth))
}

/// Draws memberships from Dirichlet(α) then edges with `P_ij = Θ_i ρB Θ_jᵀ`.
pub fn sample_mmsb(p: &MmsbParams, seed: u64) -> Result<(AdjacencyMatrix, SoftMembership)> {
    p.validate()?;
    let r = p.alpha.len();
    let n = p.n;
    let mut rng = rng_from_seed(seed);
    let gammas: Vec<Gamma<f64>> = p
        .alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::Parameter(e.to_string())))
        .collect::<Result<_>>()?;
    let mut theta = Matrix::zeros(n, r);
    for i in 0..n {
        let row = theta.row_mut(i);
        for (x, g) in row.iter_mut().zip(&gammas) {
            *x = g.sample(&mut rng);
        }
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|x| *x /= s);
        } else {
            // every Gamma draw underflowed; the limit is a vertex
            row[0] = 1.0;
        }
    }
    let tb = Matrix::from_fn(n, r, |i, k| {
        (0..r).map(|l| theta.get(i, l) * p.rho * p.b.get(l, k)).sum()
    });
    let mut edges = Vec::new();
    for i in 0..n {
        let ti = tb.row(i);
        for j in (i + 1)..n {
            let prob: f64 = ti.iter().zip(theta.row(j)).map(|(a, b)| a * b).sum();
            if rng.random::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    Ok((
        AdjacencyMatrix::from_edges(n, edges)?,
        SoftMembership::from_projected(theta),
    ))
}

/// Draws labels from the mixing weights, then Gaussian noise around each mean.
pub fn sample_mixture(p: &MixtureParams, seed: u64) -> Result<MixtureSample> {
    p.validate()?;
    let d = p.means.cols();
    let r = p.means.rows();
    let mut rng = rng_from_seed(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut labels = Vec::with_capacity(p.n);
    let mut noise = Matrix::zeros(p.n, d);
    let mut y = Matrix::zeros(p.n, d);
    for i in 0..p.n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut a = r - 1;
        for (k, &w) in p.weights.iter().enumerate() {
            acc += w;
            if u < acc && w > 0.0 {
                a = k;
                break;
            }
        }
        // guard against rounding of the cumulative sum landing on a zero weight
        while p.weights[a] == 0.0 && a > 0 {
            a -= 1;
        }
        labels.push(a);
        for m in 0..d {
            let w = p.sigmas[a] * std_normal.sample(&mut rng);
            noise.set(i, m, w);
            y.set(i, m, p.means.get(a, m) + w);
        }
    }
    Ok(MixtureSample {
        y,
        truth: HardMembership::new(labels, r)?,
        noise,
        means: p.means.clone(),
    })
}

/// `r x d` means with the first `active` coordinates drawn from `N(0, sd²)`,
/// the rest zero, all multiplied by `scale`. The draw does not depend on
/// `scale`, so a separation sweep moves the same means apart.
pub fn sparse_means(r: usize, d: usize, active: usize, sd: f64, scale: f64, seed: u64) -> Result<Matrix> {
    if active > d || !(sd >= 0.0 && sd.is_finite()) || !scale.is_finite() {
        return Err(Error::Parameter(format!("active = {active}, d = {d}, sd = {sd}, scale = {scale}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = rng_from_seed(seed);
    let mut m = Matrix::zeros(r, d);
    for a in 0..r {
        for k in 0..active {
            m.set(a, k, scale * sd * normal.sample(&mut rng));
        }
    }
    Ok(m)
}

/// Block-constant `P̃` with `P̃_ii = ρB_kk`.
pub fn population_matrix(p: &SbmParams) -> Result<SymMatrix> {
    p.validate()?;
    let truth = p.truth();
    let l = truth.labels();
    Ok(SymMatrix::from_fn(truth.n(), |i, j| p.rho * p.b.get(l[i], l[j])))
}

/// Smallest margin between a diagonal block's constant value and the largest
/// cross-cluster entry in its rows. `+∞` when there is a single cluster.
pub fn p_gap(s: &SymMatrix, truth: &HardMembership) -> Result<f64> {
    check_dim(s.n(), truth.n())?;
    let clusters = truth.clusters();
    let labels = truth.labels();
    let mut gap = f64::INFINITY;
    for (k, members) in clusters.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let a = s.get(members[0], members[0]);
        let mut cross = f64::NEG_INFINITY;
        for &i in members {
            for j in 0..s.n() {
                let v = s.get(i, j);
                if labels[j] == k {
                    if (v - a).abs() > 1e-9 {
                        return Err(Error::Contract(format!(
                            "diagonal block {k} is not constant"
                        )));
                    }
                } else {
                    cross = cross.max(v);
                }
            }
        }
        gap = gap.min(a - cross);
    }
    Ok(gap)
}

/// Reference matrix for mixtures: zero within clusters and
/// `−d²/2 − max{0, d²/2 + 2(W_i − W_j)ᵀ(μ_a − μ_b)}` across clusters `a ≠ b`.
pub fn reference_matrix(means: &Matrix, noise: &Matrix, truth: &HardMembership) -> Result<SymMatrix> {
    check_dim(noise.rows(), truth.n())?;
    check_dim(noise.cols(), means.cols())?;
    check_dim(means.rows(), truth.r())?;
    let l = truth.labels();
    let d = means.cols();
    Ok(SymMatrix::from_fn(truth.n(), |i, j| {
        let (a, b) = (l[i], l[j]);
        if a == b {
            return 0.0;
        }
        let mut d2 = 0.0;
        let mut cross = 0.0;
        for m in 0..d {
            let dm = means.get(a, m) - means.get(b, m);
            d2 += dm * dm;
            cross += (noise.get(i, m) - noise.get(j, m)) * dm;
        }
        -d2 / 2.0 - (d2 / 2.0 + 2.0 * cross).max(0.0)
    }))
}
