//! Lloyd's k-means with k-means++ seeding and restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Matrix;
use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_LLOYD_ITER: usize = 300;

/// Outcome of the best restart.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    /// `k x d`.
    pub centroids: Matrix,
    pub wcss: f64,
    pub iterations: usize,
    /// WCSS after every Lloyd iteration of the returned restart.
    pub history: Vec<f64>,
}

/// Labels of the minimum-WCSS restart.
pub fn kmeans(rows: &Matrix, k: usize, restarts: usize, seed: u64) -> Result<Vec<usize>> {
    Ok(kmeans_detailed(rows, k, restarts, seed)?.labels)
}

pub fn kmeans_detailed(rows: &Matrix, k: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let n = rows.rows();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} with {n} points")));
    }
    if restarts == 0 {
        return Err(Error::Parameter("restarts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts {
        let run = lloyd(rows, k, &mut rng);
        // strict improvement keeps the earliest restart on ties
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(rows: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = rows.rows();
    let d = rows.cols();
    let mut c = Matrix::zeros(k, d);
    let first = rng.random_range(0..n);
    c.row_mut(0).copy_from_slice(rows.row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(rows.row(i), c.row(0))).collect();
    for j in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if u < w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        c.row_mut(j).copy_from_slice(rows.row(pick));
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(rows.row(i), c.row(j)));
        }
    }
    c
}

fn lloyd(rows: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> KMeansResult {
    let n = rows.rows();
    let d = rows.cols();
    let mut centroids = plus_plus(rows, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        for i in 0..n {
            let x = rows.row(i);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for j in 0..k {
                let dj = sq_dist(x, centroids.row(j));
                if dj < best_d {
                    best_d = dj;
                    best = j;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        // empty clusters take the point farthest from its own centroid
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                continue;
            }
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                if counts[labels[i]] <= 1 {
                    continue;
                }
                let di = sq_dist(rows.row(i), centroids.row(labels[i]));
                if di > far_d {
                    far_d = di;
                    far = Some(i);
                }
            }
            if let Some(i) = far {
                counts[labels[i]] -= 1;
                labels[i] = j;
                counts[j] = 1;
                centroids.row_mut(j).copy_from_slice(rows.row(i));
                changed = true;
            }
        }
        let mut sums = Matrix::zeros(k, d);
        for i in 0..n {
            let s = sums.row_mut(labels[i]);
            for (a, b) in s.iter_mut().zip(rows.row(i)) {
                *a += b;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                let inv = 1.0 / counts[j] as f64;
                for (c, s) in centroids.row_mut(j).iter_mut().zip(sums.row(j)) {
                    *c = s * inv;
                }
            }
        }
        let wcss: f64 = (0..n)
            .map(|i| sq_dist(rows.row(i), centroids.row(labels[i])))
            .sum();
        history.push(wcss);
        if !changed || iterations >= MAX_LLOYD_ITER {
            return KMeansResult {
                labels,
                centroids,
                wcss,
                iterations,
                history,
            };
        }
    }
}
