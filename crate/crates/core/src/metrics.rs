//! Clustering evaluation.
//!
//! NMI is normalized by the geometric mean of the two entropies.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::generators::HardMembership;
use crate::similarity::NormalizedClusteringMatrix;

/// Alignment switches from exhaustive search to greedy matching above this.
const EXHAUSTIVE_MAX_R: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub nmi: f64,
    /// `‖X̂ − X₀‖²_F`.
    pub frob_sq: f64,
    pub exact: bool,
    /// Rows are true clusters, columns are aligned predicted clusters.
    pub aligned_confusion: Vec<Vec<usize>>,
}

/// `I(a; b) / √(H(a) H(b))` with plug-in probabilities.
///
/// Two single-cluster partitions give 1; exactly one zero-entropy side
/// gives 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    let n = a.len();
    if n == 0 {
        return Ok(1.0);
    }
    let table = confusion(a, b);
    let nf = n as f64;
    let row: Vec<f64> = table.iter().map(|r| r.iter().sum::<usize>() as f64).collect();
    let col: Vec<f64> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum::<usize>() as f64)
        .collect();
    let entropy = |m: &[f64]| -> f64 {
        m.iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| {
                let p = c / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (ha, hb) = (entropy(&row), entropy(&col));
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / nf * (c * nf / (row[i] * col[j])).ln();
            }
        }
    }
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// `confusion[i][j]` counts items with label `i` in `a` and `j` in `b`.
pub fn confusion(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let ra = a.iter().max().map_or(1, |m| m + 1);
    let rb = b.iter().max().map_or(1, |m| m + 1);
    let mut t = vec![vec![0usize; rb]; ra];
    for (&x, &y) in a.iter().zip(b) {
        t[x][y] += 1;
    }
    t
}

/// `‖X̂ − X₀‖²_F`.
pub fn clustering_error(x_hat: &NormalizedClusteringMatrix, x0: &NormalizedClusteringMatrix) -> Result<f64> {
    let d = x_hat.x.sub(&x0.x)?;
    let f = d.frobenius_norm();
    Ok(f * f)
}

/// True iff relabeling `z_hat` by some bijection reproduces `z0`.
pub fn exact_recovery(z_hat: &HardMembership, z0: &HardMembership) -> bool {
    if z_hat.n() != z0.n() {
        return false;
    }
    let mut fwd = std::collections::HashMap::new();
    let mut bwd = std::collections::HashMap::new();
    for (&a, &b) in z_hat.labels().iter().zip(z0.labels()) {
        if *fwd.entry(a).or_insert(b) != b || *bwd.entry(b).or_insert(a) != a {
            return false;
        }
    }
    true
}

/// `map[k]` is the true label assigned to predicted label `k`, chosen to
/// maximize the total overlap. Exhaustive over permutations for up to
/// eight labels, greedy largest-overlap matching above.
pub fn align_labels(pred: &[usize], truth: &[usize]) -> Result<Vec<usize>> {
    check_dim(pred.len(), truth.len())?;
    let t = confusion(pred, truth);
    let (rp, rt) = (t.len(), t[0].len());
    let r = rp.max(rt);
    let w = |i: usize, j: usize| if i < rp && j < rt { t[i][j] } else { 0 };
    let mut best: Vec<usize> = (0..r).collect();
    if r <= EXHAUSTIVE_MAX_R {
        let mut perm: Vec<usize> = (0..r).collect();
        let mut best_score = 0;
        let mut first = true;
        permutations(&mut perm, 0, &mut |p| {
            let s: usize = p.iter().enumerate().map(|(i, &j)| w(i, j)).sum();
            if first || s > best_score {
                best_score = s;
                best = p.to_vec();
                first = false;
            }
        });
    } else {
        let mut cells: Vec<(usize, usize, usize)> =
            (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).map(|(i, j)| (w(i, j), i, j)).collect();
        // largest overlap first, ties by indices
        cells.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut used_p = vec![false; r];
        let mut used_t = vec![false; r];
        for (_, i, j) in cells {
            if !used_p[i] && !used_t[j] {
                best[i] = j;
                used_p[i] = true;
                used_t[j] = true;
            }
        }
    }
    best.truncate(rp);
    Ok(best)
}

/// Calls `f` on every permutation of `p[k..]`, by recursive swaps.
fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// NMI, clustering-matrix error, exact recovery and the aligned confusion
/// table of `pred` against `truth`.
pub fn evaluate(pred: &HardMembership, truth: &HardMembership) -> Result<EvalReport> {
    use crate::similarity::clustering_matrix_hard;
    check_dim(pred.n(), truth.n())?;
    let p = pred.compacted();
    let z = truth.compacted();
    let nmi = nmi(p.labels(), z.labels())?;
    let frob_sq = clustering_error(&clustering_matrix_hard(&p)?, &clustering_matrix_hard(&z)?)?;
    let map = align_labels(p.labels(), z.labels())?;
    let r = map.iter().copied().max().map_or(0, |m| m + 1).max(z.r());
    let mut aligned = vec![vec![0usize; r]; z.r()];
    for (&a, &b) in p.labels().iter().zip(z.labels()) {
        aligned[b][map[a]] += 1;
    }
    Ok(EvalReport {
        nmi,
        frob_sq,
        exact: exact_recovery(pred, truth),
        aligned_confusion: aligned,
    })
}
