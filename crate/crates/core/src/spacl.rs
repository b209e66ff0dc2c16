//! Mixed-membership estimation: top-`r` eigenvectors, successive projection
//! to find one pure node per community, then membership regression.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::generators::{AdjacencyMatrix, SoftMembership};
use crate::matrices::{project_simplex_in_place, sym_eig, EigenPairs, Matrix};

/// Largest condition number accepted for `U_S`, `B̂` and `Θ̂ᵀΘ̂`.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsbEstimate {
    pub theta_hat: SoftMembership,
    /// Symmetric, entries in `[0, 1]`.
    pub b_hat: Matrix,
    /// One selected node per community, in selection order.
    pub pure_nodes: Vec<usize>,
}

/// Successive projection: pick the row of largest norm, project every row
/// onto the orthogonal complement of it, repeat `r` times. Ties go to the
/// smallest row index.
pub fn spa(v: &Matrix, r: usize) -> Result<Vec<usize>> {
    let n = v.rows();
    if r == 0 || r > n {
        return Err(Error::Parameter(format!("r = {r} outside 1..={n}")));
    }
    let mut res = v.clone();
    let mut norms: Vec<f64> = (0..n).map(|i| res.row(i).iter().map(|x| x * x).sum()).collect();
    let first = norms.iter().fold(0.0f64, |m, &x| m.max(x));
    if first == 0.0 {
        return Err(Error::Degenerate("successive projection on a zero matrix".into()));
    }
    let mut picked = Vec::with_capacity(r);
    for step in 0..r {
        let mut best = 0;
        for i in 1..n {
            if norms[i] > norms[best] {
                best = i;
            }
        }
        // relative to the first pick; below this the rows span fewer than r directions
        if norms[best] <= 1e-24 * first {
            return Err(Error::Degenerate(format!(
                "rows span only {step} directions, {r} requested"
            )));
        }
        picked.push(best);
        let scale = norms[best].sqrt();
        let u: Vec<f64> = res.row(best).iter().map(|x| x / scale).collect();
        for i in 0..n {
            let row = res.row_mut(i);
            let c: f64 = row.iter().zip(&u).map(|(a, b)| a * b).sum();
            for (x, uk) in row.iter_mut().zip(&u) {
                *x -= c * uk;
            }
            norms[i] = row.iter().map(|x| x * x).sum();
        }
    }
    Ok(picked)
}

/// Eigen + SPA + regression estimate of `(Θ, B)` for `r` communities.
pub fn estimate_mmsb(a: &AdjacencyMatrix, r: usize) -> Result<MmsbEstimate> {
    let n = a.n();
    if n == 0 || r == 0 || r > n {
        return Err(Error::Parameter(format!("r = {r} with n = {n}")));
    }
    let pairs = sym_eig(&a.to_dense(), r)?;
    estimate_mmsb_from_eigen(&pairs, r)
}

/// Same as [`estimate_mmsb`] but reuses the leading `r` columns of an
/// already computed decomposition (at least `r` pairs, largest first).
pub fn estimate_mmsb_from_eigen(pairs: &EigenPairs, r: usize) -> Result<MmsbEstimate> {
    if r == 0 || r > pairs.len() {
        return Err(Error::Parameter(format!("r = {r} but {} eigenpairs", pairs.len())));
    }
    let u = pairs.vectors.leading_columns(r);
    let lam = &pairs.values[..r];
    let pure = spa(&u, r)?;
    let us = u.select_rows(&pure);
    let us_inv = checked_inverse(&us, "U_S")?;
    let mut theta = u.matmul(&us_inv)?;
    simplex_rows(&mut theta);
    // B̂ = U_S Λ U_Sᵀ
    let mut b = Matrix::from_fn(r, r, |k, l| (0..r).map(|c| us.get(k, c) * lam[c] * us.get(l, c)).sum());
    symmetrize_clip(&mut b);
    Ok(MmsbEstimate {
        theta_hat: SoftMembership::from_projected(theta),
        b_hat: b,
        pure_nodes: pure,
    })
}

/// `Θ̂²² = A²¹ Θ̂¹¹ (Θ̂¹¹ᵀΘ̂¹¹)⁻¹ B̂⁻¹`, rows then projected onto the simplex.
pub fn regress_test_memberships(
    a21: &Matrix,
    theta11: &SoftMembership,
    b_hat: &Matrix,
) -> Result<SoftMembership> {
    let theta = theta11.theta();
    check_dim(theta.rows(), a21.cols())?;
    check_dim(theta.cols(), b_hat.rows())?;
    let r = theta.cols();
    let gram_inv = checked_inverse(&theta.tmatmul(theta)?, "Θ̂ᵀΘ̂")?;
    let b_inv = checked_inverse(b_hat, "B̂")?;
    let right = gram_inv.matmul(&b_inv)?;
    // A²¹Θ̂ skipping zeros; A²¹ is a 0/1 block and usually sparse
    let mut at = Matrix::zeros(a21.rows(), r);
    for i in 0..a21.rows() {
        let out = at.row_mut(i);
        for (j, &v) in a21.row(i).iter().enumerate() {
            if v != 0.0 {
                for (o, t) in out.iter_mut().zip(theta.row(j)) {
                    *o += v * t;
                }
            }
        }
    }
    let mut theta22 = at.matmul(&right)?;
    simplex_rows(&mut theta22);
    Ok(SoftMembership::from_projected(theta22))
}

/// Inverse with a 1-norm condition check against [`MAX_CONDITION`].
fn checked_inverse(m: &Matrix, what: &str) -> Result<Matrix> {
    let inv = m
        .inverse()
        .ok_or_else(|| Error::Estimation(format!("{what} is singular")))?;
    let cond = norm1(m) * norm1(&inv);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Estimation(format!("{what} has condition number {cond:.3e}")));
    }
    Ok(inv)
}

fn norm1(m: &Matrix) -> f64 {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Clip negatives, then project each row onto the simplex.
fn simplex_rows(m: &mut Matrix) {
    for i in 0..m.rows() {
        let row = m.row_mut(i);
        for v in row.iter_mut() {
            *v = v.max(0.0);
        }
        project_simplex_in_place(row);
    }
}

fn symmetrize_clip(b: &mut Matrix) {
    let r = b.rows();
    for k in 0..r {
        for l in k..r {
            let v = (0.5 * (b.get(k, l) + b.get(l, k))).clamp(0.0, 1.0);
            b.set(k, l, v);
            b.set(l, k, v);
        }
    }
}
