//! Euclidean projections onto the PSD cone and the probability simplex.

use super::eigen::partial_eig;
use super::SymMatrix;
use crate::error::Result;

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
///
/// Only the smaller side of the spectrum gets eigenvectors, so projecting a
/// nearly-PSD or a low-rank-plus-negative matrix stays cheap.
pub fn project_psd(m: &SymMatrix) -> Result<SymMatrix> {
    let mut positive_side = true;
    let pairs = partial_eig(m, |values| {
        let n = values.len();
        let pos = values.iter().take_while(|&&v| v > 0.0).count();
        if pos <= n / 2 {
            (0..pos).collect()
        } else {
            positive_side = false;
            (pos..n).filter(|&i| values[i] < 0.0).collect()
        }
    })?;
    if positive_side {
        Ok(SymMatrix::from_outer(&pairs.vectors, &pairs.values))
    } else {
        // M − V·diag(λ⁻)·Vᵀ
        let neg = SymMatrix::from_outer(&pairs.vectors, &pairs.values);
        m.sub(&neg)
    }
}

/// Projection onto `{w ≥ 0, Σw = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    project_simplex_in_place(&mut w);
    w
}

pub fn project_simplex_in_place(v: &mut [f64]) {
    project_scaled_simplex(v, 1.0);
}

/// Projection onto `{w ≥ 0, Σw = s}` for `s ≥ 0` (sort-based threshold).
pub(crate) fn project_scaled_simplex(v: &mut [f64], s: f64) {
    if v.is_empty() {
        return;
    }
    let tau = simplex_threshold(v, s);
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

/// The shift `τ` with `Σ max(v_i − τ, 0) = s`.
pub(crate) fn simplex_threshold(v: &[f64], s: f64) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = sorted[0] - s;
    for (i, &x) in sorted.iter().enumerate() {
        cum += x;
        let t = (cum - s) / (i + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    tau
}
