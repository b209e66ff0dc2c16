//! Similarity matrices, normalized clustering matrices and the trace
//! criterion `⟨Ŝ, X⟩`.

use crate::error::{check_dim, Error, Result};
use crate::generators::{AdjacencyMatrix, HardMembership, Membership, SoftMembership};
use crate::matrices::{pairwise_sq_dist, sym_eig_full, Matrix, SymMatrix};

/// Relative eigenvalue cutoff for `(ΘᵀΘ)⁺`.
const PINV_CUTOFF: f64 = 1e-10;

/// `X = M(MᵀM)⁻¹Mᵀ` together with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedClusteringMatrix {
    pub x: SymMatrix,
    pub r: usize,
}

pub fn normalized_clustering_matrix(m: &Membership) -> Result<NormalizedClusteringMatrix> {
    match m {
        Membership::Hard(z) => clustering_matrix_hard(z),
        Membership::Soft(t) => clustering_matrix_soft(t),
    }
}

/// `X_ij = 1/m_k` when `i, j ∈ C_k`, else 0.
pub fn clustering_matrix_hard(z: &HardMembership) -> Result<NormalizedClusteringMatrix> {
    let sizes = z.sizes();
    if let Some(k) = sizes.iter().position(|&m| m == 0) {
        return Err(Error::Contract(format!("cluster {k} is empty")));
    }
    let l = z.labels();
    let x = SymMatrix::from_fn(z.n(), |i, j| {
        if l[i] == l[j] {
            1.0 / sizes[l[i]] as f64
        } else {
            0.0
        }
    });
    Ok(NormalizedClusteringMatrix { x, r: z.r() })
}

pub fn clustering_matrix_soft(t: &SoftMembership) -> Result<NormalizedClusteringMatrix> {
    let theta = t.theta();
    let g = gram_pinv(theta)?;
    if g.1 < theta.cols() {
        return Err(Error::Contract(format!(
            "membership has rank {} < {}",
            g.1,
            theta.cols()
        )));
    }
    let tg = theta.matmul(&g.0)?;
    let n = theta.rows();
    let x = SymMatrix::from_fn(n, |i, j| {
        tg.row(i).iter().zip(theta.row(j)).map(|(a, b)| a * b).sum()
    });
    Ok(NormalizedClusteringMatrix { x, r: theta.cols() })
}

/// `((ΘᵀΘ)⁺, numerical rank)`.
fn gram_pinv(theta: &Matrix) -> Result<(Matrix, usize)> {
    let r = theta.cols();
    let gram = SymMatrix::from_matrix(&theta.tmatmul(theta)?)?;
    let eig = sym_eig_full(&gram)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..r)
        .filter(|&c| top > 0.0 && eig.values[c] > PINV_CUTOFF * top)
        .collect();
    let pinv = Matrix::from_fn(r, r, |a, b| {
        keep.iter()
            .map(|&c| eig.vectors.get(a, c) * eig.vectors.get(b, c) / eig.values[c])
            .sum()
    });
    Ok((pinv, keep.len()))
}

/// `K_ij = exp(−‖Y_i − Y_j‖² / 2θ²)`.
pub fn gaussian_kernel(y: &Matrix, theta: f64) -> Result<SymMatrix> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Parameter(format!("bandwidth {theta} must be positive")));
    }
    let d = pairwise_sq_dist(y);
    let c = 1.0 / (2.0 * theta * theta);
    let data = d.as_slice().iter().map(|v| (-v * c).exp()).collect();
    Ok(SymMatrix::from_raw(d.n(), data))
}

/// `Ŝ = −‖Y_i − Y_j‖²`.
pub fn neg_sq_dist(y: &Matrix) -> SymMatrix {
    pairwise_sq_dist(y).scale(-1.0)
}

/// `Ŝ = A² − diag(A²)`: common-neighbor counts off the diagonal.
pub fn a2_similarity(a: &AdjacencyMatrix) -> SymMatrix {
    let n = a.n();
    let mut data = vec![0.0; n * n];
    for m in 0..n {
        let nb = a.neighbors(m);
        for (x, &i) in nb.iter().enumerate() {
            for &j in &nb[x + 1..] {
                data[i * n + j] += 1.0;
                data[j * n + i] += 1.0;
            }
        }
    }
    SymMatrix::from_raw(n, data)
}

/// `⟨S, X⟩ = Σ_ij S_ij X_ij`.
pub fn trace_criterion(s: &SymMatrix, x: &NormalizedClusteringMatrix) -> Result<f64> {
    s.inner(&x.x)
}

/// `⟨S, X⟩` for a hard clustering without forming `X`: `Σ_k sum(S[C_k, C_k]) / m_k`.
/// Empty clusters contribute nothing.
pub fn trace_hard(s: &SymMatrix, z: &HardMembership) -> Result<f64> {
    check_dim(s.n(), z.n())?;
    let l = z.labels();
    let mut block = vec![0.0; z.r()];
    for i in 0..s.n() {
        let row = s.row(i);
        let li = l[i];
        let mut acc = 0.0;
        for (j, &v) in row.iter().enumerate() {
            if l[j] == li {
                acc += v;
            }
        }
        block[li] += acc;
    }
    Ok(block
        .iter()
        .zip(z.sizes())
        .filter(|(_, m)| *m > 0)
        .map(|(b, m)| b / m as f64)
        .sum())
}

/// `⟨S, Θ(ΘᵀΘ)⁺Θᵀ⟩ = Σ_ab G_ab (ΘᵀSΘ)_ab` with `G = (ΘᵀΘ)⁺`.
pub fn trace_soft(s: &SymMatrix, t: &SoftMembership) -> Result<f64> {
    let theta = t.theta();
    check_dim(s.n(), theta.rows())?;
    let r = theta.cols();
    let n = theta.rows();
    let mut st = Matrix::zeros(n, r);
    for i in 0..n {
        let out = st.row_mut(i);
        for (j, &v) in s.row(i).iter().enumerate() {
            if v != 0.0 {
                for (o, t) in out.iter_mut().zip(theta.row(j)) {
                    *o += v * t;
                }
            }
        }
    }
    let core = theta.tmatmul(&st)?;
    pinv_contract(theta, &core)
}

/// `Σ_ab G_ab core_ab` with `G = (ΘᵀΘ)⁺`.
pub(crate) fn pinv_contract(theta: &Matrix, core: &Matrix) -> Result<f64> {
    let (g, _) = gram_pinv(theta)?;
    let r = theta.cols();
    let mut total = 0.0;
    for a in 0..r {
        for b in 0..r {
            total += g.get(a, b) * core.get(a, b);
        }
    }
    Ok(total)
}

/// Trace criterion for either membership kind.
pub fn trace_membership(s: &SymMatrix, m: &Membership) -> Result<f64> {
    match m {
        Membership::Hard(z) => trace_hard(s, z),
        Membership::Soft(t) => trace_soft(s, t),
    }
}
