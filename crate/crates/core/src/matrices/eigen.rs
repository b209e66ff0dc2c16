//! Symmetric eigensolvers.
//!
//! Small matrices (n ≤ 64) use cyclic Jacobi rotations. Larger matrices are
//! reduced to tridiagonal form by Householder reflections; eigenvalues come
//! from implicit-shift QL, and eigenvectors either from QL with rotation
//! accumulation (full spectrum) or from inverse iteration on the tridiagonal
//! (partial spectrum, used by the cone projections on every solver step).

use super::{axpy, dot, norm2, Matrix, SymMatrix};
use crate::error::{Error, Result};

/// Largest dimension handled by the Jacobi path.
const JACOBI_MAX_N: usize = 64;
/// QL iterations allowed per eigenvalue before giving up.
const QL_MAX_ITER_PER_VALUE: usize = 60;

/// Eigenvalues in non-increasing order with matching orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `n x k`; column `c` belongs to `values[c]`.
    pub vectors: Matrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the leading `k` pairs.
    pub fn truncate(&self, k: usize) -> EigenPairs {
        let k = k.min(self.values.len());
        EigenPairs {
            values: self.values[..k].to_vec(),
            vectors: self.vectors.leading_columns(k),
        }
    }

    /// Largest `‖Mv − λv‖₂ / (1 + |λ|)` over the stored pairs.
    pub fn max_scaled_residual(&self, m: &SymMatrix) -> f64 {
        let n = m.n();
        let mut worst = 0.0f64;
        for (c, &lam) in self.values.iter().enumerate() {
            let v = self.vectors.column(c);
            let mv = m.matvec(&v);
            let r: f64 = (0..n).map(|i| (mv[i] - lam * v[i]).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(r / (1.0 + lam.abs()));
        }
        worst
    }
}

/// Which part of the spectrum a partial decomposition should return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    /// The `k` algebraically largest eigenvalues.
    Top(usize),
    /// Every eigenvalue strictly greater than the threshold.
    Above(f64),
    /// Every eigenvalue strictly smaller than the threshold.
    Below(f64),
}

/// Top-`k` eigenpairs of `m` by algebraic value.
pub fn sym_eig(m: &SymMatrix, k: usize) -> Result<EigenPairs> {
    let n = m.n();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "requested {k} eigenpairs of a {n}x{n} matrix"
        )));
    }
    if n <= JACOBI_MAX_N || 2 * k > n {
        return Ok(sym_eig_full(m)?.truncate(k));
    }
    let pairs = select_eig(m, Spectrum::Top(k))?;
    // inverse iteration is verified against the dense matrix; fall back to
    // the full QL path if it did not reach working accuracy
    if pairs.max_scaled_residual(m) <= 1e-9 {
        Ok(pairs)
    } else {
        Ok(sym_eig_full(m)?.truncate(k))
    }
}

/// Complete eigendecomposition, values non-increasing.
pub fn sym_eig_full(m: &SymMatrix) -> Result<EigenPairs> {
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let (values, vectors_t) = if m.n() <= JACOBI_MAX_N {
        jacobi(m)?
    } else {
        let tri = Tridiagonal::reduce(m);
        let (values, mut z) = tri.ql_with_vectors()?;
        for row in 0..m.n() {
            tri.back_transform(&mut z[row * m.n()..(row + 1) * m.n()]);
        }
        (values, z)
    };
    Ok(sort_descending(m.n(), values, vectors_t))
}

/// Partial decomposition: eigenpairs selected by `which`, sorted non-increasing.
pub fn select_eig(m: &SymMatrix, which: Spectrum) -> Result<EigenPairs> {
    partial_eig(m, |values| {
        let n = values.len();
        match which {
            Spectrum::Top(k) => (0..k.min(n)).collect(),
            Spectrum::Above(t) => (0..n).take_while(|&i| values[i] > t).collect(),
            Spectrum::Below(t) => (0..n).filter(|&i| values[i] < t).collect(),
        }
    })
}

/// Computes all eigenvalues (non-increasing), lets `choose` pick positions
/// in that order, and returns only the chosen pairs.
pub(crate) fn partial_eig(
    m: &SymMatrix,
    choose: impl FnOnce(&[f64]) -> Vec<usize>,
) -> Result<EigenPairs> {
    let n = m.n();
    let pick_from_full = |full: EigenPairs, idx: &[usize]| {
        let vectors = Matrix::from_fn(n, idx.len(), |i, j| full.vectors.get(i, idx[j]));
        let values = idx.iter().map(|&c| full.values[c]).collect();
        EigenPairs { values, vectors }
    };
    if n <= JACOBI_MAX_N {
        let full = sym_eig_full(m)?;
        let idx = choose(&full.values);
        return Ok(pick_from_full(full, &idx));
    }
    let spec = TridiagSpectrum::compute(m)?;
    let values: Vec<f64> = spec.values.iter().map(|v| v.0).collect();
    let idx = choose(&values);
    match spec.pairs(&idx) {
        Ok(p) => Ok(p),
        Err(_) => Ok(pick_from_full(sym_eig_full(m)?, &idx)),
    }
}

/// Eigenvalues only (non-increasing), via tridiagonal QL.
pub(crate) fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    if m.n() <= JACOBI_MAX_N {
        return Ok(sym_eig_full(m)?.values);
    }
    Ok(TridiagSpectrum::compute(m)?
        .values
        .iter()
        .map(|v| v.0)
        .collect())
}

/// All eigenvalues of `m` plus the tridiagonal factorization needed to
/// produce eigenvectors on demand.
pub(crate) struct TridiagSpectrum {
    tri: Tridiagonal,
    /// `(value, block index)`, sorted non-increasing.
    pub(crate) values: Vec<(f64, usize)>,
    /// `[start, end)` of each unreduced diagonal block.
    blocks: Vec<(usize, usize)>,
    norm: f64,
}

impl TridiagSpectrum {
    pub(crate) fn compute(m: &SymMatrix) -> Result<Self> {
        if m.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("matrix has non-finite entries".into()));
        }
        let mut tri = Tridiagonal::reduce(m);
        let n = tri.d.len();
        let norm = (0..n)
            .map(|i| {
                tri.d[i].abs()
                    + if i + 1 < n { tri.e[i].abs() } else { 0.0 }
                    + if i > 0 { tri.e[i - 1].abs() } else { 0.0 }
            })
            .fold(0.0f64, f64::max);
        // split into unreduced blocks; dropping couplings at the level of
        // the reduction's own rounding error is backward stable
        let split_tol = 4.0 * f64::EPSILON * norm.max(f64::MIN_POSITIVE);
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 0..n {
            if i + 1 == n || tri.e[i].abs() <= split_tol {
                if i + 1 < n {
                    tri.e[i] = 0.0;
                }
                blocks.push((start, i + 1));
                start = i + 1;
            }
        }
        let mut values = Vec::with_capacity(n);
        for (b, &(s, t)) in blocks.iter().enumerate() {
            let mut d = tri.d[s..t].to_vec();
            let mut e = tri.e[s..t].to_vec();
            if let Some(last) = e.last_mut() {
                *last = 0.0;
            }
            ql_implicit(&mut d, &mut e, None)?;
            values.extend(d.into_iter().map(|v| (v, b)));
        }
        values.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(Self {
            tri,
            values,
            blocks,
            norm,
        })
    }

    /// Eigenpairs for the given positions of `self.values`.
    pub(crate) fn pairs(&self, positions: &[usize]) -> Result<EigenPairs> {
        let n = self.tri.d.len();
        let k = positions.len();
        let mut vectors_t = vec![0.0; k * n];
        // previously computed vectors per block: (value, shift, row index)
        let mut done: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); self.blocks.len()];
        let sep = 10.0 * f64::EPSILON * self.norm.max(f64::MIN_POSITIVE);
        for (row, &pos) in positions.iter().enumerate() {
            let (lam, b) = self.values[pos];
            let (s, t) = self.blocks[b];
            let out = &mut vectors_t[row * n..(row + 1) * n];
            if t - s == 1 {
                out[s] = 1.0;
            } else {
                // nudge shifts apart inside clusters of equal eigenvalues
                let mut shift = lam;
                for &(_, prev_shift, _) in &done[b] {
                    if (shift - prev_shift).abs() < sep {
                        shift = prev_shift + sep;
                    }
                }
                let cluster_tol = 1e-3 * self.block_norm(s, t);
                let others: Vec<usize> = done[b]
                    .iter()
                    .filter(|(v, _, _)| (v - lam).abs() <= cluster_tol)
                    .map(|&(_, _, r)| r)
                    .collect();
                let prev: Vec<Vec<f64>> = others
                    .iter()
                    .map(|&r| vectors_t[r * n + s..r * n + t].to_vec())
                    .collect();
                let v = self.inverse_iteration(s, t, lam, shift, &prev, row as u64)?;
                vectors_t[row * n + s..row * n + t].copy_from_slice(&v);
                done[b].push((lam, shift, row));
            }
        }
        let mut vectors = Matrix::from_fn(n, k, |i, j| vectors_t[j * n + i]);
        self.tri.back_transform_block(&mut vectors);
        let values = positions.iter().map(|&p| self.values[p].0).collect();
        Ok(EigenPairs { values, vectors })
    }

    fn block_norm(&self, s: usize, t: usize) -> f64 {
        (s..t)
            .map(|i| {
                self.tri.d[i].abs()
                    + if i + 1 < t { self.tri.e[i].abs() } else { 0.0 }
                    + if i > s { self.tri.e[i - 1].abs() } else { 0.0 }
            })
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    fn inverse_iteration(
        &self,
        s: usize,
        t: usize,
        lam: f64,
        shift: f64,
        prev: &[Vec<f64>],
        salt: u64,
    ) -> Result<Vec<f64>> {
        let m = t - s;
        let d = &self.tri.d[s..t];
        let e = &self.tri.e[s..t - 1];
        let bnorm = self.block_norm(s, t);
        let lu = TridiagLu::factor(d, e, shift, f64::EPSILON * bnorm);
        // deterministic pseudo-random start vector
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
        let mut x: Vec<f64> = (0..m)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        orthogonalize(&mut x, prev);
        normalize(&mut x);
        let tol = 64.0 * f64::EPSILON * bnorm;
        let mut resid = f64::INFINITY;
        for it in 0..12 {
            lu.solve(&mut x);
            orthogonalize(&mut x, prev);
            if !normalize(&mut x) {
                return Err(Error::SolverFailure {
                    what: "inverse iteration".into(),
                    residual: f64::INFINITY,
                });
            }
            if it >= 1 {
                resid = tridiag_residual(d, e, lam, &x);
                if resid <= tol {
                    return Ok(x);
                }
            }
        }
        Err(Error::SolverFailure {
            what: "inverse iteration".into(),
            residual: resid,
        })
    }
}

fn tridiag_residual(d: &[f64], e: &[f64], lam: f64, x: &[f64]) -> f64 {
    let m = d.len();
    let mut r2 = 0.0;
    for i in 0..m {
        let mut v = (d[i] - lam) * x[i];
        if i > 0 {
            v += e[i - 1] * x[i - 1];
        }
        if i + 1 < m {
            v += e[i] * x[i + 1];
        }
        r2 += v * v;
    }
    r2.sqrt()
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    // twice is enough
    for _ in 0..2 {
        for b in basis {
            let c = dot(x, b);
            axpy(-c, b, x);
        }
    }
}

fn normalize(x: &mut [f64]) -> bool {
    let nrm = norm2(x);
    if !(nrm.is_finite() && nrm > 0.0) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= nrm);
    true
}

/// LU factorization with partial pivoting of `T − σI` for a symmetric
/// tridiagonal `T` (LAPACK `gttrf` layout).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let m = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; m.saturating_sub(2)];
        let mut swapped = vec![false; m.saturating_sub(1)];
        for i in 0..m.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let f = dl[i] / d[i];
                    dl[i] = f;
                    d[i + 1] -= f * du[i];
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < m {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        let tiny = tiny.max(f64::MIN_POSITIVE);
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let m = self.d.len();
        for i in 0..m.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[m - 1] /= self.d[m - 1];
        if m > 1 {
            b[m - 2] = (b[m - 2] - self.du[m - 2] * b[m - 1]) / self.d[m - 2];
        }
        for i in (0..m.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // rescale to avoid overflow on near-exact shifts
        let big = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if big > 1e150 || (big > 0.0 && big < 1e-150) {
            b.iter_mut().for_each(|v| *v /= big);
        }
    }
}

/// Householder reduction `M = Q T Qᵀ`.
struct Tridiagonal {
    d: Vec<f64>,
    /// `e[i]` couples rows `i` and `i + 1`; `e[n-1]` is unused.
    e: Vec<f64>,
    /// `(first index, tau, v)` with `H = I − tau·v·vᵀ` acting on `first..n`.
    reflectors: Vec<(usize, f64, Vec<f64>)>,
}

impl Tridiagonal {
    fn reduce(m: &SymMatrix) -> Self {
        // panel-blocked: reflections inside a panel are applied lazily through
        // the accumulated (V, W) pairs, and the trailing block is updated once
        // per panel
        const PANEL: usize = 32;
        let n = m.n();
        let mut a = m.as_slice().to_vec();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let steps = n.saturating_sub(2);
        let mut vs: Vec<Vec<f64>> = Vec::with_capacity(PANEL);
        let mut ws: Vec<Vec<f64>> = Vec::with_capacity(PANEL);
        let mut row = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut k0 = 0;
        while k0 < steps {
            let k1 = (k0 + PANEL).min(steps);
            vs.clear();
            ws.clear();
            for k in k0..k1 {
                // current row k, restricted to columns k..n
                let r = &mut row[k..n];
                r.copy_from_slice(&a[k * n + k..(k + 1) * n]);
                for (v, w) in vs.iter().zip(&ws) {
                    let (vk, wk) = (v[k], w[k]);
                    for (t, x) in r.iter_mut().enumerate() {
                        *x -= vk * w[k + t] + wk * v[k + t];
                    }
                }
                d[k] = r[0];
                let x = &r[1..];
                let x0 = x[0];
                let tail = dot(&x[1..], &x[1..]);
                if tail == 0.0 {
                    e[k] = x0;
                    continue;
                }
                let xnorm = (x0 * x0 + tail).sqrt();
                let alpha = if x0 >= 0.0 { -xnorm } else { xnorm };
                let base = k + 1;
                let len = n - base;
                let mut v = vec![0.0; n];
                v[base..].copy_from_slice(x);
                v[base] = x0 - alpha;
                let tau = 2.0 / (v[base] * v[base] + tail);
                e[k] = alpha;

                let vb = &v[base..];
                for i in 0..len {
                    let arow = &a[(base + i) * n + base..(base + i + 1) * n];
                    p[base + i] = dot(arow, vb);
                }
                for (pv, pw) in vs.iter().zip(&ws) {
                    let wv = dot(&pw[base..], vb);
                    let vv = dot(&pv[base..], vb);
                    for i in base..n {
                        p[i] -= pv[i] * wv + pw[i] * vv;
                    }
                }
                for x in &mut p[base..] {
                    *x *= tau;
                }
                let kk = 0.5 * tau * dot(&p[base..], vb);
                let mut w = vec![0.0; n];
                for i in base..n {
                    w[i] = p[i] - kk * v[i];
                }
                reflectors.push((base, tau, v[base..].to_vec()));
                vs.push(v);
                ws.push(w);
            }
            // trailing update A[k1.., k1..] −= Σ vwᵀ + wvᵀ
            if !vs.is_empty() {
                for i in k1..n {
                    let arow = &mut a[i * n + k1..(i + 1) * n];
                    for (v, w) in vs.iter().zip(&ws) {
                        let (vi, wi) = (v[i], w[i]);
                        if vi == 0.0 && wi == 0.0 {
                            continue;
                        }
                        for ((x, vj), wj) in arow.iter_mut().zip(&v[k1..]).zip(&w[k1..]) {
                            *x -= vi * wj + wi * vj;
                        }
                    }
                }
            }
            k0 = k1;
        }
        if n >= 2 {
            d[n - 2] = a[(n - 2) * n + n - 2];
            e[n - 2] = a[(n - 2) * n + n - 1];
        }
        d[n - 1] = a[n * n - 1];
        Self { d, e, reflectors }
    }

    /// Maps a vector in the tridiagonal basis back to the original basis.
    fn back_transform(&self, x: &mut [f64]) {
        for (first, tau, v) in self.reflectors.iter().rev() {
            let seg = &mut x[*first..];
            let s = tau * dot(v, seg);
            if s != 0.0 {
                axpy(-s, v, seg);
            }
        }
    }

    /// Applies the back-transformation to every column of `v` (`n x k`),
    /// working on whole rows so the inner loops run over `k`.
    fn back_transform_block(&self, v: &mut Matrix) {
        let k = v.cols();
        if k == 0 {
            return;
        }
        let mut s = vec![0.0; k];
        for (first, tau, h) in self.reflectors.iter().rev() {
            s.iter_mut().for_each(|x| *x = 0.0);
            for (off, &hi) in h.iter().enumerate() {
                if hi != 0.0 {
                    axpy(hi, v.row(first + off), &mut s);
                }
            }
            s.iter_mut().for_each(|x| *x *= tau);
            for (off, &hi) in h.iter().enumerate() {
                if hi != 0.0 {
                    axpy(-hi, &s, v.row_mut(first + off));
                }
            }
        }
    }

    /// QL on the whole tridiagonal, accumulating rotations into the rows of
    /// a transposed eigenvector matrix.
    fn ql_with_vectors(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.d.len();
        let mut d = self.d.clone();
        let mut e = self.e.clone();
        e[n - 1] = 0.0;
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        ql_implicit(&mut d, &mut e, Some(&mut zt))?;
        Ok((d, zt))
    }
}

/// Implicit-shift QL on a symmetric tridiagonal (`d`, `e` with `e[i]`
/// coupling `i` and `i+1`). When `zt` is given its rows are rotated along.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER_PER_VALUE {
                return Err(Error::SolverFailure {
                    what: "tridiagonal QL".into(),
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Cyclic Jacobi: returns eigenvalues and the transposed eigenvector matrix
/// (row `i` is the vector of value `i`).
fn jacobi(m: &SymMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.n();
    let mut a = m.as_slice().to_vec();
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let max_sweeps = 100 * n.max(1);
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            let values = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((values, vt));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J on rows/cols p, q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                let (lo, hi) = vt.split_at_mut(q * n);
                let vp = &mut lo[p * n..(p + 1) * n];
                let vq = &mut hi[..n];
                for k in 0..n {
                    let x = vp[k];
                    let y = vq[k];
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
    }
    let off: f64 = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| a[i * n + j] * a[i * n + j])
        .sum();
    Err(Error::SolverFailure {
        what: "Jacobi eigensolver".into(),
        residual: off.sqrt(),
    })
}

fn sort_descending(n: usize, values: Vec<f64>, vectors_t: Vec<f64>) -> EigenPairs {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let vectors = Matrix::from_fn(n, n, |i, j| vectors_t[order[j] * n + i]);
    EigenPairs {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    }
}
