//! Two-block ADMM shared by both relaxations.
//!
//! Both programs are written as `max ⟨C, X⟩` over `X ∈ K₁ ∩ K₂` where `K₁`
//! carries the PSD constraint (plus the affine rows of SDP-2) and `K₂` is
//! entrywise. Each block has a closed-form projection, and the linear
//! objective sits in the `K₂` step:
//!
//! ```text
//! X ← Π_K₁(Z − U)
//! X̂ ← αX + (1 − α)Z
//! Z ← Π_K₂(X̂ + U + C/ρ)
//! U ← U + X̂ − Z
//! ```

use super::{SdpSolution, SolverOptions, WarmStart};
use crate::error::Result;
use crate::matrices::{partial_eig, simplex_threshold, Matrix, SymMatrix};

/// Penalty updates fire when one residual exceeds the other by this factor.
const BALANCE_RATIO: f64 = 10.0;
const PENALTY_MIN: f64 = 1e-3;
const PENALTY_MAX: f64 = 1e3;
/// Iterations between penalty updates.
const PENALTY_COOLDOWN: usize = 5;

pub(crate) trait Cones {
    fn n(&self) -> usize;
    /// In-place projection onto the PSD-side set.
    fn project_first(&self, m: &mut SymMatrix) -> Result<()>;
    /// In-place projection onto the entrywise set.
    fn project_second(&self, m: &mut [f64]);
}

/// `{X ⪰ 0}` and `{0 ≤ X ≤ 1, diag X = 1}`.
///
/// The upper bound is implied by `X ⪰ 0` with unit diagonal; stating it in
/// the entrywise block stops the objective from pushing `Z` far outside the
/// feasible set.
pub(crate) struct Sdp1Cones {
    pub n: usize,
}

impl Cones for Sdp1Cones {
    fn n(&self) -> usize {
        self.n
    }

    fn project_first(&self, m: &mut SymMatrix) -> Result<()> {
        *m = crate::matrices::project_psd(m)?;
        Ok(())
    }

    fn project_second(&self, m: &mut [f64]) {
        for v in m.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        for i in 0..self.n {
            m[i * self.n + i] = 1.0;
        }
    }
}

/// `{X ⪰ 0, X1 = 1, tr X = r′}` and `{0 ≤ X ≤ 1}`.
///
/// Non-negative rows summing to one already bound every entry by 1.
pub(crate) struct Sdp2Cones {
    pub n: usize,
    pub r_prime: f64,
}

impl Cones for Sdp2Cones {
    fn n(&self) -> usize {
        self.n
    }

    fn project_first(&self, m: &mut SymMatrix) -> Result<()> {
        *m = project_doubly_stochastic_psd(m, self.r_prime)?;
        Ok(())
    }

    fn project_second(&self, m: &mut [f64]) {
        for v in m.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

/// Projection onto `{X ⪰ 0, X1 = 1, tr X = t}`.
///
/// Every such `X` is `11ᵀ/n + Y` with `Y ⪰ 0` supported on `1⊥` and
/// `tr Y = t − 1`. A Householder reflection `H` sending `1` to a multiple of
/// `e₀` splits off that direction; the trailing block of `HMH` is then
/// projected spectrally with its eigenvalues pushed onto
/// `{λ ≥ 0, Σλ = t − 1}`.
pub(crate) fn project_doubly_stochastic_psd(m: &SymMatrix, t: f64) -> Result<SymMatrix> {
    let n = m.n();
    let inv_n = 1.0 / n as f64;
    if n == 1 {
        return SymMatrix::new(1, vec![1.0]);
    }
    // H = I − τuuᵀ with u = 1 + √n e₀, so H1 = −√n e₀
    let sq = (n as f64).sqrt();
    let mut u = vec![1.0; n];
    u[0] += sq;
    let tau = 1.0 / (n as f64 + sq);
    let a = m.as_slice();
    let mut p: Vec<f64> = (0..n)
        .map(|i| tau * a[i * n..(i + 1) * n].iter().zip(&u).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    let kk = 0.5 * tau * p.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>();
    for (pi, ui) in p.iter_mut().zip(&u) {
        *pi -= kk * ui;
    }
    let sub = n - 1;
    let mut trailing = vec![0.0; sub * sub];
    for i in 1..n {
        for j in 1..n {
            trailing[(i - 1) * sub + (j - 1)] = a[i * n + j] - u[i] * p[j] - p[i] * u[j];
        }
    }
    let block = SymMatrix::new(sub, trailing)?;
    let budget = (t - 1.0).max(0.0);
    let mut shift = 0.0;
    let pairs = partial_eig(&block, |values| {
        if budget <= 0.0 {
            return Vec::new();
        }
        shift = simplex_threshold(values, budget);
        (0..values.len()).take_while(|&i| values[i] - shift > 0.0).collect()
    })?;
    let k = pairs.values.len();
    // W = H·[0; V]
    let mut w = Matrix::zeros(n, k);
    for c in 0..k {
        let mut col = vec![0.0; n];
        for i in 1..n {
            col[i] = pairs.vectors.get(i - 1, c);
        }
        let s = tau * col.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>();
        for i in 0..n {
            w.set(i, c, col[i] - s * u[i]);
        }
    }
    let lam: Vec<f64> = pairs.values.iter().map(|v| v - shift).collect();
    let mut out = SymMatrix::from_outer(&w, &lam);
    for v in out.data_mut() {
        *v += inv_n;
    }
    Ok(out)
}

pub(crate) fn run<K: Cones>(
    cones: &K,
    c: &SymMatrix,
    opts: &SolverOptions,
) -> Result<SdpSolution> {
    let n = cones.n();
    let nn = n * n;
    // scale the objective to unit Frobenius norm times √n; duals are stored
    // unscaled so warm starts survive changes of C
    let c_norm = c.frobenius_norm();
    let obj_scale = if c_norm > 0.0 { (n as f64).sqrt() / c_norm } else { 1.0 };
    let mut rho = opts.penalty.clamp(PENALTY_MIN, PENALTY_MAX);
    let (mut x, mut z, mut u) = match &opts.warm_start {
        Some(ws) if ws.x.n() == n => {
            rho = ws.penalty.clamp(PENALTY_MIN, PENALTY_MAX);
            let u = ws.dual.scale(obj_scale / rho);
            (ws.x.clone(), ws.z.clone(), u)
        }
        _ => {
            let mut z = SymMatrix::identity(n);
            cones.project_second(z.data_mut());
            (z.clone(), z, SymMatrix::zeros(n))
        }
    };
    let cs: Vec<f64> = c.as_slice().iter().map(|v| v * obj_scale).collect();
    let alpha = opts.relaxation;
    let eps_rel = opts.tolerance;
    let floor = n as f64 * opts.abs_tolerance / eps_rel;
    let mut z_prev = vec![0.0; nn];
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut since_update = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        // X-step
        {
            let xd = x.data_mut();
            for ((xi, zi), ui) in xd.iter_mut().zip(z.as_slice()).zip(u.as_slice()) {
                *xi = zi - ui;
            }
        }
        cones.project_first(&mut x)?;
        // Z-step with over-relaxation
        z_prev.copy_from_slice(z.as_slice());
        {
            let zd = z.data_mut();
            let xd = x.as_slice();
            let ud = u.as_slice();
            for i in 0..nn {
                let xh = alpha * xd[i] + (1.0 - alpha) * z_prev[i];
                zd[i] = xh + ud[i] + cs[i] / rho;
            }
        }
        cones.project_second(z.data_mut());
        {
            let ud = u.data_mut();
            let xd = x.as_slice();
            let zd = z.as_slice();
            for i in 0..nn {
                let xh = alpha * xd[i] + (1.0 - alpha) * z_prev[i];
                ud[i] += xh - zd[i];
            }
        }
        let mut r2 = 0.0;
        let mut s2 = 0.0;
        for i in 0..nn {
            let d = x.as_slice()[i] - z.as_slice()[i];
            r2 += d * d;
            let e = z.as_slice()[i] - z_prev[i];
            s2 += e * e;
        }
        let scale_p = x.frobenius_norm().max(z.frobenius_norm()).max(floor);
        let scale_d = (rho * u.frobenius_norm()).max(floor);
        primal = r2.sqrt() / scale_p;
        dual = rho * s2.sqrt() / scale_d;
        if primal <= eps_rel && dual <= eps_rel {
            converged = true;
            break;
        }
        since_update += 1;
        if opts.adaptive_penalty && since_update >= PENALTY_COOLDOWN {
            // balance the residuals as they are tested, i.e. relative
            let (rp, rd) = (primal, dual);
            if rp > BALANCE_RATIO * rd && rho * 2.0 <= PENALTY_MAX {
                rho *= 2.0;
                u = u.scale(0.5);
                since_update = 0;
            } else if rd > BALANCE_RATIO * rp && rho / 2.0 >= PENALTY_MIN {
                rho /= 2.0;
                u = u.scale(2.0);
                since_update = 0;
            }
        }
    }
    let objective = c.inner(&x)?;
    let warm = WarmStart {
        x: x.clone(),
        z,
        dual: u.scale(rho / obj_scale),
        penalty: rho,
    };
    Ok(SdpSolution {
        x_tilde: x,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        objective,
        converged,
        tolerance: eps_rel,
        warm,
    })
}
