//! Lanczos propagation `exp(-i t H) v` for Hermitian sparse `H`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spin_algebra::{inner, l2_norm, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Bound on the estimated error of each substep.
    pub tol: f64,
    /// Largest Krylov subspace dimension.
    pub max_dim: usize,
    /// Target phase `width * tau` covered by one substep before splitting.
    pub step_phase: f64,
    /// How many times a failing substep may be halved.
    pub max_halvings: u32,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            tol: 1e-10,
            max_dim: 60,
            step_phase: 20.0,
            max_halvings: 20,
        }
    }
}

/// Gershgorin enclosure `(center, half_width)` of a Hermitian spectrum.
pub(crate) fn spectral_enclosure(h: &SparseMatrix) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..h.dim() {
        let mut diag = 0.0;
        let mut radius = 0.0;
        for (c, v) in h.row(r) {
            if c == r {
                diag = v.re;
            } else {
                radius += v.norm();
            }
        }
        lo = lo.min(diag - radius);
        hi = hi.max(diag + radius);
    }
    if h.dim() == 0 {
        return (0.0, 0.0);
    }
    (0.5 * (lo + hi), 0.5 * (hi - lo))
}

/// `exp(-i t H) v`.
pub(crate) fn expm_multiply(h: &SparseMatrix, v: &[C64], t: f64, opts: &KrylovOptions) -> Result<Vec<C64>> {
    let (center, width) = spectral_enclosure(h);
    let n_sub = ((t.abs() * width / opts.step_phase).ceil() as usize).max(1);
    let tau = t / n_sub as f64;
    let mut state = v.to_vec();
    for _ in 0..n_sub {
        state = substep(h, center, &state, tau, opts, opts.max_halvings)?;
    }
    Ok(state)
}

fn substep(h: &SparseMatrix, center: f64, v: &[C64], tau: f64, opts: &KrylovOptions, halvings: u32) -> Result<Vec<C64>> {
    match lanczos_step(h, center, v, tau, opts) {
        Ok(out) => Ok(out),
        Err(_) if halvings > 0 => {
            let half = substep(h, center, v, 0.5 * tau, opts, halvings - 1)?;
            substep(h, center, &half, 0.5 * tau, opts, halvings - 1)
        }
        Err(residual) => Err(not_converged(residual, opts)),
    }
}

fn not_converged(residual: f64, opts: &KrylovOptions) -> Error {
    Error::numeric(format!(
        "Krylov propagation did not converge: residual estimate {residual:.3e} > tol {:.1e} at dimension {}",
        opts.tol, opts.max_dim
    ))
}

/// One Lanczos approximation of `exp(-i tau (H - center)) v`, times the
/// phase `exp(-i tau center)`. Returns the error estimate on failure.
fn lanczos_step(h: &SparseMatrix, center: f64, v: &[C64], tau: f64, opts: &KrylovOptions) -> std::result::Result<Vec<C64>, f64> {
    let norm0 = l2_norm(v);
    if norm0 == 0.0 || tau == 0.0 {
        return Ok(v.to_vec());
    }
    let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|x| x / norm0).collect()];
    let mut diag: Vec<f64> = Vec::new();
    let mut off: Vec<f64> = Vec::new();
    let mut last_err = f64::INFINITY;

    for j in 0..opts.max_dim {
        let q = &basis[j];
        let mut w = h.matvec(q);
        for (wi, qi) in w.iter_mut().zip(q) {
            *wi -= qi * center;
        }
        let a = inner(q, &w).re;
        diag.push(a);
        // full reorthogonalization, applied twice
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= bi * proj;
                }
            }
        }
        let beta = l2_norm(&w);
        let coeffs = tridiagonal_exp(&diag, &off, tau);
        let m = diag.len();
        let breakdown = beta <= 1e-13 * (a.abs() + off.last().copied().unwrap_or(0.0) + 1.0);
        last_err = beta * coeffs[m - 1].norm();
        if breakdown || last_err <= opts.tol {
            let phase = C64::from_polar(norm0, -tau * center);
            let mut out = vec![C64::new(0.0, 0.0); v.len()];
            for (c, b) in coeffs.iter().zip(&basis) {
                let c = c * phase;
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += bi * c;
                }
            }
            return Ok(out);
        }
        off.push(beta);
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }
    Err(last_err)
}

/// First column of `exp(-i tau T)` for the symmetric tridiagonal `T`.
fn tridiagonal_exp(diag: &[f64], off: &[f64], tau: f64) -> Vec<C64> {
    let m = diag.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = diag[i];
        if i + 1 < m {
            t[(i, i + 1)] = off[i];
            t[(i + 1, i)] = off[i];
        }
    }
    let eig = t.symmetric_eigen();
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let vk = &eig.eigenvectors;
                    C64::from_polar(vk[(r, k)] * vk[(0, k)], -tau * eig.eigenvalues[k])
                })
                .sum()
        })
        .collect()
}
