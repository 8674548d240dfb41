//! Krylov-subspace approximation of `exp(−i 2π A t) v`.
//!
//! Hermitian operators use the Lanczos recurrence with full
//! reorthogonalization; general operators use Arnoldi. Both share one
//! sub-stepping driver: a basis built at the current vector serves every trial
//! step size, and a step is accepted once the residual estimate
//! `2π β h_{m+1,m} |e_mᵀ exp(−iθH_m) e_1|` falls below `tol / t`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{LinearOperator, PropagatorConfig};
use crate::error::{Error, Result};
use crate::state::{inner, norm_sqr};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub substeps: usize,
    pub matvecs: usize,
}

/// Reduced operator on a Krylov basis.
enum Reduced {
    /// Eigendecomposition of the real tridiagonal Lanczos matrix.
    Tridiagonal {
        vectors: DMatrix<f64>,
        values: DVector<f64>,
    },
    Hessenberg(DMatrix<Complex64>),
}

impl Reduced {
    /// First column of `exp(−iθ H_m)`.
    fn first_column(&self, theta: f64) -> Vec<Complex64> {
        match self {
            Reduced::Tridiagonal { vectors, values } => {
                let m = values.len();
                let weights: Vec<Complex64> = (0..m)
                    .map(|k| Complex64::from_polar(vectors[(0, k)], -theta * values[k]))
                    .collect();
                (0..m)
                    .map(|i| (0..m).map(|k| weights[k] * vectors[(i, k)]).sum())
                    .collect()
            }
            Reduced::Hessenberg(h) => {
                let scaled = h.map(|x| x * Complex64::new(0.0, -theta));
                let e = scaled.exp();
                e.column(0).iter().copied().collect()
            }
        }
    }
}

struct Projection {
    basis: Vec<Vec<Complex64>>,
    reduced: Reduced,
    /// `h_{m+1,m}`; zero after an invariant-subspace breakdown.
    next: f64,
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale_into(alpha: f64, x: &[Complex64]) -> Vec<Complex64> {
    x.iter().map(|v| v * alpha).collect()
}

fn breakdown_threshold(scale: f64) -> f64 {
    1e-13 * scale.max(1e-300)
}

fn lanczos(op: &dyn LinearOperator, start: Vec<Complex64>, m: usize, stats: &mut KrylovStats) -> Projection {
    let n = start.len();
    let mut basis = vec![start];
    let mut alphas = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut u = vec![ZERO; n];
    let mut scale = 0.0_f64;
    let mut next = 0.0;
    for j in 0..m {
        op.apply(&basis[j], &mut u);
        stats.matvecs += 1;
        let alpha = inner(&basis[j], &u).re;
        axpy(Complex64::new(-alpha, 0.0), &basis[j], &mut u);
        if j > 0 {
            axpy(Complex64::new(-betas[j - 1], 0.0), &basis[j - 1], &mut u);
        }
        for v in &basis {
            let c = inner(v, &u);
            axpy(-c, v, &mut u);
        }
        alphas.push(alpha);
        let b = norm_sqr(&u).sqrt();
        scale = scale.max(alpha.abs() + b + betas.last().copied().unwrap_or(0.0));
        if b <= breakdown_threshold(scale) {
            next = 0.0;
            break;
        }
        if j + 1 == m {
            next = b;
            break;
        }
        betas.push(b);
        basis.push(scale_into(1.0 / b, &u));
    }
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    basis.truncate(k);
    let eig = SymmetricEigen::new(t);
    Projection {
        basis,
        reduced: Reduced::Tridiagonal {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        },
        next,
    }
}

fn arnoldi(op: &dyn LinearOperator, start: Vec<Complex64>, m: usize, stats: &mut KrylovStats) -> Projection {
    let n = start.len();
    let mut basis = vec![start];
    let mut h = DMatrix::<Complex64>::zeros(m + 1, m);
    let mut u = vec![ZERO; n];
    let mut scale = 0.0_f64;
    let mut next = 0.0;
    let mut k = 0;
    for j in 0..m {
        op.apply(&basis[j], &mut u);
        stats.matvecs += 1;
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = inner(v, &u);
                h[(i, j)] += c;
                axpy(-c, v, &mut u);
            }
        }
        k = j + 1;
        let b = norm_sqr(&u).sqrt();
        scale = scale.max(h.column(j).iter().map(|c| c.norm()).sum::<f64>() + b);
        if b <= breakdown_threshold(scale) {
            next = 0.0;
            break;
        }
        if j + 1 == m {
            next = b;
            break;
        }
        h[(j + 1, j)] = Complex64::new(b, 0.0);
        basis.push(scale_into(1.0 / b, &u));
    }
    basis.truncate(k);
    Projection {
        basis,
        reduced: Reduced::Hessenberg(h.view((0, 0), (k, k)).into_owned()),
        next,
    }
}

/// `exp(−i 2π A t) v` by adaptive Krylov sub-stepping.
pub(crate) fn expv(
    op: &dyn LinearOperator,
    v: &[Complex64],
    t: f64,
    cfg: &PropagatorConfig,
    hermitian: bool,
) -> Result<(Vec<Complex64>, KrylovStats)> {
    let mut stats = KrylovStats::default();
    let mut w = v.to_vec();
    if t == 0.0 || w.is_empty() {
        return Ok((w, stats));
    }
    let m = cfg.krylov_dim.min(w.len()).max(1);
    let rate_budget = cfg.step_tolerance / t;
    let mut done = 0.0;
    let mut step = t;
    while done < t {
        if stats.substeps >= cfg.max_substeps {
            return Err(Error::NonConvergence {
                max_substeps: cfg.max_substeps,
            });
        }
        let beta = norm_sqr(&w).sqrt();
        if beta == 0.0 {
            break;
        }
        let start = scale_into(1.0 / beta, &w);
        let proj = if hermitian {
            lanczos(op, start, m, &mut stats)
        } else {
            arnoldi(op, start, m, &mut stats)
        };
        let remaining = t - done;
        let size = proj.basis.len();
        let mut dt = remaining.min(2.0 * step);
        let coeffs = loop {
            let s = proj.reduced.first_column(TAU * dt);
            if proj.next == 0.0 {
                break s;
            }
            let rate = TAU * beta * proj.next * s[size - 1].norm();
            if rate <= rate_budget {
                break s;
            }
            let shrink = (0.9 * (rate_budget / rate).powf(1.0 / (size.max(2) - 1) as f64)).clamp(0.05, 0.9);
            dt *= shrink;
            if dt <= t * 1e-14 {
                return Err(Error::NonConvergence {
                    max_substeps: cfg.max_substeps,
                });
            }
        };
        let mut next = vec![ZERO; w.len()];
        for (c, b) in coeffs.iter().zip(&proj.basis) {
            axpy(c * beta, b, &mut next);
        }
        w = next;
        done = if remaining - dt <= t * 1e-15 { t } else { done + dt };
        step = dt;
        stats.substeps += 1;
    }
    Ok((w, stats))
}
