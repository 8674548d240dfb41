//! Chebyshev expansion of `exp(−i 2π H t)` for real symmetric `H`.
//!
//! The spectrum is mapped onto `[−1, 1]` through its Gershgorin enclosure and
//! the propagator expanded as `e^{−iθc} Σ_k (2 − δ_k0) (−i)^k J_k(θΔ) T_k(H̃)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::sparse::CsrMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `J_0(z) … J_{n_max}(z)` for `z > 0` by Miller's backward recurrence,
/// normalized with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_sequence(z: f64, n_max: usize) -> Vec<f64> {
    assert!(z > 0.0 && z.is_finite());
    let start = n_max.max(z.ceil() as usize) + 60 + (10.0 * z.cbrt()).ceil() as usize;
    let mut values = vec![0.0; start + 2];
    let mut upper = 0.0; // J_{k+1}
    let mut current = 1e-300; // J_k
    values[start] = current;
    for k in (1..=start).rev() {
        let lower = 2.0 * k as f64 / z * current - upper;
        upper = current;
        current = lower;
        values[k - 1] = current;
        if current.abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            upper *= 1e-250;
            current *= 1e-250;
        }
    }
    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    values.truncate(n_max + 1);
    values.iter_mut().for_each(|v| *v /= norm);
    values
}

/// Number of Chebyshev terms and the Bessel weights for argument `z`.
fn truncated_weights(z: f64, tol: f64) -> Vec<f64> {
    let mut n = (z.ceil() as usize) + 32;
    loop {
        let j = bessel_j_sequence(z, n);
        let cutoff = (tol * 1e-2).max(1e-300);
        if let Some(k) =
            (z.ceil() as usize..=n).find(|&k| j[k].abs() < cutoff && j.get(k + 1).is_none_or(|v| v.abs() < cutoff))
        {
            let mut j = j;
            j.truncate(k + 1);
            return j;
        }
        n *= 2;
    }
}

/// Propagates `v` under `H` for time `t` (μs, `H` in MHz).
pub(crate) fn propagate(h: &CsrMatrix, v: &[Complex64], t: f64, tol: f64) -> (Vec<Complex64>, usize) {
    let (lo, hi) = h.gershgorin_bounds();
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-300;
    let global = Complex64::from_polar(1.0, -TAU * centre * t);
    let z = TAU * t * half;
    if t == 0.0 || v.is_empty() {
        return (v.to_vec(), 0);
    }
    if hi - lo == 0.0 || z < 1e-300 {
        return (v.iter().map(|x| x * global).collect(), 0);
    }
    let weights = truncated_weights(z, tol);

    let n = v.len();
    let scaled = |x: &[Complex64], out: &mut [Complex64]| {
        h.matvec_into(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = (*o - xi * centre) / half;
        }
    };
    let phase = |k: usize| -> Complex64 {
        match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        }
    };

    let mut prev = v.to_vec();
    let mut acc: Vec<Complex64> = prev.iter().map(|x| x * weights[0]).collect();
    if weights.len() == 1 {
        return (acc.iter().map(|x| x * global).collect(), 0);
    }
    let mut curr = vec![ZERO; n];
    scaled(&prev, &mut curr);
    let c1 = phase(1) * (2.0 * weights[1]);
    for (a, x) in acc.iter_mut().zip(&curr) {
        *a += c1 * x;
    }
    let mut next = vec![ZERO; n];
    for (k, &jk) in weights.iter().enumerate().skip(2) {
        scaled(&curr, &mut next);
        let ck = phase(k) * (2.0 * jk);
        for ((nx, p), a) in next.iter_mut().zip(&prev).zip(acc.iter_mut()) {
            *nx = 2.0 * *nx - p;
            *a += ck * *nx;
        }
        std::mem::swap(&mut prev, &mut curr);
        std::mem::swap(&mut curr, &mut next);
    }
    let terms = weights.len() - 1;
    (acc.iter().map(|x| x * global).collect(), terms)
}
