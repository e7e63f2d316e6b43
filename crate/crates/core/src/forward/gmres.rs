//! Restarted GMRES for complex, matrix-free operators.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `||b - A x|| <= tol ||b||`.
    pub tol: f64,
    pub restart: usize,
    /// Cap on the total number of Arnoldi steps over all cycles.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions { tol: 1e-7, restart: 30, max_iter: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b>` conjugate-linear in `a`.
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Rotation zeroing `b` in `(a, b)`: `c` real, `s` complex.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let abs_a = a.norm();
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0), a);
    }
    if abs_a == 0.0 {
        return (0.0, b.conj() / abs_b, Complex64::new(abs_b, 0.0));
    }
    let denom = abs_a.hypot(abs_b);
    let phase = a / abs_a;
    (abs_a / denom, phase * b.conj() / denom, phase * denom)
}

/// Solves `A x = b` from a zero initial guess.
pub fn gmres(
    mut apply: impl FnMut(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    opts: &GmresOptions,
) -> Result<(Vec<Complex64>, GmresReport)> {
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((x, GmresReport { iterations: 0, relative_residual: 0.0 }));
    }
    let m = opts.restart.max(1);
    let mut total = 0;
    let mut residual = b.to_vec();
    let mut rel = 1.0;

    while total < opts.max_iter {
        let beta = norm(&residual);
        rel = beta / b_norm;
        if rel <= opts.tol {
            break;
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(residual.iter().map(|r| r / beta).collect());
        // Hessenberg columns, already rotated
        let mut hess: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(m);
        let mut g = vec![zero; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut steps = 0;

        while steps < m && total < opts.max_iter {
            let mut w = apply(&basis[steps]);
            let mut h = vec![zero; steps + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = inner(v, &w);
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
                h[i] = hij;
            }
            let w_norm = norm(&w);
            h[steps + 1] = Complex64::new(w_norm, 0.0);
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (a, bb) = (h[i], h[i + 1]);
                h[i] = c * a + s * bb;
                h[i + 1] = -s.conj() * a + c * bb;
            }
            let (c, s, r) = givens(h[steps], h[steps + 1]);
            h[steps] = r;
            h[steps + 1] = zero;
            rotations.push((c, s));
            g[steps + 1] = -s.conj() * g[steps];
            g[steps] *= c;
            hess.push(h);
            steps += 1;
            total += 1;
            rel = g[steps].norm() / b_norm;
            if rel <= opts.tol || w_norm == 0.0 {
                break;
            }
            basis.push(w.into_iter().map(|z| z / w_norm).collect());
        }

        // back substitution on the triangular factor
        let mut y = vec![zero; steps];
        for i in (0..steps).rev() {
            let mut acc = g[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                acc -= hess[k][i] * yk;
            }
            y[i] = acc / hess[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += yi * vk;
            }
        }
        // true residual guards against drift in the rotated estimate
        let ax = apply(&x);
        residual = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        rel = norm(&residual) / b_norm;
        if rel <= opts.tol {
            break;
        }
    }

    if rel <= opts.tol {
        Ok((x, GmresReport { iterations: total, relative_residual: rel }))
    } else {
        Err(Error::NoConvergence { iterations: total, residual: rel })
    }
}
