//! Matrix-free GMRES without restarts (the iteration cap doubles as the Krylov dimension).

use serde::{Deserialize, Serialize};

use crate::grid::l2_norm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmresOptions {
    /// Stop once `||b - A x|| <= rtol ||b||`.
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            rtol: 0.01,
            max_iter: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual estimated by the Arnoldi recurrence.
    pub rel_residual: f64,
    /// Non-finite values were produced; `x` must not be used.
    pub breakdown: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |s, (x, y)| s + x * y)
}

/// Solves `A x = b` from `x0 = 0`.
pub fn gmres(apply: impl Fn(&[f64], &mut [f64]), b: &[f64], opts: &GmresOptions) -> GmresOutcome {
    let n = b.len();
    let beta = l2_norm(b);
    if beta == 0.0 {
        return GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            rel_residual: 0.0,
            breakdown: false,
        };
    }
    if !beta.is_finite() {
        return GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            rel_residual: f64::NAN,
            breakdown: true,
        };
    }
    let k_max = opts.max_iter.max(1);
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    v.push(b.iter().map(|x| x / beta).collect());
    let mut hess = vec![vec![0.0; k_max]; k_max + 1];
    let mut cs = vec![0.0; k_max];
    let mut sn = vec![0.0; k_max];
    let mut g = vec![0.0; k_max + 1];
    g[0] = beta;
    let mut k_done = 0;
    let mut rel = 1.0;
    let mut w = vec![0.0; n];
    for k in 0..k_max {
        apply(&v[k], &mut w);
        for j in 0..=k {
            let hjk = dot(&w, &v[j]);
            hess[j][k] = hjk;
            for (wi, vi) in w.iter_mut().zip(&v[j]) {
                *wi -= hjk * vi;
            }
        }
        let hnext = l2_norm(&w);
        hess[k + 1][k] = hnext;
        for j in 0..k {
            let t = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
            hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
            hess[j][k] = t;
        }
        let denom = hess[k][k].hypot(hess[k + 1][k]);
        if denom == 0.0 || !denom.is_finite() {
            return GmresOutcome {
                x: vec![0.0; n],
                iterations: k,
                rel_residual: f64::NAN,
                breakdown: true,
            };
        }
        cs[k] = hess[k][k] / denom;
        sn[k] = hess[k + 1][k] / denom;
        hess[k][k] = denom;
        hess[k + 1][k] = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] *= cs[k];
        k_done = k + 1;
        rel = g[k + 1].abs() / beta;
        if rel <= opts.rtol || hnext == 0.0 {
            break;
        }
        v.push(w.iter().map(|x| x / hnext).collect());
    }
    let mut y = vec![0.0; k_done];
    for i in (0..k_done).rev() {
        let mut s = g[i];
        for j in i + 1..k_done {
            s -= hess[i][j] * y[j];
        }
        y[i] = s / hess[i][i];
    }
    let mut x = vec![0.0; n];
    for (j, yj) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&v[j]) {
            *xi += yj * vi;
        }
    }
    let breakdown = !x.iter().all(|v| v.is_finite());
    GmresOutcome {
        x,
        iterations: k_done,
        rel_residual: rel,
        breakdown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(x: &[f64], y: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let l = if i > 0 { x[i - 1] } else { 0.0 };
            let r = if i + 1 < n { x[i + 1] } else { 0.0 };
            y[i] = 3.0 * x[i] - l - 0.5 * r;
        }
    }

    #[test]
    fn converges_to_tolerance() {
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let out = gmres(tridiag, &b, &GmresOptions { rtol: 1e-12, max_iter: 40 });
        assert!(!out.breakdown);
        let mut ax = vec![0.0; 40];
        tridiag(&out.x, &mut ax);
        let res: f64 = ax.iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(res / l2_norm(&b) < 1e-11);
        assert!((out.rel_residual - res / l2_norm(&b)).abs() < 1e-10);
    }

    #[test]
    fn honours_iteration_cap() {
        let b: Vec<f64> = (0..200).map(|i| ((i * i) % 7) as f64 - 3.0).collect();
        let out = gmres(tridiag, &b, &GmresOptions { rtol: 1e-30, max_iter: 3 });
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let out = gmres(tridiag, &[0.0; 5], &GmresOptions::default());
        assert_eq!(out.x, vec![0.0; 5]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn identity_is_one_step() {
        let b = [1.0, -2.0, 0.5];
        let out = gmres(|x, y| y.copy_from_slice(x), &b, &GmresOptions::default());
        assert_eq!(out.iterations, 1);
        for (x, b) in out.x.iter().zip(&b) {
            assert!((x - b).abs() < 1e-15);
        }
    }
}
