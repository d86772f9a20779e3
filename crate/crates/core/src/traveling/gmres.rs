//! Restarted GMRES with right preconditioning for real, matrix-free operators.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmresConfig {
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Stop when `‖b - A x‖₂ ≤ rel_tol · ‖b‖₂`.
    pub rel_tol: f64,
    /// Cap on the total number of Arnoldi steps.
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            restart: 30,
            rel_tol: 1e-3,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOutcome {
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` where `apply(v, out)` computes `out = A v` and
/// `precond(v, out)` computes `out = M⁻¹ v`. The iteration works on
/// `A M⁻¹ y = b`, `x = M⁻¹ y`; `x` holds the initial guess on entry.
pub fn gmres<A, M>(mut apply: A, mut precond: M, b: &[f64], x: &mut [f64], cfg: &GmresConfig) -> GmresOutcome
where
    A: FnMut(&[f64], &mut [f64]),
    M: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    assert_eq!(x.len(), n);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return GmresOutcome {
            iterations: 0,
            rel_residual: 0.0,
            converged: true,
        };
    }
    let m = cfg.restart.max(1);
    let mut total = 0usize;
    let mut work = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut r = vec![0.0; n];

    loop {
        apply(x, &mut work);
        for i in 0..n {
            r[i] = b[i] - work[i];
        }
        let beta = norm(&r);
        let mut rel = beta / bnorm;
        if rel <= cfg.rel_tol || total >= cfg.max_iter {
            return GmresOutcome {
                iterations: total,
                rel_residual: rel,
                converged: rel <= cfg.rel_tol,
            };
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // Hessenberg columns, stored column-wise with m+1 rows
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut steps = 0;

        for j in 0..m {
            precond(&basis[j], &mut z);
            apply(&z, &mut work);
            let mut col = vec![0.0; j + 2];
            // modified Gram-Schmidt
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&work, v);
                col[i] = hij;
                for (w, vi) in work.iter_mut().zip(v) {
                    *w -= hij * vi;
                }
            }
            let hnext = norm(&work);
            col[j + 1] = hnext;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let denom = col[j].hypot(col[j + 1]);
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[j] / denom, col[j + 1] / denom) };
            col[j] = denom;
            col[j + 1] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            steps = j + 1;
            total += 1;
            rel = g[j + 1].abs() / bnorm;
            if rel <= cfg.rel_tol || total >= cfg.max_iter || hnext == 0.0 {
                break;
            }
            basis.push(work.iter().map(|v| v / hnext).collect());
        }

        // back substitution for the Krylov coefficients
        let mut y = vec![0.0; steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in i + 1..steps {
                s -= h[k][i] * y[k];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vi) in update.iter_mut().zip(v) {
                *u += yi * vi;
            }
        }
        precond(&update, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
    }
}
