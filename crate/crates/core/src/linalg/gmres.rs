//! Restarted, right-preconditioned GMRES with modified Gram-Schmidt.

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iter: usize,
    /// Target `‖b - A x‖ / ‖b‖`.
    pub rel_tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 60,
            max_iter: 600,
            rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` starting from the contents of `x`. `apply(v, out)` computes
/// `out = A v`; `precond(v, out)` computes `out ≈ A^{-1} v`.
pub fn gmres(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    mut precond: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    opts: GmresOptions,
) -> GmresOutcome {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return GmresOutcome {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let m = opts.restart.max(1);
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut hess = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m + 1]);
    let mut total = 0;
    let mut rel;

    while total < opts.max_iter {
        apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= opts.rel_tol {
            return GmresOutcome {
                iterations: total,
                relative_residual: rel,
                converged: true,
            };
        }
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            precond(&basis[k], &mut z);
            apply(&z, &mut w);
            for (i, vi) in basis.iter().enumerate() {
                let h = dot(&w, vi);
                hess[i][k] = h;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= h * vj;
                }
            }
            let h_next = norm(&w);
            hess[k + 1][k] = h_next;
            for i in 0..k {
                let t = cs[i] * hess[i][k] + sn[i] * hess[i + 1][k];
                hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
                hess[i][k] = t;
            }
            let denom = hess[k][k].hypot(hess[k + 1][k]);
            if denom == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = hess[k][k] / denom;
            sn[k] = hess[k + 1][k] / denom;
            hess[k][k] = denom;
            hess[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            rel = g[k + 1].abs() / b_norm;
            if rel <= opts.rel_tol || total >= opts.max_iter || h_next == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }
        // back-substitute for the Krylov coefficients, then x += M^{-1} V y
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| hess[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        w.iter_mut().for_each(|v| *v = 0.0);
        for (yi, vi) in y.iter().zip(&basis) {
            for (wj, vj) in w.iter_mut().zip(vi) {
                *wj += yi * vj;
            }
        }
        precond(&w, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        if rel <= opts.rel_tol {
            // confirm with the true residual on the next pass
            continue;
        }
        if k_used == 0 {
            break;
        }
    }
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    rel = norm(&r) / b_norm;
    GmresOutcome {
        iterations: total,
        relative_residual: rel,
        converged: rel <= opts.rel_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_tridiagonal_system() {
        let n = 50;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { 0.0 };
                let right = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = 3.0 * v[i] - 1.5 * left - 0.4 * right;
            }
        };
        let exact: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        apply(&exact, &mut b);
        let mut x = vec![0.0; n];
        let out = gmres(
            apply,
            |v: &[f64], o: &mut [f64]| o.copy_from_slice(v),
            &b,
            &mut x,
            GmresOptions {
                restart: 10,
                max_iter: 500,
                rel_tol: 1e-12,
            },
        );
        assert!(out.converged, "{out:?}");
        for (a, e) in x.iter().zip(&exact) {
            assert!((a - e).abs() < 1e-9);
        }
    }
}
