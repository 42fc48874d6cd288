//! Type-I discrete sine transform and the fast Dirichlet Poisson solver it gives
//! for the five-point Laplacian on a rectangle.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// `X_k = Σ_{j=1..N} x_j sin(π j k / (N+1))`, computed through an FFT of length `2(N+1)`.
#[derive(Clone)]
pub struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dst1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dst1").field("n", &self.n).finish()
    }
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Dst1 { n, fft }
    }

    /// Transforms `data` in place. `buf` must hold `2(n+1)` entries.
    pub fn apply(&self, data: &mut [f64], buf: &mut [Complex<f64>]) {
        let n = self.n;
        let len = 2 * (n + 1);
        buf[0] = Complex::new(0.0, 0.0);
        buf[n + 1] = Complex::new(0.0, 0.0);
        for j in 0..n {
            buf[j + 1] = Complex::new(data[j], 0.0);
            buf[len - 1 - j] = Complex::new(-data[j], 0.0);
        }
        self.fft.process(&mut buf[..len]);
        for k in 0..n {
            data[k] = -0.5 * buf[k + 1].im;
        }
    }
}

/// Exact solver for `-Δ_h x = b` on interior nodes of an `nx × ny` grid with zero
/// boundary values.
#[derive(Debug, Clone)]
pub struct RectPoisson {
    nx: usize,
    ny: usize,
    dst_x: Dst1,
    dst_y: Dst1,
    inv_eig: Vec<f64>,
}

impl RectPoisson {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64) -> Self {
        let sx: Vec<f64> = (1..=nx)
            .map(|k| {
                let s = (k as f64 * PI / (2.0 * (nx + 1) as f64)).sin();
                4.0 * s * s / (hx * hx)
            })
            .collect();
        let sy: Vec<f64> = (1..=ny)
            .map(|k| {
                let s = (k as f64 * PI / (2.0 * (ny + 1) as f64)).sin();
                4.0 * s * s / (hy * hy)
            })
            .collect();
        let scale = 4.0 / ((nx + 1) as f64 * (ny + 1) as f64);
        let mut inv_eig = Vec::with_capacity(nx * ny);
        for &ey in &sy {
            for &ex in &sx {
                inv_eig.push(scale / (ex + ey));
            }
        }
        RectPoisson {
            nx,
            ny,
            dst_x: Dst1::new(nx),
            dst_y: Dst1::new(ny),
            inv_eig,
        }
    }

    /// Smallest eigenvalue of the discrete operator (known in closed form).
    pub fn min_eigenvalue(&self) -> f64 {
        let scale = 4.0 / ((self.nx + 1) as f64 * (self.ny + 1) as f64);
        scale / self.inv_eig[0]
    }

    fn transform2(&self, x: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * (nx.max(ny) + 1)];
        for row in x.chunks_mut(nx) {
            self.dst_x.apply(row, &mut buf);
        }
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = x[j * nx + i];
            }
            self.dst_y.apply(&mut col, &mut buf);
            for j in 0..ny {
                x[j * nx + i] = col[j];
            }
        }
    }

    /// Overwrites `x` with `(-Δ_h)^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        self.transform2(x);
        for (xi, s) in x.iter_mut().zip(&self.inv_eig) {
            *xi *= s;
        }
        self.transform2(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dst_matches_direct_sum() {
        let n = 13;
        let x: Vec<f64> = (0..n).map(|j| ((j * j) as f64 * 0.37).cos()).collect();
        let mut y = x.clone();
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * (n + 1)];
        Dst1::new(n).apply(&mut y, &mut buf);
        for k in 1..=n {
            let direct: f64 = (1..=n)
                .map(|j| x[j - 1] * (PI * (j * k) as f64 / (n + 1) as f64).sin())
                .sum();
            assert!((y[k - 1] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn inverts_five_point_laplacian() {
        let (nx, ny) = (17, 21);
        let (hx, hy) = (1.0 / 18.0, 2.0 / 22.0);
        let exact: Vec<f64> = (0..nx * ny).map(|k| ((k * 31 % 17) as f64) - 8.0).collect();
        let mut rhs = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = exact[j * nx + i];
                let w = if i > 0 { exact[j * nx + i - 1] } else { 0.0 };
                let e = if i + 1 < nx {
                    exact[j * nx + i + 1]
                } else {
                    0.0
                };
                let s = if j > 0 { exact[(j - 1) * nx + i] } else { 0.0 };
                let nn = if j + 1 < ny {
                    exact[(j + 1) * nx + i]
                } else {
                    0.0
                };
                rhs[j * nx + i] = (2.0 * c - w - e) / (hx * hx) + (2.0 * c - s - nn) / (hy * hy);
            }
        }
        let solver = RectPoisson::new(nx, ny, hx, hy);
        solver.solve_in_place(&mut rhs);
        for (a, b) in rhs.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
