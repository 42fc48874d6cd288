//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
}

/// How an integration call ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<const N: usize> {
    /// Reached the requested end point.
    Reached([f64; N]),
    /// The stop predicate fired; `before` and `after` bracket the accepted step.
    Stopped {
        before: (f64, [f64; N]),
        after: (f64, [f64; N]),
    },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator state. The last accepted step size carries over between calls,
/// so integrating a trajectory piecewise costs little extra.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    h: Option<f64>,
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            max_steps: 1_000_000,
            h: None,
        }
    }

    pub fn reset(&mut self) {
        self.h = None;
    }

    /// Starting step from the scaled sizes of `y` and `f` (Hairer, Nørsett and
    /// Wanner's heuristic).
    fn initial_step<const N: usize>(
        &self,
        f: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
    ) -> f64 {
        let norm = |v: &[f64; N]| {
            let s: f64 = (0..N)
                .map(|i| (v[i] / (self.atol + self.rtol * y[i].abs())).powi(2))
                .sum();
            (s / N as f64).sqrt()
        };
        let (d0, d1) = (norm(y), norm(k1));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = lin(y, h0, &[(1.0, k1)]);
        let k2 = f(t + h0, &y1);
        let diff: [f64; N] = std::array::from_fn(|i| k2[i] - k1[i]);
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        if !h1.is_finite() {
            return h0;
        }
        (100.0 * h0).min(h1)
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`. After each accepted
    /// step `stop(t, y)` is consulted; returning true ends the call early.
    pub fn integrate<const N: usize>(
        &mut self,
        mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
        t0: f64,
        y0: [f64; N],
        t1: f64,
        mut stop: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<Outcome<N>, OdeError> {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(Outcome::Reached(y0));
        }
        let (mut t, mut y) = (t0, y0);
        let mut k1 = f(t, &y);
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(&mut f, t, &y, &k1),
        }
        .min(span);
        // floor for step sizes: relative to t, or to the first step at t = 0
        let floor = |t: f64, h0: f64| 1e-14 * t.abs().max(h0);
        let h_first = h;
        let mut steps = 0;
        while t < t1 {
            if steps >= self.max_steps {
                return Err(OdeError::TooManySteps { t });
            }
            steps += 1;
            let h_natural = h;
            let last = t + h >= t1 || t1 - (t + h) < 1e-12 * span;
            if last {
                h = t1 - t;
            }
            let k2 = f(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &lin(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = lin(
                &y,
                h,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = f(t + h, &y_new);
            let mut err = 0.0;
            let mut finite = true;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
                finite &= y_new[i].is_finite() && k7[i].is_finite();
            }
            err = (err / N as f64).sqrt();
            if !finite || err.is_nan() {
                if h < floor(t, h_first) {
                    return Err(OdeError::NonFinite { t });
                }
                h *= 0.25;
                continue;
            }
            if err <= 1.0 {
                let t_prev = t;
                let y_prev = y;
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = if last { h_natural } else { h * grow };
                self.h = Some(h);
                if stop(t, &y) {
                    return Ok(Outcome::Stopped {
                        before: (t_prev, y_prev),
                        after: (t, y),
                    });
                }
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < 0.1 * floor(t, h_first) {
                    return Err(OdeError::StepUnderflow { t });
                }
            }
        }
        Ok(Outcome::Reached(y))
    }
}
