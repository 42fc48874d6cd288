#![allow(dead_code)]

use lesys::radial::solve_with_continuation;
use lesys::{ExponentPair, RadialGrid, RadialSolveConfig, SolutionPair};

/// `J₀(x) = Σ (−x²/4)^k / (k!)²`, summed until terms stop mattering.
pub fn bessel_j0(x: f64) -> f64 {
    let y = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= y / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J₀`, bisected on `[2, 3]` to `tol`.
pub fn first_zero_j0(tol: f64) -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn pair(p: f64, q: f64) -> ExponentPair {
    ExponentPair::new(p, q).unwrap()
}

/// Radial Newton solve on the unit disk with the continuation fallback.
pub fn disk(p: f64, q: f64, n: usize) -> SolutionPair {
    let grid = RadialGrid::new(1.0, n).unwrap();
    solve_with_continuation(pair(p, q), grid, &RadialSolveConfig::default()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
