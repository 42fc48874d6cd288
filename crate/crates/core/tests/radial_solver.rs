mod common;

use common::{disk, pair, rel};
use lesys::diagnostics::pohozaev_residual;
use lesys::radial::{continue_path, solve_shooting, solve_shooting_on};
use lesys::{radial_residual, solve_newton, RadialGrid, RadialSolveConfig};

#[test]
fn newton_matches_shooting_for_equal_exponents() {
    let shot = solve_shooting(pair(3.0, 3.0), 1.0, 1e-10).unwrap();
    let fd = disk(3.0, 3.0, 2048);
    assert!(rel(fd.max_u(), shot.max_u()) <= 1e-6);
    // (2,2) converges at second order towards the shooting value
    let shot = solve_shooting(pair(2.0, 2.0), 1.0, 1e-10).unwrap();
    let e512 = rel(disk(2.0, 2.0, 512).max_u(), shot.max_u());
    let e1024 = rel(disk(2.0, 2.0, 1024).max_u(), shot.max_u());
    assert!(e1024 <= 1e-6, "{e1024:e}");
    assert!((e512 / e1024 - 4.0).abs() < 0.2, "{e512:e} {e1024:e}");
}

#[test]
fn converged_residual_is_below_tolerance_times_scale() {
    let e = pair(3.0, 3.0);
    let s = disk(3.0, 3.0, 1024);
    let (ru, rv) = radial_residual(&s.u, &s.v, &e).unwrap();
    let scale = s.max_v().powf(3.0).max(s.max_u().powf(3.0));
    let worst = ru
        .values()
        .iter()
        .chain(rv.values())
        .fold(0.0f64, |m, r| m.max(r.abs()));
    assert!(worst <= s.tolerance * scale);
}

#[test]
fn comparison_ratios_stay_below_one() {
    let s = disk(1.0, 4.0, 512);
    assert!(s.max_u() / s.max_v() <= 1.0);
    assert!(s.max_v() / s.max_u().powf(4.0) <= 1.0);
}

#[test]
fn large_q_from_warm_start_has_maximum_near_one() {
    let g = RadialGrid::new(1.0, 2048).unwrap();
    let cfg = RadialSolveConfig::default();
    let s512 = disk(1.0, 512.0, 2048);
    let s = continue_path(s512, pair(1.0, 1024.0), g, &cfg).unwrap();
    assert!(s.converged);
    assert!(s.max_u() > 0.9 && s.max_u() < 1.1, "{}", s.max_u());
}

#[test]
fn grid_refinement_is_second_order() {
    let m: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| disk(2.0, 3.0, n).max_u())
        .collect();
    let order = ((m[0] - m[1]) / (m[1] - m[2])).log2();
    assert!(order >= 1.9, "{order}");
}

#[test]
fn warm_path_agrees_with_shooting_at_every_sample() {
    let g = RadialGrid::new(1.0, 2048).unwrap();
    let cfg = RadialSolveConfig::default();
    let mut prev = disk(1.0, 2.0, 2048);
    for q in [4.0, 8.0, 16.0] {
        let e = pair(1.0, q);
        let s = continue_path(prev, e, g, &cfg).unwrap();
        let shot = solve_shooting(e, 1.0, 1e-10).unwrap();
        assert!(rel(s.max_u(), shot.max_u()) <= 1e-6, "q={q}");
        assert!(rel(s.max_v(), shot.max_v()) <= 1e-6, "q={q}");
        prev = s;
    }
}

#[test]
fn profiles_decrease_along_the_radius() {
    for (p, q) in [(2.0, 3.0), (1.0, 32.0)] {
        let s = disk(p, q, 512);
        let slack = 1e-8 * s.max_u().max(s.max_v());
        for f in [&s.u, &s.v] {
            assert!(f.values().windows(2).all(|w| w[1] <= w[0] + slack));
        }
    }
}

#[test]
fn shooting_samples_satisfy_the_integral_identity() {
    let e = pair(1.0, 2.0);
    let g = RadialGrid::new(1.0, 4096).unwrap();
    let s = solve_shooting_on(e, g, 1e-10).unwrap();
    assert!(pohozaev_residual(&s).unwrap() <= 1e-4);
}

#[test]
fn cold_newton_from_the_eigenfunction_converges() {
    let g = RadialGrid::new(1.0, 256).unwrap();
    let s = solve_newton(pair(2.0, 5.0), g, &RadialSolveConfig::default()).unwrap();
    assert!(s.converged && s.residual_norm <= s.tolerance);
    assert!(s.u.values().iter().all(|&x| x >= 0.0));
    assert_eq!(*s.u.values().last().unwrap(), 0.0);
}
