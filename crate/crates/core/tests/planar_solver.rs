mod common;

use common::{pair, rel};
use lesys::diagnostics::energy_identity;
use lesys::radial::solve_with_continuation;
use lesys::{
    solve_planar, DomainSpec, PlanarGrid, PlanarSolveConfig, RadialGrid, RadialSolveConfig,
};

fn square(p: f64, q: f64, n: usize) -> lesys::SolutionPair {
    let g = PlanarGrid::new(DomainSpec::unit_square(), n, n).unwrap();
    solve_planar(pair(p, q), g, &PlanarSolveConfig::default()).unwrap()
}

#[test]
fn square_maximum_sits_at_the_center() {
    let s = square(2.0, 3.0, 63);
    let g = *s.grid().as_planar().unwrap();
    assert_eq!(s.u.argmax(), g.index(31, 31));
    assert_eq!(s.v.argmax(), g.index(31, 31));
}

#[test]
fn energy_identity_error_shrinks_at_second_order() {
    let coarse = energy_identity(&square(2.0, 3.0, 63)).unwrap();
    let fine = energy_identity(&square(2.0, 3.0, 127)).unwrap();
    for (c, f) in [(coarse.0, fine.0), (coarse.1, fine.1)] {
        let ratio = c / f;
        assert!(ratio > 3.0 && ratio < 5.0, "{c:e} {f:e}");
    }
    assert!(fine.0.max(fine.1) < 1e-3);
}

#[test]
fn square_and_equal_area_disk_have_close_maxima() {
    let s = square(1.0, 16.0, 255);
    let r = 1.0 / std::f64::consts::PI.sqrt();
    let g = RadialGrid::new(r, 2048).unwrap();
    let d = solve_with_continuation(pair(1.0, 16.0), g, &RadialSolveConfig::default()).unwrap();
    assert!(
        rel(s.max_u(), d.max_u()) <= 0.2,
        "{} {}",
        s.max_u(),
        d.max_u()
    );
}

#[test]
fn oblong_rectangle_solution_is_positive() {
    let g = PlanarGrid::new(DomainSpec::rectangle(2.0, 1.0).unwrap(), 63, 31).unwrap();
    let s = solve_planar(pair(1.0, 4.0), g, &PlanarSolveConfig::default()).unwrap();
    assert!(s.converged);
    assert!(s.u.values().iter().all(|&x| x > 0.0));
    assert!(s.v.values().iter().all(|&x| x > 0.0));
}
