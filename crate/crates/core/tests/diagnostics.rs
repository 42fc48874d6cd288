mod common;

use std::f64::consts::PI;

use common::disk;
use lesys::diagnostics::*;
use lesys::quadrature::integrate_map;
use lesys::{
    evaluate, first_dirichlet_eigenpair, DiagnosticsOptions, DomainSpec, Field, Grid, RadialGrid,
    SolutionPair,
};

fn eigen(s: &SolutionPair) -> lesys::Eigenpair {
    first_dirichlet_eigenpair(s.grid().domain(), s.grid()).unwrap()
}

#[test]
fn energy_identity_at_second_order() {
    let a = energy_identity(&disk(2.0, 2.0, 512)).unwrap();
    let b = energy_identity(&disk(2.0, 2.0, 1024)).unwrap();
    assert!(b.0 <= 1e-4 && b.1 <= 1e-4);
    assert!((a.0 / b.0 - 4.0).abs() < 0.5, "{:e} {:e}", a.0, b.0);
}

#[test]
fn equal_exponents_give_equal_energy_residuals() {
    let (a, b) = energy_identity(&disk(3.0, 3.0, 512)).unwrap();
    assert!((a - b).abs() <= 1e-12);
}

#[test]
fn pohozaev_holds_on_the_disk() {
    assert!(pohozaev_residual(&disk(1.0, 8.0, 1024)).unwrap() <= 1e-4);
}

#[test]
fn flux_identity_for_a_manufactured_pair() {
    // u = 1 − r², −Δu = 4; the flux of u must match ∫4 = 4π
    let g = Grid::Radial(RadialGrid::new(1.0, 1024).unwrap());
    let u = Field::from_fn(g, |x, y| 1.0 - x * x - y * y).unwrap();
    let flux = -lesys::normal_derivative(&u).unwrap().integral();
    assert!((flux - 4.0 * PI).abs() <= 1e-4 * 4.0 * PI);
}

#[test]
fn flux_identity_for_a_solution() {
    let (a, b) = flux_identity(&disk(1.0, 64.0, 2048)).unwrap();
    assert!(a <= 1e-4 && b <= 1e-4, "{a:e} {b:e}");
}

#[test]
fn green_representation_at_the_center() {
    let (a, b) = green_center_check(&disk(1.0, 128.0, 2048)).unwrap();
    assert!(a <= 1e-3 && b <= 1e-3, "{a:e} {b:e}");
}

#[test]
fn eigen_moments_and_jensen() {
    let s = disk(2.0, 3.0, 1024);
    let m = eigen_moments(&s, &eigen(&s)).unwrap();
    assert!(m.residuals.0 <= 1e-3 && m.residuals.1 <= 1e-3);
    assert!(m.jensen_gaps.0 >= -1e-10 && m.jensen_gaps.1 >= -1e-10);
    assert!(m.u_phi <= m.u_phi_bound);
}

#[test]
fn comparison_margins_are_nonnegative() {
    for (q, n) in [(4.0, 512), (256.0, 2048)] {
        let c = comparison_bounds(&disk(1.0, q, n));
        assert!(c.pass, "{q}: {:?}", c.margins);
        assert_eq!(c.c0, 1.0);
    }
}

#[test]
fn brezis_merle_bound_holds() {
    let s = disk(1.0, 512.0, 2048);
    let bm = brezis_merle_check(&s, 2.0 * PI).unwrap();
    assert!((bm.bound - 8.0 * PI).abs() < 1e-12);
    assert!(bm.pass, "{}", bm.value);
    assert!(brezis_merle_check(&s, 4.0 * PI).is_err());
}

#[test]
fn mass_concentrates_for_large_q() {
    let s = disk(1.0, 1024.0, 2048);
    let c_floor = integrate_map(&s.u, |x| x.powf(1024.0));
    let mc = mass_concentration(&s, c_floor);
    assert!(mc.pass, "{} vs {}", mc.value, c_floor);
    assert!(mc.complement <= (-mc.level_l).exp() * PI);
}

#[test]
fn center_curvature_matches_the_equation() {
    let s = disk(2.0, 2.0, 1024);
    let h = harnack_decay(&s, 0.5).unwrap();
    assert!((h.u_limit - 0.25).abs() <= 0.01 * 0.25, "{}", h.u_limit);
    assert!((h.v_limit - 0.25).abs() <= 0.01 * 0.25, "{}", h.v_limit);
}

#[test]
fn pointwise_floor_radius_is_comparable() {
    let f = pointwise_floor(&disk(2.0, 2.0, 1024)).unwrap();
    assert!(f.ratio > 0.0 && f.ratio.is_finite());
}

#[test]
fn lower_bound_holds_for_p_one() {
    for q in [4.0, 64.0] {
        let s = disk(1.0, q, 1024);
        assert!(asymptotic_inequalities(&s, &eigen(&s)).lower_bound, "q={q}");
    }
}

#[test]
fn full_report_passes_on_a_resolved_solution() {
    let s = disk(2.0, 3.0, 1024);
    let r = evaluate(&s, &eigen(&s), &DiagnosticsOptions::default()).unwrap();
    assert!(r.passes(), "{:#?}", r.checks());
    assert!(r.resolved && r.converged);
}

#[test]
fn trivial_pair_is_rejected() {
    let g = Grid::Radial(RadialGrid::new(1.0, 64).unwrap());
    let s = SolutionPair {
        exponents: common::pair(2.0, 2.0),
        u: Field::zeros(g),
        v: Field::zeros(g),
        residual_norm: 0.0,
        tolerance: 1e-10,
        newton_iterations: 0,
        converged: true,
    };
    let ep = first_dirichlet_eigenpair(DomainSpec::unit_disk(), &g).unwrap();
    assert!(evaluate(&s, &ep, &DiagnosticsOptions::default()).is_err());
}
