use conelab_core::field::{contour_residue, hopf_with, MapField};
use conelab_core::geometry::{round_cone_metric, BGrid, ConeAngle, DomainMetric};
use conelab_core::linearization::indicial_roots;
use conelab_core::spectral::{pi_cone_residue, recentre, residue_from_series, synthesize_polar, PiConeLift, TwistedSeries};
use conelab_core::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn third() -> ConeAngle {
    ConeAngle::new(1.0 / 3.0).unwrap()
}

#[test]
fn residue_of_single_conjugate_mode() {
    let s = TwistedSeries::with_coeffs(third(), 8, &[(0, C64::new(1.0, 0.0)), (-1, C64::new(0.1, 0.0))]).unwrap();
    let r = residue_from_series(&s);
    assert!((r - C64::new(0.2, 0.0)).norm() < 1e-14);
}

#[test]
fn root_table_at_three_quarters() {
    let d = indicial_roots(ConeAngle::new(0.75).unwrap(), 2);
    let want = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5];
    assert_eq!(d.roots.len(), want.len());
    for (a, b) in d.roots.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn pi_cone_examples() {
    let r = pi_cone_residue(&PiConeLift { a: C64::new(1.0, 0.0), b: C64::new(0.1, 0.0), v: vec![] });
    assert!((r.residue - C64::new(0.025, 0.0)).norm() < 1e-15);
    assert!(r.orientation_preserving);
    let r = pi_cone_residue(&PiConeLift { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0), v: vec![C64::new(0.3, 0.0)] });
    assert_eq!(r.residue, C64::new(0.0, 0.0));
}

#[test]
fn energy_derivative_under_recentring() {
    let s = TwistedSeries::with_coeffs(third(), 16, &[(0, C64::new(1.0, 0.0)), (-1, C64::new(0.1, 0.0))]).unwrap();
    let h = 1e-4;
    for d in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.6, -0.8)] {
        let ep = recentre(&s, d * h, 16, 256).unwrap().energy();
        let em = recentre(&s, -d * h, 16, 256).unwrap().energy();
        let fd = (ep - em) / (2.0 * h);
        let want = TAU * (d * residue_from_series(&s)).re;
        assert!((fd - want).abs() < 1e-6, "d = {d}: {fd} vs {want}");
    }
}

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_by_the_cone_angle_is_exact(
        alpha in 0.1f64..0.9,
        coeffs in prop::collection::vec(c64(), 5),
        rho in 0.05f64..1.0,
        phi in 0.0f64..6.0,
    ) {
        let a = ConeAngle::new(alpha).unwrap();
        let pairs: Vec<(i32, C64)> = coeffs.iter().enumerate().map(|(m, &c)| (m as i32, c)).collect();
        let s = TwistedSeries::with_coeffs(a, 8, &pairs).unwrap();
        let u = synthesize_polar(&s, rho, phi);
        let v = synthesize_polar(&s, rho, phi + TAU * alpha);
        prop_assert!((v - C64::from_polar(1.0, TAU * alpha) * u).norm() < 1e-12 * (1.0 + u.norm()));
    }

    #[test]
    fn residue_matches_the_contour_integral(
        alpha in prop::sample::select(vec![0.25, 1.0 / 3.0, 0.45]),
        coeffs in prop::collection::vec(c64(), 4),
    ) {
        let a = ConeAngle::new(alpha).unwrap();
        let pairs = [(0, C64::new(1.0, 0.0)), (-1, coeffs[0] * 0.2), (1, coeffs[1] * 0.05), (-2, coeffs[2] * 0.05), (2, coeffs[3] * 0.02)];
        let s = TwistedSeries::with_coeffs(a, 8, &pairs).unwrap();
        let g = BGrid::new(-2.0, 257, 32).unwrap();
        let u = MapField::new(g, s.map_on_grid(&g).unwrap(), round_cone_metric(a), DomainMetric::Flat).unwrap();
        let phi = hopf_with(&u, 0.0).unwrap().phi;
        let cr = contour_residue(&g, &phi, &[0.25, 0.5, 0.75], f64::INFINITY).unwrap();
        let r = residue_from_series(&s);
        prop_assert!((cr.mean - r).norm() < 1e-8 * (1.0 + r.norm()), "{} vs {}", cr.mean, r);
    }
}
