use conelab_core::field::{h_l_jacobian, total_energy, MapField};
use conelab_core::geometry::{
    round_cone_metric, unwedge, wedge, weighted_b_norm, BGrid, ConeAngle, DomainMetric, Field, WeightedNormSpec,
};
use conelab_core::linearization::{indicial_polynomial, indicial_roots};
use conelab_core::spectral::{analyze_boundary, BoundaryTrace, TwistedSeries};
use conelab_core::Complex64 as C64;
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

fn field(grid: BGrid, coeffs: Vec<C64>) -> Field<C64> {
    Field::from_fn(&grid, |i, k| {
        let z = grid.z(i, k);
        coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| c * z.powi(m as i32 + 1) + c.conj() * z.conj().powi(m as i32 % 3 + 1) * 0.3)
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_round_trip(alpha in 0.05f64..0.95, r in 1e-3f64..10.0, th in 0.0f64..6.28) {
        let a = ConeAngle::new(alpha).unwrap();
        let z = C64::from_polar(r, th);
        let back = unwedge(a, wedge(a, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() < 1e-12 * r.max(1.0));
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive(
        c in -1.0f64..2.0, k in 0u8..3, s in c64(),
        f in prop::collection::vec(c64(), 3), g in prop::collection::vec(c64(), 3),
    ) {
        let grid = BGrid::new(-2.0, 33, 16).unwrap();
        let spec = WeightedNormSpec::new(c, k, Some(0.5));
        let (f, g) = (field(grid, f), field(grid, g));
        let nf = weighted_b_norm(&grid, &f, &spec);
        let ng = weighted_b_norm(&grid, &g, &spec);
        let scaled = weighted_b_norm(&grid, &f.map(|v| v * s), &spec);
        prop_assert!((scaled - s.norm() * nf).abs() <= 1e-10 * (1.0 + nf));
        let sum = weighted_b_norm(&grid, &f.zip_map(&g, |a, b| a + b), &spec);
        prop_assert!(sum <= nf + ng + 1e-10 * (1.0 + nf + ng));
    }

    #[test]
    fn analysis_inverts_synthesis(alpha in 0.1f64..0.9, coeffs in prop::collection::vec(c64(), 9)) {
        let a = ConeAngle::new(alpha).unwrap();
        let pairs: Vec<(i32, C64)> = coeffs.iter().enumerate().map(|(m, &c)| {
            let j = m as i32 - 4;
            (j, if j == 0 { C64::new(1.0, 0.0) + 0.1 * c } else { 0.05 * c })
        }).collect();
        let s = TwistedSeries::with_coeffs(a, 8, &pairs).unwrap();
        let back = analyze_boundary(&BoundaryTrace::from_series(&s, 64), 8, 1e-8).unwrap().series;
        for j in -8..=8 {
            prop_assert!((back.coeff(j) - s.coeff(j)).norm() < 1e-12);
        }
    }

    #[test]
    fn energy_is_rotation_equivariant(shift in 0usize..16, coeffs in prop::collection::vec(c64(), 2), gamma in 0.0f64..6.28) {
        let grid = BGrid::new(-2.0, 33, 16).unwrap();
        let t = round_cone_metric(ConeAngle::new(0.4).unwrap());
        let base = field(grid, coeffs.iter().map(|c| 0.05 * c).collect());
        let u = Field::from_fn(&grid, |i, k| grid.z(i, k) + base[(i, k)]);
        let rot = Field::from_fn(&grid, |i, k| C64::from_polar(1.0, gamma) * u[(i, (k + shift) % 16)]);
        let e0 = total_energy(&MapField::new(grid, u, t.clone(), DomainMetric::Flat).unwrap(), grid.r_min()).unwrap();
        let e1 = total_energy(&MapField::new(grid, rot, t, DomainMetric::Flat).unwrap(), grid.r_min()).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-12 * e0);
    }

    #[test]
    fn density_and_jacobian_decompose(coeffs in prop::collection::vec(c64(), 3)) {
        let grid = BGrid::new(-2.0, 17, 16).unwrap();
        let t = round_cone_metric(ConeAngle::new(0.3).unwrap());
        let base = field(grid, coeffs.iter().map(|c| 0.1 * c).collect());
        let u = MapField::new(grid, Field::from_fn(&grid, |i, k| grid.z(i, k) + base[(i, k)]), t, DomainMetric::Flat).unwrap();
        let d = h_l_jacobian(&u).unwrap();
        for ((h, l), (j, e)) in d.h.as_slice().iter().zip(d.l.as_slice()).zip(d.jac.as_slice().iter().zip(d.e.as_slice())) {
            prop_assert!((h + l - e).abs() <= 4.0 * f64::EPSILON * e.abs());
            prop_assert!((h - l - j).abs() <= 4.0 * f64::EPSILON * e.abs());
        }
    }

    #[test]
    fn indicial_roots_satisfy_vieta(alpha in 0.01f64..0.99, j in -20i32..20) {
        let p = indicial_polynomial(ConeAngle::new(alpha).unwrap(), j);
        let (s1, s2) = p.roots;
        let [_, b, c] = p.coefficients;
        prop_assert!((s1 + s2 + b).abs() < 1e-14 * (1.0 + b.abs()));
        prop_assert!((s1 * s2 - c).abs() < 1e-14 * (1.0 + c.abs()));
        prop_assert!(p.is_simple());
    }

    #[test]
    fn root_table_is_the_sorted_union(alpha in 0.01f64..0.99, window in 2u32..6) {
        let d = indicial_roots(ConeAngle::new(alpha).unwrap(), window);
        prop_assert_eq!(d.roots.len(), 2 * (2 * window as usize + 1));
        prop_assert!(d.roots.windows(2).all(|w| w[0] <= w[1]));
        for p in &d.per_mode {
            prop_assert!(p.eval(p.roots.0).abs() < 1e-12 && p.eval(p.roots.1).abs() < 1e-12);
        }
    }
}
