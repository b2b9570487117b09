mod common;

use catenoid::geometry::{ball_integral, principal_curvatures, shape_tensor, sphere_area};
use catenoid::{build_profile, embed, make_spec, max_axis_height};
use proptest::prelude::*;

use common::{axis_height, axis_height_n3, rel, unit_sphere_area};

#[test]
fn quadrature_oracles_agree() {
    assert!((axis_height(3, 1.0) - axis_height_n3(1.0)).abs() < 1e-13);
    assert!((axis_height_n3(1.0) - 1.3110287771).abs() < 1e-10);
}

#[test]
fn axis_height_matches_oracle() {
    for n in 3..=7 {
        for phi0 in [0.5, 1.0, 3.0] {
            let spec = make_spec(n, phi0).unwrap();
            let s = max_axis_height(&spec, 1e-12).unwrap();
            let oracle = axis_height(n, phi0);
            assert!(rel(s, oracle) < 1e-10, "n={n} phi0={phi0}: {s} vs {oracle}");
        }
    }
}

#[test]
fn profile_is_symmetric_and_monotone() {
    let spec = make_spec(4, 1.0).unwrap();
    let profile = build_profile(&spec, 6.0, 1e-9).unwrap();
    let pts = profile.points();
    for w in pts.windows(2) {
        assert!(w[1].s > w[0].s);
        assert!(w[1].phi >= w[0].phi);
    }
    for r in [0.25, 1.5, 5.0] {
        let a = spec.point_at(r).unwrap();
        let b = spec.point_at(-r).unwrap();
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.s, -b.s);
        assert_eq!(a.dphi_ds, -b.dphi_ds);
    }
    assert!(spec.point_at(5.0).unwrap().s < spec.max_height());
}

#[test]
fn embedding_normal_is_orthogonal_to_tangents() {
    let spec = make_spec(3, 1.0).unwrap();
    let omega = [0.6, 0.0, 0.8];
    // a tangent direction of the sphere at omega
    let tau = [0.8, 0.0, -0.6];
    let h = 1e-5;
    for r in [-2.0, 0.0, 0.7, 3.0] {
        let p = spec.point_at(r).unwrap();
        let (x, nu) = embed(&spec, &p, &omega).unwrap();
        assert!((nu.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
        let xp = embed(&spec, &spec.point_at(r + h).unwrap(), &omega).unwrap().0;
        let xm = embed(&spec, &spec.point_at(r - h).unwrap(), &omega).unwrap().0;
        let meridian: Vec<f64> = xp.iter().zip(&xm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let speed = meridian.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((speed - 1.0).abs() < 1e-8, "meridian is not unit speed: {speed}");
        let dot: f64 = meridian.iter().zip(&nu).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-8);
        let rotated: Vec<f64> = omega.iter().zip(&tau).map(|(o, t)| (o + h * t) / (1.0 + h * h).sqrt()).collect();
        let xr = embed(&spec, &p, &rotated).unwrap().0;
        let dot: f64 = xr.iter().zip(&x).zip(&nu).map(|((a, b), c)| (a - b) * c).sum();
        assert!(dot.abs() < 1e-9);
    }
    assert!(embed(&spec, &spec.point_at(0.0).unwrap(), &[1.0, 1.0, 0.0]).is_err());
}

#[test]
fn shape_tensor_matches_differentiated_curvatures() {
    for n in [3, 4, 6] {
        let spec = make_spec(n, 1.3).unwrap();
        let h = 1e-4;
        for r in [-1.5, 0.2, 2.5] {
            let lam = |r: f64| principal_curvatures(&spec, &spec.point_at(r).unwrap());
            let (p, m) = (lam(r + h), lam(r - h));
            let d_rad = (p.lambda_rad - m.lambda_rad) / (2.0 * h);
            let d_sph = (p.lambda_sph - m.lambda_sph) / (2.0 * h);
            let t = shape_tensor(&spec, &spec.point_at(r).unwrap());
            assert!(rel(t.get(0, 0, 0), d_rad) < 1e-6, "n={n} r={r}");
            for i in 1..n {
                assert!(rel(t.get(i, i, 0), d_sph) < 1e-6);
                assert_eq!(t.get(i, i, 0), t.get(0, i, i));
            }
            assert!(t.admissibility_defect() < 1e-12);
        }
    }
}

#[test]
fn sphere_areas() {
    assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    for d in 2..12 {
        assert!(rel(sphere_area(d), unit_sphere_area(d)) < 1e-13, "d={d}");
    }
}

#[test]
fn ball_integral_is_additive_and_converges() {
    let spec = make_spec(3, 1.0).unwrap();
    let whole = ball_integral(&spec, 2.0, 0.0, f64::INFINITY, 1e-11).unwrap().value;
    let a = ball_integral(&spec, 2.0, 0.0, 3.0, 1e-11).unwrap().value;
    let b = ball_integral(&spec, 2.0, 3.0, 50.0, 1e-11).unwrap().value;
    let c = ball_integral(&spec, 2.0, 50.0, f64::INFINITY, 1e-11).unwrap().value;
    assert!(rel(a + b + c, whole) < 1e-9);
    let mut last = 0.0;
    for r in [1.0, 4.0, 16.0, 64.0] {
        let v = ball_integral(&spec, 2.0, 0.0, r, 1e-11).unwrap().value;
        assert!(v > last && v < whole);
        last = v;
    }
    assert!(ball_integral(&spec, 2.0, 2.0, 1.0, 1e-10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn first_integral_holds_everywhere(n in 3usize..8, phi0 in 0.2f64..5.0, frac in -1.0f64..1.0) {
        let spec = make_spec(n, phi0).unwrap();
        let r = frac * 20.0 * phi0;
        let p = spec.point_at(r).unwrap();
        prop_assert!(p.phi >= phi0);
        prop_assert!(p.satisfies_invariants(&spec, 1e-9));
    }

    #[test]
    fn scaling_covariance(n in 3usize..7, c in 0.3f64..4.0, r in -6.0f64..6.0) {
        let one = make_spec(n, 1.0).unwrap();
        let scaled = make_spec(n, c).unwrap();
        let p = one.point_at(r).unwrap();
        let q = scaled.point_at(c * r).unwrap();
        prop_assert!(rel(q.phi, c * p.phi) < 1e-10);
        prop_assert!((q.s - c * p.s).abs() < 1e-10 * c * (1.0 + p.s.abs()));
        let a = principal_curvatures(&one, &p).norm_a2;
        let b = principal_curvatures(&scaled, &q).norm_a2;
        prop_assert!(rel(b * c * c, a) < 1e-9);
    }

    #[test]
    fn minimal_with_closed_form_norm(n in 3usize..8, r in -12.0f64..12.0) {
        let spec = make_spec(n, 1.0).unwrap();
        let p = spec.point_at(r).unwrap();
        let f = principal_curvatures(&spec, &p);
        prop_assert!(f.trace(n).abs() <= 1e-10 * f.norm_a2.sqrt());
        let closed = (n * (n - 1)) as f64 / p.phi.powi(2 * n as i32);
        prop_assert!(rel(f.norm_a2, closed) < 1e-10);
    }
}
