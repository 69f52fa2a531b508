use std::f64::consts::PI;

use approx::assert_relative_eq;
use freebound::exact::export::{sample_grid_csv, triangulate_obj};
use freebound::exact::{
    critical_catenoid, critical_catenoid_parameters, equatorial_disk, rotational_minimal, shoot_waist,
    spherical_cap,
};
use freebound::geom::{boundary_volume, surface_area, ChartDiff, QuadratureRule};
use freebound::mesh::TriMesh;
use freebound::Exec;
use proptest::prelude::*;

/// Root of `s tanh s = 1` by plain Newton from 1.2, and `c = 1/√(cosh² s + s²)`.
fn catenoid_oracle() -> (f64, f64) {
    let mut s: f64 = 1.2;
    for _ in 0..50 {
        let f = s * s.tanh() - 1.0;
        let df = s.tanh() + s / s.cosh().powi(2);
        s -= f / df;
    }
    (s, 1.0 / (s.cosh().powi(2) + s * s).sqrt())
}

/// Profile `r'' = (n-1)(1 + r'^2)/r` from waist `a` by classical RK4 with a
/// fixed step, stopped where `r² + z² = 1` (located by linear interpolation
/// on a fine step). Returns `(z, r, r')` at the crossing.
fn rk4_crossing(n: usize, a: f64) -> (f64, f64, f64) {
    let k = (n - 1) as f64;
    let f = |y: [f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0]];
    let dz = 1e-5;
    let (mut z, mut y) = (0.0, [a, 0.0]);
    loop {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * dz * k1[0], y[1] + 0.5 * dz * k1[1]]);
        let k3 = f([y[0] + 0.5 * dz * k2[0], y[1] + 0.5 * dz * k2[1]]);
        let k4 = f([y[0] + dz * k3[0], y[1] + dz * k3[1]]);
        let next = [
            y[0] + dz / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + dz / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let g0 = y[0] * y[0] + z * z - 1.0;
        let g1 = next[0] * next[0] + (z + dz) * (z + dz) - 1.0;
        if g1 >= 0.0 {
            let t = -g0 / (g1 - g0);
            let lerp = |a: f64, b: f64| a + t * (b - a);
            return (z + t * dz, lerp(y[0], next[0]), lerp(y[1], next[1]));
        }
        z += dz;
        y = next;
    }
}

fn oracle_support(n: usize, a: f64) -> f64 {
    let (z, r, dr) = rk4_crossing(n, a);
    (r - z * dr) / (1.0 + dr * dr).sqrt()
}

/// Waist of the orthogonal profile by bisection on the oracle support.
fn oracle_waist(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = oracle_support(n, lo);
    assert!(s_lo * oracle_support(n, hi) < 0.0, "bracket");
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if (oracle_support(n, mid) > 0.0) == (s_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn catenoid_parameters_match_newton() {
    let (s0, c) = catenoid_oracle();
    let p = critical_catenoid_parameters();
    assert_relative_eq!(p.s0, s0, max_relative = 1e-14);
    assert_relative_eq!(p.c, c, max_relative = 1e-14);
    assert_relative_eq!(p.s0_bisection, s0, max_relative = 1e-14);
    // Closed forms against direct quadrature of the chart.
    let surf = critical_catenoid();
    let quad = QuadratureRule::default();
    assert_relative_eq!(
        surface_area(&surf, &quad).unwrap().value,
        p.area(),
        max_relative = 1e-12
    );
    assert_relative_eq!(
        boundary_volume(&surf, &quad).unwrap().value,
        p.boundary_length(),
        max_relative = 1e-12
    );
    assert_relative_eq!(
        p.boundary_length(),
        4.0 * PI * c * s0.cosh(),
        max_relative = 1e-15
    );
}

#[test]
fn catenoid_pointwise_geometry() {
    let (s0, c) = catenoid_oracle();
    let surf = critical_catenoid();
    for &(theta, s) in &[(0.0, 0.0), (1.0, 0.5), (2.5, -1.0), (4.0, s0), (6.0, -s0)] {
        let g = surf.local(&[theta, s], 2, ChartDiff::Exact).unwrap();
        let x = g.point;
        assert_relative_eq!(x[0].hypot(x[1]), c * f64::cosh(s), max_relative = 1e-14);
        assert_relative_eq!(x[2], c * s, epsilon = 1e-15);
        assert!(g.mean_curvature().abs() < 1e-12);
        assert_relative_eq!(
            g.a_norm_sq(),
            2.0 / (c * c * s.cosh().powi(4)),
            max_relative = 1e-12
        );
        assert_relative_eq!(g.normal[2], -s.tanh(), epsilon = 1e-14);
        assert_relative_eq!(g.support(), c * (1.0 - s * s.tanh()), epsilon = 1e-14);
    }
    // Boundary circles on the sphere, met orthogonally.
    for s in [-s0, s0] {
        let g = surf.local(&[0.7, s], 1, ChartDiff::Exact).unwrap();
        assert_relative_eq!(g.point.norm(), 1.0, epsilon = 1e-14);
        assert!(g.normal.dot(&g.point).abs() < 1e-14);
    }
}

#[test]
fn disks_are_flat_and_sharp_for_the_isoperimetric_equality() {
    let quad = QuadratureRule::default();
    // Unit disk areas and sphere areas: π, 4π/3; 2π, 4π.
    for (n, area, bnd) in [(2, PI, 2.0 * PI), (3, 4.0 * PI / 3.0, 4.0 * PI)] {
        let d = equatorial_disk(n).unwrap();
        assert_relative_eq!(surface_area(&d, &quad).unwrap().value, area, max_relative = 1e-13);
        assert_relative_eq!(
            boundary_volume(&d, &quad).unwrap().value,
            bnd,
            max_relative = 1e-13
        );
        let mut p = vec![0.6; n];
        p[n - 1] = 2.0;
        let g = d.local(&p, 2, ChartDiff::Exact).unwrap();
        assert_eq!(g.point[n], 0.0);
        assert_eq!(g.normal[n], 1.0);
        assert_eq!(g.a_norm_sq(), 0.0);
    }
    assert!(equatorial_disk(1).is_err());
}

#[test]
fn cap_lies_on_its_sphere() {
    for (n, height) in [(2, 0.5), (2, 1.5), (3, 0.3)] {
        let cap = spherical_cap(n, height).unwrap();
        // Sphere through the equator and the apex at the given height.
        let radius = (1.0 + height * height) / (2.0 * height);
        let center = height - radius;
        let mut p = vec![0.4; n];
        p[n - 1] = 1.0;
        let g = cap.local(&p, 2, ChartDiff::Exact).unwrap();
        let mut rel = g.point;
        rel[n] -= center;
        assert_relative_eq!(rel.norm(), radius, max_relative = 1e-14);
        assert_relative_eq!(g.mean_curvature().abs(), n as f64 / radius, max_relative = 1e-12);
        assert_relative_eq!(g.a_norm_sq(), n as f64 / (radius * radius), max_relative = 1e-12);
    }
    assert!(spherical_cap(2, 0.0).is_err());
    assert!(spherical_cap(2, 2.0).is_err());
}

#[test]
fn shooting_matches_an_independent_integrator() {
    let (s0, c) = catenoid_oracle();
    let (a2, crossing2, _) = shoot_waist(2, Exec::default()).unwrap();
    assert!((a2 - c).abs() < 1e-9);
    assert!((crossing2.z - c * s0).abs() < 1e-9);

    let (a3, crossing3, scan) = shoot_waist(3, Exec::default()).unwrap();
    let oracle = oracle_waist(3, a3 - 0.02, a3 + 0.02);
    assert!((a3 - oracle).abs() < 1e-7, "{a3} vs {oracle}");
    let (z, r, _) = rk4_crossing(3, a3);
    assert!((crossing3.z - z).abs() < 1e-7 && (crossing3.r - r).abs() < 1e-7);
    assert!(crossing3.support.abs() < 1e-9);
    assert!(!scan.samples.is_empty());
    // The same for every scan engine.
    assert_eq!(shoot_waist(3, Exec::Sequential).unwrap().0, a3);
}

#[test]
fn rotational_surface_follows_its_profile() {
    let surf = rotational_minimal(3).unwrap();
    let (a, crossing, _) = shoot_waist(3, Exec::default()).unwrap();
    assert_eq!(surf.ambient_dim(), 4);
    // Profile radius at a few heights against the oracle integrator, which
    // runs to the crossing and reports `r` there.
    let z_b = surf.domain().axes[2].hi;
    assert!((z_b - crossing.z).abs() < 1e-12);
    let g = surf.local(&[1.0, 2.0, 0.0], 2, ChartDiff::Exact).unwrap();
    assert_relative_eq!(g.point.norm(), a, max_relative = 1e-12);
    assert!(g.mean_curvature().abs() < 1e-10);
    let edge = surf.local(&[0.8, 0.3, z_b], 1, ChartDiff::Exact).unwrap();
    assert_relative_eq!(edge.point.norm(), 1.0, epsilon = 1e-10);
    assert!(edge.normal.dot(&edge.point).abs() < 1e-9);
    for z in [0.2 * z_b, 0.6 * z_b, -0.9 * z_b] {
        let g = surf.local(&[1.1, 0.4, z], 2, ChartDiff::Exact).unwrap();
        let r = (0..3).map(|i| g.point[i] * g.point[i]).sum::<f64>().sqrt();
        let oracle = profile_at(3, a, z.abs());
        assert!((r - oracle).abs() < 1e-8, "z={z}: {r} vs {oracle}");
        assert!(g.mean_curvature().abs() < 1e-9, "H = {}", g.mean_curvature());
    }
}

/// `r(z)` of the profile from waist `a`, by the same RK4 as the oracle.
fn profile_at(n: usize, a: f64, z_end: f64) -> f64 {
    let k = (n - 1) as f64;
    let f = |y: [f64; 2]| [y[1], k * (1.0 + y[1] * y[1]) / y[0]];
    let steps = 20_000;
    let dz = z_end / steps as f64;
    let mut y = [a, 0.0];
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * dz * k1[0], y[1] + 0.5 * dz * k1[1]]);
        let k3 = f([y[0] + 0.5 * dz * k2[0], y[1] + 0.5 * dz * k2[1]]);
        let k4 = f([y[0] + dz * k3[0], y[1] + dz * k3[1]]);
        for i in 0..2 {
            y[i] += dz / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y[0]
}

#[test]
fn exports_sample_and_triangulate() {
    let surf = critical_catenoid();
    let csv = sample_grid_csv(&surf, 8);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "p1,p2,x1,x2,x3,nu1,nu2,nu3");
    assert_eq!(lines.count(), 64);

    let mesh = TriMesh::from_obj(&triangulate_obj(&surf, 48).unwrap()).unwrap();
    assert_eq!(mesh.euler_characteristic(), 0);
    assert_eq!(mesh.boundary_loops().len(), 2);
    let area = critical_catenoid_parameters().area();
    assert!((mesh.area() - area).abs() / area < 5e-3);
    assert!(mesh.boundary_sphere_residual() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catenoid_chart_is_minimal_everywhere(theta in 0.0..2.0 * PI, t in -1.0f64..1.0) {
        let (s0, c) = catenoid_oracle();
        let surf = critical_catenoid();
        let s = t * s0;
        let g = surf.local(&[theta, s], 2, ChartDiff::Exact).unwrap();
        prop_assert!(g.mean_curvature().abs() < 1e-12);
        prop_assert!((g.normal.norm() - 1.0).abs() < 1e-15);
        for tangent in &g.tangents {
            prop_assert!(g.normal.dot(tangent).abs() < 1e-14);
        }
        prop_assert!(g.point.norm() <= 1.0 + 1e-15);
        prop_assert!((g.point[0].hypot(g.point[1]) - c * s.cosh()).abs() < 1e-14);
    }
}
