use std::f64::consts::PI;

use freebound::exact::{critical_catenoid, equatorial_disk, spherical_cap};
use freebound::geom::{ChartDiff, KillingField};
use freebound::verify::{
    check_v2_identity, killing_zero_search, parse_reports, reports_to_json, run_check, run_suite, CheckKind,
    ReportParseError, VerifyConfig, VerifyError,
};
use freebound::Exec;
use nalgebra::{DMatrix, Rotation3, Vector3};
use proptest::prelude::*;

#[test]
fn cap_control_fails_by_the_expected_amount() {
    // Spherical cap of height h through the equator: radius R = (1+h²)/2h,
    // area 2πRh, boundary 2π.
    let h = 0.5;
    let radius = (1.0 + h * h) / (2.0 * h);
    let expected = (2.0 * 2.0 * PI * radius * h - 2.0 * PI).abs() / (2.0 * PI);
    let cap = spherical_cap(2, h).unwrap();
    let r = run_check(CheckKind::Isoperimetric, &cap, None, &VerifyConfig::default()).unwrap();
    assert!(!r.passed);
    assert!((r.metrics["isoperimetric_residual"] - expected).abs() < 1e-12);
    assert!(r.notes.contains("control"));
}

#[test]
fn gated_checks_refuse_non_minimal_surfaces() {
    let cap = spherical_cap(2, 0.5).unwrap();
    let cfg = VerifyConfig::default();
    for kind in [
        CheckKind::U2,
        CheckKind::Simons,
        CheckKind::QInequality,
        CheckKind::GraphLaplacian,
    ] {
        match run_check(kind, &cap, None, &cfg) {
            Err(VerifyError::PreconditionViolation { check, .. }) => assert_eq!(check, kind.name()),
            other => panic!("{kind}: {other:?}"),
        }
    }
}

#[test]
fn vanishing_killing_field_is_reported() {
    // A rotation about the disk's own normal is tangent: s_V ≡ 0.
    let disk = equatorial_disk(2).unwrap();
    let rz = KillingField::from_name("rz", 3).unwrap();
    let cfg = VerifyConfig::default();
    let r = check_v2_identity(&disk, &rz, &cfg.interior_grid(&disk), &cfg);
    assert!(matches!(r, Err(VerifyError::ZeroGraphQuantity { .. })), "{r:?}");
    for kind in [CheckKind::V2, CheckKind::QInequality] {
        let r = run_check(kind, &disk, Some(&rz), &cfg);
        assert!(
            matches!(r, Err(VerifyError::EmptyGraphicalRegion { .. })),
            "{kind}: {r:?}"
        );
    }
}

#[test]
fn zero_search_locates_the_waist() {
    // s_{e3} = −tanh s vanishes exactly on the waist circle s = 0.
    let cat = critical_catenoid();
    let tz = KillingField::from_name("tz", 3).unwrap();
    let z = killing_zero_search(&cat, &tz, &VerifyConfig::default()).unwrap();
    assert!(!z.zeros.is_empty());
    assert!(z.zeros.iter().all(|p| p[1].abs() < 1e-9), "{:?}", &z.zeros[..3]);
    assert!(z.certified_sign.is_none());

    let disk = equatorial_disk(3).unwrap();
    let tw = KillingField::from_name("tw", 4).unwrap();
    let z = killing_zero_search(&disk, &tw, &VerifyConfig::default()).unwrap();
    assert_eq!(z.certified_sign, Some(1.0));
    assert_eq!(z.min_s_v, 1.0);
}

#[test]
fn sequential_and_parallel_runs_agree_exactly() {
    let cat = critical_catenoid();
    let checks = [
        CheckKind::GraphLaplacian,
        CheckKind::BoundaryRelations,
        CheckKind::Isoperimetric,
    ];
    let cfg = VerifyConfig::default();
    let par: Vec<_> = run_suite(&checks, &cat, None, &cfg.with_exec(Exec::Parallel))
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let seq: Vec<_> = run_suite(&checks, &cat, None, &cfg.with_exec(Exec::Sequential))
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert_eq!(par, seq);
    let names: Vec<_> = par.iter().map(|r| r.check_name.as_str()).collect();
    assert_eq!(names, ["graph-laplacian", "boundary-relations", "isoperimetric"]);
}

#[test]
fn reports_round_trip_through_json() {
    let cat = critical_catenoid();
    let cfg = VerifyConfig::default();
    let reports: Vec<_> = [CheckKind::Isoperimetric, CheckKind::KillingZeros]
        .iter()
        .map(|&k| run_check(k, &cat, None, &cfg).unwrap())
        .collect();
    let json = reports_to_json(&reports);
    assert_eq!(parse_reports(&json).unwrap(), reports);
    let single = serde_json::to_string(&reports[0]).unwrap();
    assert_eq!(parse_reports(&single).unwrap(), reports[..1]);

    let bumped = json.replace("\"report_version\": 1", "\"report_version\": 7");
    assert!(matches!(
        parse_reports(&bumped),
        Err(ReportParseError::Version { found: 7 })
    ));
    let stripped = json.replace("\"report_version\": 1,", "");
    assert!(matches!(
        parse_reports(&stripped),
        Err(ReportParseError::MissingVersion)
    ));
    assert!(matches!(parse_reports("{"), Err(ReportParseError::Json(_))));
}

#[test]
fn check_names_parse() {
    for k in CheckKind::ALL {
        assert_eq!(k.name().parse::<CheckKind>().unwrap(), k);
    }
    assert!(matches!(
        "laplace".parse::<CheckKind>(),
        Err(VerifyError::UnknownCheck(_))
    ));
}

fn rotation(axis: [f64; 3], angle: f64) -> DMatrix<f64> {
    let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(Vector3::from(axis)), angle);
    DMatrix::from_iterator(3, 3, r.matrix().iter().copied())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pointwise_invariants_survive_rotation(
        ax in prop::array::uniform3(-1.0f64..1.0),
        angle in -PI..PI,
        theta in 0.0..2.0 * PI,
        t in -1.0f64..1.0,
    ) {
        prop_assume!(ax.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let cat = critical_catenoid();
        let s = t * cat.domain().axes[1].hi;
        let r = rotation(ax, angle);
        let moved = cat.rotated(&r);
        let a = cat.local(&[theta, s], 2, ChartDiff::Exact).unwrap();
        let b = moved.local(&[theta, s], 2, ChartDiff::Exact).unwrap();
        prop_assert!((a.a_norm_sq() - b.a_norm_sq()).abs() < 1e-12 * a.a_norm_sq().max(1.0));
        prop_assert!((a.support() - b.support()).abs() < 1e-14);
        prop_assert!(b.mean_curvature().abs() < 1e-12);
        let tz = KillingField::from_name("tz", 3).unwrap();
        let w = tz.conjugated(&r);
        let s_a = tz.eval(&a.point).dot(&a.normal);
        let s_b = w.eval(&b.point).dot(&b.normal);
        prop_assert!((s_a - s_b).abs() < 1e-14);
    }
}
