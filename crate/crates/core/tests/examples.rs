//! The planar examples exercised through the public API.

use relfix::gspace::check_limit_uniqueness;
use relfix::picard::uniqueness_via_path;
use relfix::plane::{example1_g, example1_run, example2_run, PlanePoint, SameFirst, ShrinkSecond};

#[test]
fn example1_limits_are_not_separated_by_its_g() {
    let trace = example1_run(1.0, 40).unwrap();
    let origin = PlanePoint::origin();
    let shifted = PlanePoint {
        first: 7.0,
        second: 0.0,
    };
    assert_eq!(
        check_limit_uniqueness(&example1_g(), &trace.iterates, &origin, &origin, 1e-12),
        Ok(true)
    );
    // g ignores the first coordinate, so (7, 0) is an equally good limit and
    // the check cannot tell the two apart.
    assert_eq!(
        check_limit_uniqueness(&example1_g(), &trace.iterates, &origin, &shifted, 1e-12),
        Ok(true)
    );
}

#[test]
fn example_traces_overlay() {
    let a = example1_run(1.0, 30).unwrap();
    let b = example2_run(0.0, 1.0, 30).unwrap();
    assert_eq!(a.residuals, b.residuals);
    for (p, q) in a.iterates.iter().zip(&b.iterates) {
        assert_eq!(p.second, q.second);
    }
    assert_eq!(
        *b.last(),
        PlanePoint {
            first: 0.0,
            second: 4f64.powi(-30)
        }
    );
}

#[test]
fn example1_residual_ratio_is_exact() {
    let trace = example1_run(-2.5, 30).unwrap();
    for w in trace.residuals.windows(2) {
        assert!((w[1] / w[0] - 0.25).abs() <= 1e-14 * 0.25);
    }
}

#[test]
fn example1_fixed_points_on_a_line_are_not_joined() {
    // Every (a, 0) is fixed by S(u, a) = (u, a/4). Two of them with different
    // first coordinates cannot be joined by a path of the relation, so the
    // path argument does not apply.
    let a = PlanePoint {
        first: 0.0,
        second: 0.0,
    };
    let b = PlanePoint {
        first: 1.0,
        second: 0.0,
    };
    assert!(uniqueness_via_path(
        &ShrinkSecond,
        &example1_g(),
        &SameFirst,
        &a,
        &b,
        &[a, b],
        0.25,
        10,
        1e-12
    )
    .is_err());
    let c = PlanePoint {
        first: 0.0,
        second: 0.0,
    };
    let report = uniqueness_via_path(
        &ShrinkSecond,
        &example1_g(),
        &SameFirst,
        &a,
        &c,
        &[a, c],
        0.25,
        10,
        1e-12,
    )
    .unwrap();
    assert!(report.coincide);
}
