//! Two planar examples where the unrestricted contraction principle does not
//! apply but the relation-restricted one does.
//!
//! Both use the relation "first coordinates are equal" and converge to
//! `(0, 0)`:
//!
//! * example 1: `g = v1 - v2` (ignores the first coordinate, so (g1) fails
//!   globally) with `S(u, a) = (u, a / 4)`;
//! * example 2: `g = |u1 - u2| + |a1 - a2|` with `S(u, a) = (u² / 4, a / 4)`,
//!   which is not a contraction on unrelated pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gspace::{halton_box, DomainMode, GFunctional};
use crate::picard::{iterate, IterationTrace, PicardError, StoppingPolicy};
use crate::relation::{Relation, SelfMap};

/// Start points with `|u0|` at or above this leave the first coordinate's
/// basin of `u -> u² / 4`.
pub const EXAMPLE2_BASIN: f64 = 4.0;

#[derive(Debug, Error, PartialEq)]
pub enum PlaneError {
    #[error("start first coordinate {0} outside the basin |u0| < 4")]
    OutsideBasin(f64),
    #[error("scale {0} must be at least 2")]
    Scale(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error(transparent)]
    Picard(#[from] PicardError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub first: f64,
    pub second: f64,
}

impl PlanePoint {
    pub fn new(first: f64, second: f64) -> Result<Self, PlaneError> {
        if first.is_finite() && second.is_finite() {
            Ok(Self { first, second })
        } else {
            Err(PlaneError::NonFinite)
        }
    }

    pub const fn origin() -> Self {
        Self {
            first: 0.0,
            second: 0.0,
        }
    }
}

/// `(p, q)` related iff `p.first == q.first`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SameFirst;

impl Relation<PlanePoint> for SameFirst {
    fn contains(&self, a: &PlanePoint, b: &PlanePoint) -> bool {
        a.first == b.first
    }
}

/// `g(p, q) = p.second - q.second`.
#[derive(Debug, Clone, Copy)]
pub struct SecondDiff {
    pub mode: DomainMode,
}

impl GFunctional<PlanePoint> for SecondDiff {
    fn eval(&self, a: &PlanePoint, b: &PlanePoint) -> f64 {
        a.second - b.second
    }

    fn mode(&self) -> DomainMode {
        self.mode
    }
}

/// `g(p, q) = |Δfirst| + |Δsecond|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TaxicabG;

impl GFunctional<PlanePoint> for TaxicabG {
    fn eval(&self, a: &PlanePoint, b: &PlanePoint) -> f64 {
        (a.first - b.first).abs() + (a.second - b.second).abs()
    }
}

/// `S(u, a) = (u, a / 4)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShrinkSecond;

impl SelfMap<PlanePoint> for ShrinkSecond {
    fn apply(&self, p: &PlanePoint) -> PlanePoint {
        PlanePoint {
            first: p.first,
            second: p.second / 4.0,
        }
    }
}

/// `S(u, a) = (u² / 4, a / 4)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquareShrink;

impl SelfMap<PlanePoint> for SquareShrink {
    fn apply(&self, p: &PlanePoint) -> PlanePoint {
        PlanePoint {
            first: p.first * p.first / 4.0,
            second: p.second / 4.0,
        }
    }
}

pub fn example1_g() -> SecondDiff {
    SecondDiff {
        mode: DomainMode::Global,
    }
}

/// `n` Picard steps of example 1 from `(0, y0)`.
pub fn example1_run(y0: f64, n: usize) -> Result<IterationTrace<PlanePoint>, PlaneError> {
    let start = PlanePoint::new(0.0, y0)?;
    Ok(iterate(
        &ShrinkSecond,
        &example1_g(),
        &SameFirst,
        start,
        StoppingPolicy::fixed_steps(n),
    )?)
}

/// Two distinct points on which example 1's `g` vanishes.
pub fn example1_g1_violation_witness() -> (PlanePoint, PlanePoint) {
    (
        PlanePoint {
            first: 1.0,
            second: 5.0,
        },
        PlanePoint {
            first: 2.0,
            second: 5.0,
        },
    )
}

/// `n` Picard steps of example 2 from `(u0, y0)`, `|u0| < 4`.
pub fn example2_run(u0: f64, y0: f64, n: usize) -> Result<IterationTrace<PlanePoint>, PlaneError> {
    if !(u0.abs() < EXAMPLE2_BASIN) {
        return Err(PlaneError::OutsideBasin(u0));
    }
    let start = PlanePoint::new(u0, y0)?;
    Ok(iterate(
        &SquareShrink,
        &TaxicabG,
        &SameFirst,
        start,
        StoppingPolicy::fixed_steps(n),
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonContraction {
    pub u: PlanePoint,
    pub v: PlanePoint,
    /// `|g(S u, S v)| / |g(u, v)| = (2 scale + 1) / 4`.
    pub ratio: f64,
}

/// Unrelated points `(scale, 0)` and `(scale + 1, 0)` whose example-2 image
/// is farther apart than they are.
pub fn example2_noncontraction_witness(scale: f64) -> Result<NonContraction, PlaneError> {
    if !(scale >= 2.0) || !scale.is_finite() {
        return Err(PlaneError::Scale(scale));
    }
    let u = PlanePoint {
        first: scale,
        second: 0.0,
    };
    let v = PlanePoint {
        first: scale + 1.0,
        second: 0.0,
    };
    let ratio =
        TaxicabG.abs(&SquareShrink.apply(&u), &SquareShrink.apply(&v)) / TaxicabG.abs(&u, &v);
    Ok(NonContraction { u, v, ratio })
}

/// `count` related pairs `((a, y1), (a, y2))` from a 3-D Halton sequence on
/// `[-3, 3]³`.
pub fn related_pair_samples(count: usize) -> Vec<(PlanePoint, PlanePoint)> {
    halton_box([-3.0; 3], [3.0; 3], count)
        .into_iter()
        .map(|[a, y1, y2]| {
            (
                PlanePoint {
                    first: a,
                    second: y1,
                },
                PlanePoint {
                    first: a,
                    second: y2,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspace::{estimate_contraction_factor, verify_g_properties, DEFAULT_ZERO_TOL};
    use crate::relation::Universal;

    fn p(a: f64, b: f64) -> PlanePoint {
        PlanePoint {
            first: a,
            second: b,
        }
    }

    #[test]
    fn example1_closed_form() {
        let trace = example1_run(1.0, 10).unwrap();
        assert_eq!(trace.steps(), 10);
        assert_eq!(trace.last().second, 4f64.powi(-10));
        assert_eq!(*trace.last(), p(0.0, 9.5367431640625e-7));
        assert!(trace.preserved && trace.certified);
        for (k, r) in trace.residuals.iter().enumerate() {
            assert_eq!(*r, 3.0 * 4f64.powi(-(k as i32 + 1)));
        }
    }

    #[test]
    fn example1_from_fixed_point() {
        let trace = example1_run(0.0, 10).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.residuals, vec![0.0]);
        assert_eq!(*trace.last(), PlanePoint::origin());
    }

    #[test]
    fn g1_witnesses_round_trip_through_axiom_scan() {
        let (a, b) = example1_g1_violation_witness();
        assert_ne!(a, b);
        assert_eq!(example1_g().eval(&a, &b), 0.0);
        let rep =
            verify_g_properties(&example1_g(), &SameFirst, &[a, b], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(rep.g1_witness, Some((a, b)));
        assert_eq!(example1_g().eval(&p(0.0, 0.0), &p(3.0, 0.0)), 0.0);
    }

    #[test]
    fn example2_orbits() {
        let trace = example2_run(0.0, 1.0, 10).unwrap();
        assert_eq!(trace.last().second, 4f64.powi(-10));
        let firsts: Vec<f64> = example2_run(2.0, 1.0, 4)
            .unwrap()
            .iterates
            .iter()
            .map(|q| q.first)
            .collect();
        assert_eq!(firsts, vec![2.0, 1.0, 0.25, 1.0 / 64.0, 1.0 / 16384.0]);
        assert_eq!(
            example2_run(4.0, 1.0, 3),
            Err(PlaneError::OutsideBasin(4.0))
        );
        // (2, 1) is not in the seed set: S(2, 1) = (1, 1/4) changes the first coordinate.
        assert!(!example2_run(2.0, 1.0, 2).unwrap().certified);
    }

    #[test]
    fn noncontraction_witness_values() {
        let w = example2_noncontraction_witness(10.0).unwrap();
        assert_eq!(w.ratio, 5.25);
        assert!(!SameFirst.contains(&w.u, &w.v));
        assert_eq!(example2_noncontraction_witness(2.0).unwrap().ratio, 1.25);
        assert!(example2_noncontraction_witness(1.5).is_err());
        let ratios: Vec<f64> = (2..40)
            .map(|s| example2_noncontraction_witness(s as f64).unwrap().ratio)
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn restricted_contraction_is_a_quarter() {
        let pairs = related_pair_samples(1000);
        let e1 =
            estimate_contraction_factor(&example1_g(), &ShrinkSecond, &SameFirst, &pairs).unwrap();
        let e2 = estimate_contraction_factor(&TaxicabG, &SquareShrink, &SameFirst, &pairs).unwrap();
        assert!((e1.ratio - 0.25).abs() <= 1e-12);
        assert!((e2.ratio - 0.25).abs() <= 1e-12);
        for (a, b) in &pairs {
            let after = TaxicabG.abs(&SquareShrink.apply(a), &SquareShrink.apply(b));
            assert!(after <= 0.5 * TaxicabG.abs(a, b));
        }
        let unrelated = [(p(10.0, 0.0), p(11.0, 0.0))];
        let e =
            estimate_contraction_factor(&TaxicabG, &SquareShrink, &Universal, &unrelated).unwrap();
        assert_eq!(e.ratio, 5.25);
    }
}
