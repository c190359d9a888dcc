//! Fractional-calculus numerics and the boundary value problem
//!
//! ```text
//! D^ζ f(t) = h(t, f(t)),  f(0) = 0,  ∫_0^1 f = f'(0)
//! ```
//!
//! solved through its integral form `f = T f` with
//!
//! ```text
//! (T u)(r) = I^ζ[h(·, u)](r) + 2 r ∫_0^1 I^ζ[h(·, u)](s) ds
//! ```
//!
//! by Picard iteration over grid functions under the sup metric.

pub mod gamma;
pub mod quadrature;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gamma::gamma;
pub use quadrature::QuadratureWeights;

use crate::grid::{GridError, GridFunction, PointwiseLeq, SupMetric};
use crate::picard::{try_iterate, IterationTrace, PicardError, StoppingPolicy};

#[derive(Debug, Error)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("rhs diverged at node {node} (t = {t}): value {value}")]
    RhsDiverged { node: usize, t: f64, value: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error("no convergence within {} iterations; last residual {:e}", .0.steps(), .0.residuals.last().copied().unwrap_or(f64::NAN))]
    NotConverged(Box<IterationTrace<GridFunction>>),
}

/// `I^ζ f` on the grid of `f`.
pub fn frac_integral(f: &GridFunction, zeta: f64) -> Result<GridFunction, FracError> {
    QuadratureWeights::new(zeta, f.n_intervals())?.integrate(f)
}

/// Which Gamma argument enters the Lipschitz constant `α Γ(·) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaVariant {
    /// `α Γ(α + 1) / 4`.
    AlphaPlusOne,
    /// `α Γ(ζ + 1) / 4`.
    #[default]
    ZetaPlusOne,
}

pub type Rhs = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub const MIN_INTERVALS: usize = 8;

#[derive(Clone)]
pub struct FdeProblem {
    zeta: f64,
    rhs: Rhs,
    weights: QuadratureWeights,
    pub policy: StoppingPolicy,
    pub lipschitz_alpha: f64,
    pub gamma_variant: GammaVariant,
}

impl fmt::Debug for FdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdeProblem")
            .field("zeta", &self.zeta)
            .field("n_intervals", &self.n_intervals())
            .field("policy", &self.policy)
            .field("lipschitz_alpha", &self.lipschitz_alpha)
            .field("gamma_variant", &self.gamma_variant)
            .finish_non_exhaustive()
    }
}

impl FdeProblem {
    pub fn new(
        zeta: f64,
        n_intervals: usize,
        rhs: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, FracError> {
        if n_intervals < MIN_INTERVALS {
            return Err(FracError::Domain(format!(
                "grid needs at least {MIN_INTERVALS} intervals, got {n_intervals}"
            )));
        }
        Ok(Self {
            zeta,
            rhs: Arc::new(rhs),
            weights: QuadratureWeights::new(zeta, n_intervals)?,
            policy: StoppingPolicy::default(),
            lipschitz_alpha: 0.5,
            gamma_variant: GammaVariant::default(),
        })
    }

    /// `h(t, u) = u / 16 + sin t`, the worked example.
    pub fn demo(zeta: f64, n_intervals: usize) -> Result<Self, FracError> {
        Self::new(zeta, n_intervals, |t, u| u / 16.0 + t.sin())
    }

    pub fn with_policy(mut self, policy: StoppingPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_gamma_variant(mut self, variant: GammaVariant) -> Self {
        self.gamma_variant = variant;
        self
    }

    pub fn with_lipschitz_alpha(mut self, alpha: f64) -> Self {
        self.lipschitz_alpha = alpha;
        self
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn n_intervals(&self) -> usize {
        self.weights.n_intervals()
    }

    pub fn weights(&self) -> &QuadratureWeights {
        &self.weights
    }

    pub fn rhs(&self, t: f64, u: f64) -> f64 {
        (self.rhs)(t, u)
    }

    /// The order lies outside the `(1, 2]` range of the differential form.
    pub fn regime_note(&self) -> Option<String> {
        (!(self.zeta > 1.0 && self.zeta <= 2.0)).then(|| {
            format!(
                "order {} is outside (1, 2] assumed by the differential form; solving the integral equation as stated",
                self.zeta
            )
        })
    }

    /// `α Γ(α + 1) / 4` or `α Γ(ζ + 1) / 4`.
    pub fn lipschitz_bound(&self) -> Result<f64, FracError> {
        let alpha = self.lipschitz_alpha;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FracError::Domain(format!("alpha {alpha} outside (0, 1)")));
        }
        let arg = match self.gamma_variant {
            GammaVariant::AlphaPlusOne => alpha + 1.0,
            GammaVariant::ZetaPlusOne => self.zeta + 1.0,
        };
        Ok(alpha * gamma(arg)? / 4.0)
    }

    /// Node values of `h(t_j, u_j)`.
    fn rhs_on(&self, u: &GridFunction) -> Result<GridFunction, FracError> {
        let values = u
            .nodes()
            .enumerate()
            .map(|(node, (t, v))| {
                let value = self.rhs(t, v);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(FracError::RhsDiverged { node, t, value })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridFunction::new(values)?)
    }
}

/// One application of `T`. The scalar `∫_0^1 I^ζ[h(·, u)]` uses the
/// composite trapezoid rule and is computed once per call.
pub fn apply_t(u: &GridFunction, prob: &FdeProblem) -> Result<GridFunction, FracError> {
    let inner = prob.weights.integrate(&prob.rhs_on(u)?)?;
    let c = inner.trapezoid();
    Ok(inner.map_values(|t, v| v + 2.0 * t * c)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub passes: bool,
    /// `α Γ(·) / 4` for the selected variant.
    pub bound: f64,
    /// Largest observed `|h(μ, u) - h(μ, v)| / |u - v|`.
    pub worst_ratio: f64,
    /// `bound - worst_ratio`.
    pub margin: f64,
    pub samples: usize,
}

/// Checks `|h(μ, u) - h(μ, v)| <= bound · |u - v|` on every sampled time
/// and ordered value pair. Pairs with `u = v` carry no information.
pub fn lipschitz_check(
    prob: &FdeProblem,
    t_samples: &[f64],
    value_pairs: &[(f64, f64)],
) -> Result<LipschitzReport, FracError> {
    let bound = prob.lipschitz_bound()?;
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for &mu in t_samples {
        for &(u, v) in value_pairs {
            if u == v {
                continue;
            }
            samples += 1;
            let ratio = (prob.rhs(mu, u) - prob.rhs(mu, v)).abs() / (u - v).abs();
            worst = worst.max(ratio);
        }
    }
    Ok(LipschitzReport {
        passes: worst <= bound,
        bound,
        worst_ratio: worst,
        margin: bound - worst,
        samples,
    })
}

/// Default sampling for [`lipschitz_check`]: 33 times in `[0, 1]` and
/// ordered value pairs from a spread of magnitudes.
pub fn default_lipschitz_samples() -> (Vec<f64>, Vec<(f64, f64)>) {
    let ts = (0..=32).map(|j| j as f64 / 32.0).collect();
    let levels = [-10.0, -2.0, -0.5, 0.0, 0.25, 1.0, 3.0, 10.0];
    let mut pairs = Vec::new();
    for (i, &u) in levels.iter().enumerate() {
        for &v in &levels[i + 1..] {
            pairs.push((u, v));
        }
    }
    (ts, pairs)
}

#[derive(Debug, Clone, Serialize)]
pub struct FdeSolution {
    pub trace: IterationTrace<GridFunction>,
    pub solution: GridFunction,
    pub lipschitz: LipschitzReport,
    pub notes: Vec<String>,
}

/// Picard iteration of `T` from `u_0 = 0` under sup-norm residuals, with the
/// pointwise order as the audited relation.
pub fn solve_fde(prob: &FdeProblem) -> Result<FdeSolution, FracError> {
    let (ts, pairs) = default_lipschitz_samples();
    let lipschitz = lipschitz_check(prob, &ts, &pairs)?;
    let mut notes: Vec<String> = prob.regime_note().into_iter().collect();
    if !lipschitz.passes {
        notes.push(format!(
            "Lipschitz condition fails: observed {:.6} > bound {:.6}",
            lipschitz.worst_ratio, lipschitz.bound
        ));
    }
    let u0 = GridFunction::zeros(prob.n_intervals());
    let trace = try_iterate(
        |u| apply_t(u, prob),
        &SupMetric,
        &PointwiseLeq,
        u0,
        prob.policy,
    )?;
    if !trace.converged {
        return Err(FracError::NotConverged(Box::new(trace)));
    }
    Ok(FdeSolution {
        solution: trace.last().clone(),
        trace,
        lipschitz,
        notes,
    })
}

/// `(|f(0)|, |∫_0^1 f - f'(0)|)`: the trapezoid rule for the integral and a
/// one-sided second-order difference for the slope.
pub fn boundary_residuals(solution: &GridFunction) -> (f64, f64) {
    let r0 = solution.values()[0].abs();
    (
        r0,
        (solution.trapezoid() - solution.derivative_at_zero()).abs(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_vanishes_at_origin() {
        let prob = FdeProblem::demo(0.9, 64).unwrap();
        for u in [
            GridFunction::zeros(64),
            GridFunction::from_fn(64, |t| 3.0 * t - 1.0).unwrap(),
        ] {
            assert_eq!(apply_t(&u, &prob).unwrap().values()[0], 0.0);
        }
    }

    #[test]
    fn zero_rhs_gives_zero_map_and_one_step_solve() {
        let prob = FdeProblem::new(0.9, 32, |_, _| 0.0).unwrap();
        let u = GridFunction::from_fn(32, f64::cos).unwrap();
        assert!(apply_t(&u, &prob)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let sol = solve_fde(&prob).unwrap();
        assert_eq!(sol.trace.steps(), 1);
        assert!(sol.solution.values().iter().all(|&v| v == 0.0));
        assert_eq!(boundary_residuals(&sol.solution), (0.0, 0.0));
    }

    #[test]
    fn rhs_divergence_is_located() {
        let prob =
            FdeProblem::new(0.9, 16, |t, _| if t > 0.5 { f64::INFINITY } else { 0.0 }).unwrap();
        let err = apply_t(&GridFunction::zeros(16), &prob).unwrap_err();
        assert!(matches!(err, FracError::RhsDiverged { node: 9, .. }));
    }

    #[test]
    fn non_convergence_carries_trace() {
        let prob = FdeProblem::demo(0.9, 16)
            .unwrap()
            .with_policy(StoppingPolicy::new(1e-12, 3).unwrap());
        match solve_fde(&prob) {
            Err(FracError::NotConverged(trace)) => assert_eq!(trace.steps(), 3),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn lipschitz_examples() {
        let prob = FdeProblem::demo(0.9, 16)
            .unwrap()
            .with_gamma_variant(GammaVariant::AlphaPlusOne);
        let (ts, pairs) = default_lipschitz_samples();
        let rep = lipschitz_check(&prob, &ts, &pairs).unwrap();
        assert!(rep.passes);
        let sqrt_pi_16 = std::f64::consts::PI.sqrt() / 16.0;
        assert!((rep.bound - sqrt_pi_16).abs() <= 1e-10 * sqrt_pi_16);
        assert!((rep.worst_ratio - 1.0 / 16.0).abs() < 1e-12);

        let flat = FdeProblem::new(0.9, 16, |t, _| t.sin()).unwrap();
        let rep = lipschitz_check(&flat, &ts, &pairs).unwrap();
        assert!(rep.passes);
        assert_eq!(rep.margin, rep.bound);

        let steep = FdeProblem::new(0.9, 16, |_, u| u)
            .unwrap()
            .with_gamma_variant(GammaVariant::AlphaPlusOne);
        assert!(!lipschitz_check(&steep, &ts, &pairs).unwrap().passes);
    }

    #[test]
    fn problem_validation_and_regime() {
        assert!(FdeProblem::demo(0.9, 4).is_err());
        assert!(FdeProblem::demo(-0.5, 16).is_err());
        assert!(FdeProblem::demo(0.9, 16).unwrap().regime_note().is_some());
        assert!(FdeProblem::demo(1.5, 16).unwrap().regime_note().is_none());
        let bad = FdeProblem::demo(0.9, 16).unwrap().with_lipschitz_alpha(1.5);
        assert!(bad.lipschitz_bound().is_err());
    }
}
