//! Picard iteration `r_{n+1} = S r_n` with residual tracking, a relation
//! audit, and the geometric certificates that follow from a contraction
//! factor `α` on related pairs.

use serde::Serialize;
use thiserror::Error;

use crate::gspace::GFunctional;
use crate::relation::{is_preserving_sequence, Relation, SelfMap, Symmetrized};

/// Relative slack allowed when comparing measured values to certified bounds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PicardError {
    #[error("g diverged at step {step}: value {value}")]
    Diverged { step: usize, value: f64 },
    #[error("contraction factor {0} outside (0, 1)")]
    AlphaDomain(f64),
    #[error("residual {step} = {residual:e} exceeds certified bound {bound:e}")]
    BoundViolated {
        step: usize,
        residual: f64,
        bound: f64,
    },
    #[error("not a path in R^s: {0}")]
    NotAPath(String),
    #[error("point {0} is not a fixed point: |g(p, S p)| = {1:e}")]
    NotFixed(&'static str, f64),
    #[error("stopping policy needs max_iterations >= 1 and a positive tolerance")]
    BadPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct StoppingPolicy {
    /// Stop once `|g(r_n, r_{n+1})| < residual_tol`.
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for StoppingPolicy {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            max_iterations: 1000,
        }
    }
}

impl StoppingPolicy {
    pub fn new(residual_tol: f64, max_iterations: usize) -> Result<Self, PicardError> {
        if max_iterations == 0 || !(residual_tol > 0.0) {
            return Err(PicardError::BadPolicy);
        }
        Ok(Self {
            residual_tol,
            max_iterations,
        })
    }

    /// Runs exactly `n` steps unless an exact fixed point is hit first.
    pub fn fixed_steps(n: usize) -> Self {
        Self {
            residual_tol: f64::MIN_POSITIVE,
            max_iterations: n.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace<E> {
    pub iterates: Vec<E>,
    /// `|g(r_n, r_{n+1})|`, one per step.
    pub residuals: Vec<f64>,
    pub alpha_used: Option<f64>,
    /// Every consecutive pair of iterates is related.
    pub preserved: bool,
    pub converged: bool,
    /// The start point lies in the seed set `{u : (u, S u) ∈ R}`.
    pub certified: bool,
    /// `α^n |g(r_0, r_1)|` per step, filled by [`IterationTrace::attach_alpha`].
    pub bound_certificates: Vec<f64>,
    pub policy: StoppingPolicy,
    pub warnings: Vec<String>,
}

impl<E> IterationTrace<E> {
    pub fn steps(&self) -> usize {
        self.residuals.len()
    }

    /// The reported fixed point: the last iterate.
    pub fn last(&self) -> &E {
        self.iterates.last().expect("trace holds at least r_0")
    }

    pub fn first_residual(&self) -> Option<f64> {
        self.residuals.first().copied()
    }

    /// Records `alpha` after checking every residual against
    /// `α^n |g(r_0, r_1)|` with [`BOUND_SLACK`] relative slack.
    pub fn attach_alpha(&mut self, alpha: f64) -> Result<(), PicardError> {
        check_alpha(alpha)?;
        let g01 = self.first_residual().unwrap_or(0.0);
        let mut certs = Vec::with_capacity(self.residuals.len());
        for (n, &residual) in self.residuals.iter().enumerate() {
            let bound = alpha.powi(n as i32) * g01;
            if residual > bound * (1.0 + BOUND_SLACK) {
                return Err(PicardError::BoundViolated {
                    step: n,
                    residual,
                    bound,
                });
            }
            certs.push(bound);
        }
        self.alpha_used = Some(alpha);
        self.bound_certificates = certs;
        Ok(())
    }

    /// Pairs `(m, n)`, `m < n <= min(N, max_index)`, where the measured
    /// `|g(r_m, r_n)|` exceeds the a-priori bound with relative `slack`.
    pub fn cauchy_violations<G>(
        &self,
        g: &G,
        alpha: f64,
        max_index: usize,
        slack: f64,
    ) -> Result<Vec<(usize, usize)>, PicardError>
    where
        G: GFunctional<E> + ?Sized,
    {
        let g01 = self.first_residual().unwrap_or(0.0);
        let top = (self.iterates.len() - 1).min(max_index);
        let mut bad = Vec::new();
        for m in 0..top {
            let bound = a_priori_bound(alpha, g01, m)? * (1.0 + slack);
            for n in m + 1..=top {
                if g.abs(&self.iterates[m], &self.iterates[n]) > bound {
                    bad.push((m, n));
                }
            }
        }
        Ok(bad)
    }
}

fn check_alpha(alpha: f64) -> Result<(), PicardError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(PicardError::AlphaDomain(alpha))
    }
}

/// Runs the Picard orbit of `r0` until `policy` fires.
///
/// A start point outside the seed set is not an error; the trace is marked
/// uncertified and a warning is recorded.
pub fn iterate<E, M, G, R>(
    map: &M,
    g: &G,
    rel: &R,
    r0: E,
    policy: StoppingPolicy,
) -> Result<IterationTrace<E>, PicardError>
where
    E: Clone,
    M: SelfMap<E> + ?Sized,
    G: GFunctional<E> + ?Sized,
    R: Relation<E> + ?Sized,
{
    try_iterate(|x: &E| Ok(map.apply(x)), g, rel, r0, policy)
}

/// [`iterate`] for maps that can fail; the first error aborts the run.
pub fn try_iterate<E, X, F, G, R>(
    mut step_fn: F,
    g: &G,
    rel: &R,
    r0: E,
    policy: StoppingPolicy,
) -> Result<IterationTrace<E>, X>
where
    F: FnMut(&E) -> Result<E, X>,
    X: From<PicardError>,
    G: GFunctional<E> + ?Sized,
    R: Relation<E> + ?Sized,
{
    let mut iterates = vec![r0];
    let mut residuals = Vec::new();
    let mut converged = false;
    for step in 0..policy.max_iterations.max(1) {
        let current = iterates.last().expect("non-empty");
        let next = step_fn(current)?;
        let value = g.eval(current, &next);
        if !value.is_finite() {
            return Err(PicardError::Diverged { step, value }.into());
        }
        iterates.push(next);
        residuals.push(value.abs());
        if value.abs() < policy.residual_tol {
            converged = true;
            break;
        }
    }

    let certified = rel.contains(&iterates[0], &iterates[1]);
    let preserved = is_preserving_sequence(rel, &iterates);
    let mut warnings = Vec::new();
    if !certified {
        warnings.push("start point is not in the seed set; trace is not certified".to_owned());
    }
    if !converged {
        warnings.push(format!(
            "no convergence within {} iterations (last residual {:e})",
            policy.max_iterations,
            residuals.last().copied().unwrap_or(f64::NAN)
        ));
    }
    Ok(IterationTrace {
        iterates,
        residuals,
        alpha_used: None,
        preserved,
        converged,
        certified,
        bound_certificates: Vec::new(),
        policy,
        warnings,
    })
}

/// `α^m / (1 - α) · g01`: bounds `|g(r_m, r_n)|` for every `n > m`.
pub fn a_priori_bound(alpha: f64, g01: f64, m: usize) -> Result<f64, PicardError> {
    check_alpha(alpha)?;
    Ok(alpha.powi(m as i32) / (1.0 - alpha) * g01)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// `α^n · Σ |g(p_i, p_{i+1})|` for `n = 0..=n_steps`.
    pub bounds: Vec<f64>,
    /// `Σ |g(S^n p_i, S^n p_{i+1})|` measured along the mapped path.
    pub orbit_sums: Vec<f64>,
    /// `|g(fp_a, fp_b)|`.
    pub measured: f64,
    pub coincide: bool,
}

/// Bounds the gap between two fixed points joined by a path in `R^s`: every
/// edge shrinks by `α` per application of `S`, and the endpoints never move.
#[allow(clippy::too_many_arguments)]
pub fn uniqueness_via_path<E, M, G, R>(
    map: &M,
    g: &G,
    rel: &R,
    fp_a: &E,
    fp_b: &E,
    path: &[E],
    alpha: f64,
    n_steps: usize,
    tol: f64,
) -> Result<DecayReport, PicardError>
where
    E: Clone + PartialEq,
    M: SelfMap<E> + ?Sized,
    G: GFunctional<E> + ?Sized,
    R: Relation<E> + ?Sized,
{
    check_alpha(alpha)?;
    if path.len() < 2 {
        return Err(PicardError::NotAPath("fewer than two nodes".into()));
    }
    if path[0] != *fp_a || path[path.len() - 1] != *fp_b {
        return Err(PicardError::NotAPath(
            "endpoints differ from the fixed points".into(),
        ));
    }
    let sym = Symmetrized(rel);
    if let Some(i) = path.windows(2).position(|w| !sym.contains(&w[0], &w[1])) {
        return Err(PicardError::NotAPath(format!(
            "edge {i} is not related either way"
        )));
    }
    for (name, p) in [("fp_a", fp_a), ("fp_b", fp_b)] {
        let gap = g.abs(p, &map.apply(p));
        if gap > tol {
            return Err(PicardError::NotFixed(name, gap));
        }
    }

    let edge_sum = |nodes: &[E]| nodes.windows(2).map(|w| g.abs(&w[0], &w[1])).sum::<f64>();
    let base = edge_sum(path);
    if !base.is_finite() {
        return Err(PicardError::NotAPath("an edge has infinite |g|".into()));
    }
    let bounds: Vec<f64> = (0..=n_steps).map(|n| alpha.powi(n as i32) * base).collect();
    let mut nodes = path.to_vec();
    let mut orbit_sums = Vec::with_capacity(n_steps + 1);
    for n in 0..=n_steps {
        if n > 0 {
            nodes = nodes.iter().map(|p| map.apply(p)).collect();
        }
        orbit_sums.push(edge_sum(&nodes));
    }
    let measured = g.abs(fp_a, fp_b);
    let coincide = measured <= tol || bounds[n_steps] < tol;
    Ok(DecayReport {
        bounds,
        orbit_sums,
        measured,
        coincide,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspace::GFn;
    use crate::relation::{RelationView, Universal};

    fn metric() -> GFn<impl Fn(&f64, &f64) -> f64> {
        GFn::global(|a: &f64, b: &f64| (a - b).abs())
    }

    #[test]
    fn a_priori_bound_values() {
        assert_eq!(a_priori_bound(0.5, 1.0, 10).unwrap(), 1.0 / 512.0);
        assert_eq!(a_priori_bound(0.25, 3.0, 0).unwrap(), 4.0);
        assert_eq!(
            a_priori_bound(1.0, 1.0, 0),
            Err(PicardError::AlphaDomain(1.0))
        );
        assert_eq!(
            a_priori_bound(0.0, 1.0, 0),
            Err(PicardError::AlphaDomain(0.0))
        );
    }

    #[test]
    fn fixed_start_converges_at_step_zero() {
        let map = |x: &f64| x / 3.0;
        let trace = iterate(&map, &metric(), &Universal, 0.0, StoppingPolicy::default()).unwrap();
        assert_eq!(trace.residuals, vec![0.0]);
        assert!(trace.converged);
        assert_eq!(trace.iterates.len(), 2);
    }

    #[test]
    fn uncertified_start_is_recorded_not_rejected() {
        let map = |x: &f64| x / 2.0;
        let leq = RelationView(|a: &f64, b: &f64| a <= b);
        let trace = iterate(&map, &metric(), &leq, 1.0, StoppingPolicy::default()).unwrap();
        assert!(!trace.certified);
        assert!(!trace.preserved);
        assert!(trace.converged);
        assert!(!trace.warnings.is_empty());
    }

    #[test]
    fn divergence_is_reported_with_step() {
        let map = |x: &f64| x * 1e200;
        let err = iterate(&map, &metric(), &Universal, 1.0, StoppingPolicy::default()).unwrap_err();
        assert!(matches!(err, PicardError::Diverged { step: 1, .. }));
    }

    #[test]
    fn non_convergence_stops_at_max_iterations() {
        let map = |x: &f64| -x;
        let policy = StoppingPolicy::new(1e-12, 7).unwrap();
        let trace = iterate(&map, &metric(), &Universal, 1.0, policy).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.steps(), 7);
    }

    #[test]
    fn attach_alpha_rejects_false_factor() {
        let map = |x: &f64| 0.5 * x + 1.0;
        let mut trace =
            iterate(&map, &metric(), &Universal, 0.0, StoppingPolicy::default()).unwrap();
        assert!(matches!(
            trace.attach_alpha(0.25),
            Err(PicardError::BoundViolated { step: 1, .. })
        ));
        assert!(trace.alpha_used.is_none());
        trace.attach_alpha(0.5).unwrap();
        assert_eq!(trace.bound_certificates.len(), trace.steps());
        assert!(trace
            .cauchy_violations(&metric(), 0.5, 50, BOUND_SLACK)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn policy_validation() {
        assert_eq!(StoppingPolicy::new(1e-3, 0), Err(PicardError::BadPolicy));
        assert_eq!(StoppingPolicy::new(0.0, 5), Err(PicardError::BadPolicy));
    }

    #[test]
    fn path_uniqueness_identical_points() {
        let map = |x: &f64| x / 2.0;
        let rep = uniqueness_via_path(
            &map,
            &metric(),
            &Universal,
            &0.0,
            &0.0,
            &[0.0, 1.0, 0.0],
            0.5,
            4,
            1e-12,
        )
        .unwrap();
        assert_eq!(rep.measured, 0.0);
        assert!(rep.coincide);
        assert_eq!(rep.bounds, vec![2.0, 1.0, 0.5, 0.25, 0.125]);
        assert_eq!(rep.orbit_sums, vec![2.0, 1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn path_uniqueness_rejects_bad_paths() {
        let map = |x: &f64| x / 2.0;
        let lt = RelationView(|a: &f64, b: &f64| a < b);
        let err = uniqueness_via_path(&map, &metric(), &lt, &0.0, &0.0, &[0.0, 0.0], 0.5, 3, 1e-12);
        assert!(matches!(err, Err(PicardError::NotAPath(_))));
        // (1, 0) is related only backwards, which R^s accepts.
        let ok = uniqueness_via_path(
            &map,
            &metric(),
            &lt,
            &0.0,
            &0.0,
            &[0.0, 1.0, 0.0],
            0.5,
            3,
            1e-12,
        );
        assert!(ok.is_ok());
        let err = uniqueness_via_path(&map, &metric(), &lt, &1.0, &0.0, &[1.0, 0.0], 0.5, 3, 1e-12);
        assert!(matches!(err, Err(PicardError::NotFixed("fp_a", _))));
    }
}
