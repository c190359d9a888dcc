//! Uniform-grid functions on `[0, 1]`: node `t_j = j / N`, `j = 0..=N`.

use serde::Serialize;
use thiserror::Error;

use crate::gspace::{DomainMode, GFunctional};
use crate::relation::Relation;

pub const DEFAULT_INTERVALS: usize = 512;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid sizes differ: {0} vs {1} intervals")]
    Mismatch(usize, usize),
    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },
    #[error("t = {0} outside [0, 1]")]
    Domain(f64),
    #[error("need at least one interval")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() < 2 {
            return Err(GridError::Empty);
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GridError::NonFinite { node, value });
        }
        Ok(Self { values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(n_intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self, GridError> {
        if n_intervals == 0 {
            return Err(GridError::Empty);
        }
        let h = 1.0 / n_intervals as f64;
        Self::new((0..=n_intervals).map(|j| f(j as f64 * h)).collect())
    }

    pub fn constant(n_intervals: usize, c: f64) -> Result<Self, GridError> {
        Self::from_fn(n_intervals, |_| c)
    }

    pub fn zeros(n_intervals: usize) -> Self {
        Self::constant(n_intervals, 0.0).expect("n_intervals >= 1")
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n_intervals() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.n_intervals() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.node(j), v))
    }

    fn zip<'a>(
        &'a self,
        other: &'a Self,
    ) -> Result<impl Iterator<Item = (f64, f64)> + 'a, GridError> {
        if self.values.len() != other.values.len() {
            return Err(GridError::Mismatch(self.n_intervals(), other.n_intervals()));
        }
        Ok(self
            .values
            .iter()
            .copied()
            .zip(other.values.iter().copied()))
    }

    /// `max_j |u_j - v_j|`.
    pub fn sup_diff(&self, other: &Self) -> Result<f64, GridError> {
        Ok(self
            .zip(other)?
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
    }

    /// `max_j (u_j - v_j)`; may be negative.
    pub fn g_order(&self, other: &Self) -> Result<f64, GridError> {
        Ok(self
            .zip(other)?
            .fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a - b)))
    }

    /// `u_j <= v_j` at every node.
    pub fn pointwise_leq(&self, other: &Self) -> Result<bool, GridError> {
        Ok(self.zip(other)?.all(|(a, b)| a <= b))
    }

    /// Piecewise-linear value at `t`, exact at nodes.
    pub fn interpolate(&self, t: f64) -> Result<f64, GridError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(GridError::Domain(t));
        }
        let n = self.n_intervals();
        let x = t * n as f64;
        let j = (x.floor() as usize).min(n - 1);
        let w = x - j as f64;
        if w == 0.0 {
            return Ok(self.values[j]);
        }
        Ok(self.values[j] * (1.0 - w) + self.values[j + 1] * w)
    }

    /// Composite trapezoid rule over `[0, 1]`.
    pub fn trapezoid(&self) -> f64 {
        let v = &self.values;
        let n = v.len() - 1;
        let inner: f64 = v[1..n].iter().sum();
        (0.5 * (v[0] + v[n]) + inner) / n as f64
    }

    /// One-sided second-order difference `(-3 u_0 + 4 u_1 - u_2) / 2h`.
    pub fn derivative_at_zero(&self) -> f64 {
        let v = &self.values;
        match v.len() {
            2 => (v[1] - v[0]) / self.step(),
            _ => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * self.step()),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        Self::new(self.nodes().map(|(t, v)| f(t, v)).collect())
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self, GridError> {
        Self::new(self.zip(other)?.map(|(x, y)| a * x + b * y).collect())
    }
}

/// The sup metric as a `g` functional. Mismatched grids evaluate to NaN.
#[derive(Debug, Clone, Copy, Default)]
pub struct SupMetric;

impl GFunctional<GridFunction> for SupMetric {
    fn eval(&self, a: &GridFunction, b: &GridFunction) -> f64 {
        a.sup_diff(b).unwrap_or(f64::NAN)
    }
}

/// `g(u, v) = max_j (u_j - v_j)`, asserted on pointwise-ordered pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct OrderG;

impl GFunctional<GridFunction> for OrderG {
    fn eval(&self, a: &GridFunction, b: &GridFunction) -> f64 {
        a.g_order(b).unwrap_or(f64::NAN)
    }

    fn mode(&self) -> DomainMode {
        DomainMode::RelationRestricted
    }
}

/// Pointwise `<=`; mismatched grids are unrelated.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointwiseLeq;

impl Relation<GridFunction> for PointwiseLeq {
    fn contains(&self, a: &GridFunction, b: &GridFunction) -> bool {
        a.pointwise_leq(b).unwrap_or(false)
    }
}
