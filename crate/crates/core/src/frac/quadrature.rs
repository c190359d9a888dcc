//! Product-trapezoid weights for the Riemann-Liouville integral
//!
//! ```text
//! I^ζ f(t_n) = 1/Γ(ζ) ∫_0^{t_n} (t_n - s)^(ζ-1) f(s) ds
//! ```
//!
//! with `f` replaced by its piecewise-linear interpolant and the kernel
//! integrated exactly on each piece. In the scaled variable
//! `σ = (t_n - s) / h` the piece `[t_k, t_{k+1}]` becomes `[a, a + 1]`,
//! `a = n - k - 1`, and contributes
//!
//! ```text
//! h^ζ / Γ(ζ) · (far(a) f_k + near(a) f_{k+1})
//! near(a) = ∫_0^1 (a + x)^(ζ-1) (1 - x) dx
//! far(a)  = ∫_0^1 (a + x)^(ζ-1) x dx = mass(a) - near(a)
//! ```

use rayon::prelude::*;

use super::{gamma::gamma, FracError};
use crate::grid::GridFunction;

/// Above this offset `near(a)` is summed as a binomial series in `1/a`.
const SERIES_THRESHOLD: f64 = 16.0;

/// `∫_0^1 (a + x)^(ζ-1) dx`.
fn mass(a: f64, zeta: f64) -> f64 {
    if a == 0.0 {
        1.0 / zeta
    } else {
        a.powf(zeta) * (zeta * (1.0 / a).ln_1p()).exp_m1() / zeta
    }
}

/// `∫_0^1 (a + x)^(ζ-1) (1 - x) dx`.
fn near(a: f64, zeta: f64) -> f64 {
    if a == 0.0 {
        return 1.0 / (zeta * (zeta + 1.0));
    }
    if a >= SERIES_THRESHOLD {
        // a^(ζ-1) Σ_k C(ζ-1, k) a^(-k) / ((k+1)(k+2))
        let mut binom = 1.0;
        let mut scale = 1.0;
        let mut sum = 0.0;
        for k in 0..64 {
            let kf = k as f64;
            let term = binom * scale / ((kf + 1.0) * (kf + 2.0));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            binom *= (zeta - 1.0 - kf) / (kf + 1.0);
            scale /= a;
        }
        return a.powf(zeta - 1.0) * sum;
    }
    // b·M0 - M1 with b = a + 1, rewritten as a^ζ/(ζ+1) · ((a+1) E/ζ - 1)
    let e = (zeta * (1.0 / a).ln_1p()).exp_m1();
    a.powf(zeta) / (zeta + 1.0) * ((a + 1.0) * e / zeta - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights {
    zeta: f64,
    n_intervals: usize,
    /// `h^ζ / Γ(ζ)`.
    scale: f64,
    near: Vec<f64>,
    far: Vec<f64>,
}

impl QuadratureWeights {
    pub fn new(zeta: f64, n_intervals: usize) -> Result<Self, FracError> {
        if !(zeta > 0.0) || !zeta.is_finite() {
            return Err(FracError::Domain(format!(
                "order must be positive, got {zeta}"
            )));
        }
        if n_intervals == 0 {
            return Err(FracError::Domain("need at least one interval".into()));
        }
        let h = 1.0 / n_intervals as f64;
        let scale = h.powf(zeta) / gamma(zeta)?;
        let (near, far) = (0..n_intervals)
            .map(|a| {
                let a = a as f64;
                let w = near(a, zeta);
                (w, mass(a, zeta) - w)
            })
            .unzip();
        Ok(Self {
            zeta,
            n_intervals,
            scale,
            near,
            far,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Full weight vector for target node `n`: `I^ζ f(t_n) = Σ_k w_k f_k`.
    /// All zero for `n = 0`.
    pub fn weights_at(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n + 1];
        for k in 0..n {
            let a = n - k - 1;
            w[k] += self.scale * self.far[a];
            w[k + 1] += self.scale * self.near[a];
        }
        w
    }

    fn node_value(&self, f: &[f64], n: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            let a = n - k - 1;
            acc += self.far[a] * f[k] + self.near[a] * f[k + 1];
        }
        self.scale * acc
    }

    /// Node values of `I^ζ f`. Per-node sums run in ascending `k`, so the
    /// result does not depend on how nodes are spread over threads.
    pub fn integrate(&self, f: &GridFunction) -> Result<GridFunction, FracError> {
        if f.n_intervals() != self.n_intervals {
            return Err(FracError::Grid(crate::grid::GridError::Mismatch(
                f.n_intervals(),
                self.n_intervals,
            )));
        }
        let values = f.values();
        let out: Vec<f64> = (0..=self.n_intervals)
            .into_par_iter()
            .map(|n| self.node_value(values, n))
            .collect();
        Ok(GridFunction::new(out)?)
    }
}
