//! The pair functional `g` that stands in for a metric, and the sampled
//! checks of its axioms:
//!
//! * (g1) `g(r, u) = 0` implies `r = u`,
//! * (g2) `|g(r, u)| = |g(u, r)|`,
//! * (g3) `|g(r, u)| <= |g(r, t)| + |g(t, u)|`.
//!
//! In [`DomainMode::RelationRestricted`] the axioms are only required on the
//! pattern `(r, u) ∈ R` and `(t, u) ∈ R`.

use serde::Serialize;
use thiserror::Error;

use crate::relation::{Relation, SelfMap};

/// Default threshold below which `|g|` counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GError {
    #[error("no informative pairs: every sampled pair has g = 0")]
    NoInformativePairs,
    #[error("pair {0} is not in the relation")]
    UnrelatedPair(usize),
    #[error("not a g-limit: tail residual {residual:e} exceeds tolerance {tol:e}")]
    NotALimit { residual: f64, tol: f64 },
    #[error("empty sample")]
    EmptySample,
}

/// Where the axioms are asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    #[default]
    Global,
    RelationRestricted,
}

pub trait GFunctional<E: ?Sized> {
    fn eval(&self, a: &E, b: &E) -> f64;

    fn mode(&self) -> DomainMode {
        DomainMode::Global
    }

    fn abs(&self, a: &E, b: &E) -> f64 {
        self.eval(a, b).abs()
    }
}

impl<E: ?Sized, G: GFunctional<E> + ?Sized> GFunctional<E> for &G {
    fn eval(&self, a: &E, b: &E) -> f64 {
        (**self).eval(a, b)
    }

    fn mode(&self) -> DomainMode {
        (**self).mode()
    }
}

/// A `g` built from a closure plus its declared domain mode.
#[derive(Clone, Copy)]
pub struct GFn<F> {
    f: F,
    mode: DomainMode,
}

impl<F> GFn<F> {
    pub fn global(f: F) -> Self {
        Self {
            f,
            mode: DomainMode::Global,
        }
    }

    pub fn restricted(f: F) -> Self {
        Self {
            f,
            mode: DomainMode::RelationRestricted,
        }
    }

    pub fn with_mode(self, mode: DomainMode) -> Self {
        Self { mode, ..self }
    }
}

impl<E: ?Sized, F: Fn(&E, &E) -> f64> GFunctional<E> for GFn<F> {
    fn eval(&self, a: &E, b: &E) -> f64 {
        (self.f)(a, b)
    }

    fn mode(&self) -> DomainMode {
        self.mode
    }
}

/// First violations of (g1)-(g3) found in canonical scan order. An absent
/// witness means nothing was found among the samples, not that the axiom
/// holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport<E> {
    pub mode: DomainMode,
    pub g1_witness: Option<(E, E)>,
    pub g2_witness: Option<(E, E)>,
    pub g3_witness: Option<(E, E, E)>,
    pub samples_checked: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
}

impl<E> PropertyReport<E> {
    pub fn passed(&self) -> bool {
        self.g1_witness.is_none() && self.g2_witness.is_none() && self.g3_witness.is_none()
    }
}

/// Scans `samples` for violations of (g1)-(g3).
///
/// Pairs are visited as `(samples[i], samples[j])` with `i` outer; triples
/// `(r, u, t)` with `r`, then `u`, then `t` as loop order. In restricted mode
/// a pair `(r, u)` is examined only when related, and a triple only when
/// `(r, u)` and `(t, u)` are both related.
pub fn verify_g_properties<E, G, R>(
    g: &G,
    rel: &R,
    samples: &[E],
    tol: f64,
) -> Result<PropertyReport<E>, GError>
where
    E: Clone + PartialEq,
    G: GFunctional<E> + ?Sized,
    R: Relation<E> + ?Sized,
{
    if samples.is_empty() {
        return Err(GError::EmptySample);
    }
    let mode = g.mode();
    let in_scope = |a: &E, b: &E| mode == DomainMode::Global || rel.contains(a, b);

    let mut report = PropertyReport {
        mode,
        g1_witness: None,
        g2_witness: None,
        g3_witness: None,
        samples_checked: samples.len(),
        pairs_checked: 0,
        triples_checked: 0,
    };

    for r in samples {
        for u in samples {
            if !in_scope(r, u) {
                continue;
            }
            report.pairs_checked += 1;
            let gru = g.abs(r, u);
            if report.g1_witness.is_none() && gru <= tol && r != u {
                report.g1_witness = Some((r.clone(), u.clone()));
            }
            if report.g2_witness.is_none() && (gru - g.abs(u, r)).abs() > tol {
                report.g2_witness = Some((r.clone(), u.clone()));
            }
            for t in samples {
                if !in_scope(t, u) {
                    continue;
                }
                report.triples_checked += 1;
                if report.g3_witness.is_none() && gru > g.abs(r, t) + g.abs(t, u) + tol {
                    report.g3_witness = Some((r.clone(), u.clone(), t.clone()));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionEstimate<E> {
    /// `sup |g(S a, S b)| / |g(a, b)|` over informative pairs.
    pub ratio: f64,
    pub worst_pair: (E, E),
    pub informative_pairs: usize,
}

/// Largest observed contraction ratio over `pairs`, all of which must be
/// related. Pairs with `|g(a, b)| = 0` carry no information and are skipped.
/// A ratio below one is evidence of contraction, not a proof.
pub fn estimate_contraction_factor<E, G, M, R>(
    g: &G,
    map: &M,
    rel: &R,
    pairs: &[(E, E)],
) -> Result<ContractionEstimate<E>, GError>
where
    E: Clone,
    G: GFunctional<E> + ?Sized,
    M: SelfMap<E> + ?Sized,
    R: Relation<E> + ?Sized,
{
    let mut best: Option<(f64, usize)> = None;
    let mut informative = 0;
    for (k, (a, b)) in pairs.iter().enumerate() {
        if !rel.contains(a, b) {
            return Err(GError::UnrelatedPair(k));
        }
        let before = g.abs(a, b);
        if before == 0.0 {
            continue;
        }
        informative += 1;
        let ratio = g.abs(&map.apply(a), &map.apply(b)) / before;
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, k));
        }
    }
    let (ratio, k) = best.ok_or(GError::NoInformativePairs)?;
    Ok(ContractionEstimate {
        ratio,
        worst_pair: pairs[k].clone(),
        informative_pairs: informative,
    })
}

/// Given a sequence whose tail is within `tol` of both candidate limits,
/// reports whether the candidates coincide: `|g(a, b)| <= 2 tol`, the bound
/// the triangle property gives.
pub fn check_limit_uniqueness<E, G>(
    g: &G,
    seq: &[E],
    limit_a: &E,
    limit_b: &E,
    tol: f64,
) -> Result<bool, GError>
where
    G: GFunctional<E> + ?Sized,
{
    let tail = seq.last().ok_or(GError::EmptySample)?;
    for limit in [limit_a, limit_b] {
        let residual = g.abs(tail, limit);
        if !(residual < tol) {
            return Err(GError::NotALimit { residual, tol });
        }
    }
    Ok(g.abs(limit_a, limit_b) <= 2.0 * tol)
}

/// Radical inverse of `index` in `base` (van der Corput), in `[0, 1)`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut x = 0.0;
    while index > 0 {
        x += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    x
}

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// `count` Halton points in the box `[lo, hi]`, starting at index 1 so the
/// corner `lo` is not emitted.
pub fn halton_box<const D: usize>(lo: [f64; D], hi: [f64; D], count: usize) -> Vec<[f64; D]> {
    assert!(
        D <= HALTON_BASES.len(),
        "at most {} dimensions",
        HALTON_BASES.len()
    );
    (1..=count as u64)
        .map(|i| {
            std::array::from_fn(|d| lo[d] + (hi[d] - lo[d]) * radical_inverse(i, HALTON_BASES[d]))
        })
        .collect()
}

/// All ordered pairs of distinct indices of `points` that are related.
pub fn related_pairs<E: Clone, R: Relation<E> + ?Sized>(rel: &R, points: &[E]) -> Vec<(E, E)> {
    let mut out = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            if i != j && rel.contains(a, b) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}
