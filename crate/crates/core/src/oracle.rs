//! Exhaustive model checking of the fixed-point theorem on small finite
//! instances: carrier `0..n`, integer-valued `g`, a relation, a self-map and
//! a rational contraction factor.
//!
//! On a finite carrier with integer `g` the only available notion of limit
//! is `|g| -> 0`, which forces exact zeros. Completeness and continuity are
//! therefore automatic (the discrete reading); every report records this.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relation::{FiniteMap, FiniteRelation, RelationError};

pub const MAX_CARRIER: usize = 4;
pub const DEFAULT_G_MAX: i64 = 3;

/// Contraction factors tried by the sweep. The condition is monotone in `α`,
/// so an instance satisfies it for some grid value iff it does for the
/// largest one.
pub const ALPHA_GRID: [Ratio; 3] = [Ratio::new(1, 4), Ratio::new(1, 2), Ratio::new(3, 4)];

pub const READINGS: [&str; 2] = [
    "g-R-completeness is automatic on finite carriers with integer g: R-preserving g-Cauchy sequences have eventually-zero residuals",
    "g-R-continuity of S is automatic on finite carriers (discrete reading)",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance space too large: n = {0} exceeds {MAX_CARRIER}")]
    TooLarge(usize),
    #[error("carrier size must be at least 1")]
    Empty,
    #[error("g matrix has {got} entries, expected {expected}")]
    GShape { got: usize, expected: usize },
    #[error("declared n = {declared} but the relation has {actual} elements")]
    CarrierMismatch { declared: usize, actual: usize },
    #[error("contraction factor {0} outside (0, 1)")]
    Alpha(Ratio),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// A positive rational `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub const fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `|after| <= self * |before|`, exactly.
    fn bounds(self, after: i64, before: i64) -> bool {
        after.abs() * self.den as i64 <= before.abs() * self.num as i64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Deserialized instances are validated; the carrier size comes from the
/// relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson")]
pub struct FiniteInstance {
    pub n: usize,
    /// Row-major `g(i, j)`.
    pub g: Vec<i64>,
    pub rel: FiniteRelation,
    pub map: FiniteMap,
    pub alpha: Ratio,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    #[serde(default)]
    n: Option<usize>,
    g: Vec<i64>,
    rel: FiniteRelation,
    map: FiniteMap,
    alpha: Ratio,
}

impl TryFrom<InstanceJson> for FiniteInstance {
    type Error = OracleError;

    fn try_from(raw: InstanceJson) -> Result<Self, OracleError> {
        let inst = Self::new(raw.g, raw.rel, raw.map, raw.alpha)?;
        match raw.n {
            Some(n) if n != inst.n => Err(OracleError::CarrierMismatch {
                declared: n,
                actual: inst.n,
            }),
            _ => Ok(inst),
        }
    }
}

impl FiniteInstance {
    pub fn new(
        g: Vec<i64>,
        rel: FiniteRelation,
        map: FiniteMap,
        alpha: Ratio,
    ) -> Result<Self, OracleError> {
        let n = rel.ground_size();
        if g.len() != n * n {
            return Err(OracleError::GShape {
                got: g.len(),
                expected: n * n,
            });
        }
        rel.check_map(&map)?;
        if alpha.num == 0 || alpha.num >= alpha.den {
            return Err(OracleError::Alpha(alpha));
        }
        Ok(Self {
            n,
            g,
            rel,
            map,
            alpha,
        })
    }

    pub fn g_at(&self, i: usize, j: usize) -> i64 {
        self.g[i * self.n + j]
    }
}

/// The first hypothesis found to fail, in the order they are checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisFailure {
    EmptySeedSet,
    NotClosed { pair: (usize, usize) },
    Contraction { pair: (usize, usize) },
    G1 { pair: (usize, usize) },
    G2 { pair: (usize, usize) },
    G3 { triple: (usize, usize, usize) },
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptySeedSet => f.write_str("Ω(S;R) empty"),
            Self::NotClosed { pair } => write!(f, "R is not S-closed at {pair:?}"),
            Self::Contraction { pair } => write!(f, "contraction fails on related pair {pair:?}"),
            Self::G1 { pair } => write!(f, "(g1) fails: g = 0 on distinct related pair {pair:?}"),
            Self::G2 { pair } => write!(f, "(g2) fails on related pair {pair:?}"),
            Self::G3 { triple } => write!(f, "(g3) fails on (r, u, t) = {triple:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub failure: Option<HypothesisFailure>,
    pub reason: String,
}

impl HypothesisCheck {
    fn from_result(r: Result<(), HypothesisFailure>) -> Self {
        match r {
            Ok(()) => Self {
                holds: true,
                failure: None,
                reason: format!("all hypotheses hold; {}; {}", READINGS[0], READINGS[1]),
            },
            Err(f) => Self {
                holds: false,
                reason: f.to_string(),
                failure: Some(f),
            },
        }
    }
}

/// Conditions that depend only on the relation and the map.
#[derive(Debug, Clone)]
struct Frame {
    structural: Result<(), HypothesisFailure>,
    conclusion: bool,
    image_connected: bool,
    fixed_count: usize,
}

fn has_seed(rel: &FiniteRelation, map: &FiniteMap) -> bool {
    (0..map.len()).any(|i| rel.has(i, map.at(i)))
}

fn structural_check(rel: &FiniteRelation, map: &FiniteMap) -> Result<(), HypothesisFailure> {
    if !has_seed(rel, map) {
        return Err(HypothesisFailure::EmptySeedSet);
    }
    if let Some(pair) = rel.closure_violation(map) {
        return Err(HypothesisFailure::NotClosed { pair });
    }
    Ok(())
}

fn conclusion(rel: &FiniteRelation, map: &FiniteMap) -> bool {
    let n = map.len();
    if map.fixed_points().is_empty() {
        return false;
    }
    (0..n).filter(|&r| rel.has(r, map.at(r))).all(|r0| {
        let mut x = r0;
        for _ in 0..=n {
            if map.at(x) == x {
                return true;
            }
            x = map.at(x);
        }
        false
    })
}

impl Frame {
    fn new(rel: &FiniteRelation, map: &FiniteMap) -> Self {
        Self {
            structural: structural_check(rel, map),
            conclusion: conclusion(rel, map),
            image_connected: rel.symmetric_closure().is_connected(&map.image()),
            fixed_count: map.fixed_points().len(),
        }
    }
}

/// Conditions that involve `g`, checked on related pairs only.
fn metric_check(
    n: usize,
    g: &[i64],
    rel: &FiniteRelation,
    map: &FiniteMap,
    alpha: Ratio,
) -> Result<(), HypothesisFailure> {
    let at = |i: usize, j: usize| g[i * n + j];
    for &(r, s) in rel.pairs() {
        if !alpha.bounds(at(map.at(r), map.at(s)), at(r, s)) {
            return Err(HypothesisFailure::Contraction { pair: (r, s) });
        }
    }
    for &(r, u) in rel.pairs() {
        if r != u && at(r, u) == 0 {
            return Err(HypothesisFailure::G1 { pair: (r, u) });
        }
    }
    for &(r, u) in rel.pairs() {
        if at(r, u).abs() != at(u, r).abs() {
            return Err(HypothesisFailure::G2 { pair: (r, u) });
        }
    }
    for &(r, u) in rel.pairs() {
        for t in 0..n {
            if rel.has(t, u) && at(r, u).abs() > at(r, t).abs() + at(t, u).abs() {
                return Err(HypothesisFailure::G3 { triple: (r, u, t) });
            }
        }
    }
    Ok(())
}

/// Checks every hypothesis of the theorem on `inst` with its own `α`:
/// non-empty seed set, `S`-closedness, contraction on related pairs, and
/// (g1)-(g3) on the relation-constrained patterns.
pub fn hypotheses_hold(inst: &FiniteInstance) -> HypothesisCheck {
    HypothesisCheck::from_result(
        structural_check(&inst.rel, &inst.map)
            .and_then(|()| metric_check(inst.n, &inst.g, &inst.rel, &inst.map, inst.alpha)),
    )
}

/// `F(S)` is non-empty and every seed's orbit hits a fixed point within `n`
/// steps.
pub fn conclusion_holds(inst: &FiniteInstance) -> bool {
    conclusion(&inst.rel, &inst.map)
}

/// Smallest grid factor for which the contraction condition holds.
pub fn smallest_grid_alpha(inst: &FiniteInstance) -> Option<Ratio> {
    let at = |i, j| inst.g_at(i, j);
    ALPHA_GRID.into_iter().find(|&a| {
        inst.rel
            .pairs()
            .iter()
            .all(|&(r, s)| a.bounds(at(inst.map.at(r), inst.map.at(s)), at(r, s)))
    })
}

/// Canonical enumeration parameters for one carrier size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub n: usize,
    pub g_max: i64,
    /// At most this many relations, spread evenly over the canonical order.
    pub rel_cap: Option<usize>,
}

impl Sweep {
    pub fn full(n: usize, g_max: i64) -> Self {
        Self {
            n,
            g_max,
            rel_cap: None,
        }
    }

    pub fn capped(n: usize, g_max: i64, rel_cap: usize) -> Self {
        Self {
            n,
            g_max,
            rel_cap: Some(rel_cap),
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        match self.n {
            0 => Err(OracleError::Empty),
            n if n > MAX_CARRIER => Err(OracleError::TooLarge(n)),
            _ => Ok(()),
        }
    }

    pub fn map_count(&self) -> u64 {
        (self.n as u64).pow(self.n as u32)
    }

    pub fn g_count(&self) -> u64 {
        ((2 * self.g_max + 1) as u64).pow((self.n * self.n) as u32)
    }

    /// Relation bitmasks in canonical (ascending) order.
    pub fn relation_masks(&self) -> Vec<u64> {
        let total = 1u64 << (self.n * self.n);
        match self.rel_cap {
            Some(cap) if (cap as u64) < total => {
                let cap = cap as u64;
                (0..cap)
                    .map(|k| ((k as u128 * total as u128) / cap as u128) as u64)
                    .collect()
            }
            _ => (0..total).collect(),
        }
    }

    pub fn instance_count(&self) -> u64 {
        self.map_count() * self.relation_masks().len() as u64 * self.g_count()
    }

    pub fn map_at(&self, index: u64) -> FiniteMap {
        let n = self.n as u64;
        FiniteMap(
            (0..self.n)
                .map(|i| (index / n.pow(i as u32) % n) as usize)
                .collect(),
        )
    }

    pub fn g_at(&self, index: u64) -> Vec<i64> {
        let base = (2 * self.g_max + 1) as u64;
        let mut k = index;
        (0..self.n * self.n)
            .map(|_| {
                let d = (k % base) as i64 - self.g_max;
                k /= base;
                d
            })
            .collect()
    }
}

/// Lazily enumerates every instance of `sweep` in canonical order: map
/// outermost, then relation, then `g` matrix. All instances carry the
/// largest grid factor.
pub fn enumerate_instances(
    sweep: Sweep,
) -> Result<impl Iterator<Item = FiniteInstance>, OracleError> {
    sweep.validate()?;
    let masks = sweep.relation_masks();
    let alpha = ALPHA_GRID[ALPHA_GRID.len() - 1];
    Ok((0..sweep.map_count()).flat_map(move |m| {
        let map = sweep.map_at(m);
        masks.clone().into_iter().flat_map(move |mask| {
            let rel = FiniteRelation::from_mask(sweep.n, mask);
            let map = map.clone();
            (0..sweep.g_count()).map(move |k| FiniteInstance {
                n: sweep.n,
                g: sweep.g_at(k),
                rel: rel.clone(),
                map: map.clone(),
                alpha,
            })
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// Hypotheses hold, conclusion fails.
    NoFixedPoint,
    /// Hypotheses hold and `S(Ω)` is `R^s`-connected, yet `|F(S)| > 1`.
    NotUnique,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Canonical index within the sweep.
    pub index: u64,
    pub kind: CounterexampleKind,
    pub instance: FiniteInstance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub sweep: Sweep,
    pub relations: usize,
    pub instances_checked: u64,
    pub hypotheses_satisfied: u64,
    /// Hypothesis-satisfying instances whose image is `R^s`-connected.
    pub uniqueness_filtered: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub sweeps: Vec<SweepReport>,
    pub readings: Vec<String>,
}

impl OracleReport {
    pub fn counterexample_count(&self) -> usize {
        self.sweeps.iter().map(|s| s.counterexamples.len()).sum()
    }

    pub fn instances_checked(&self) -> u64 {
        self.sweeps.iter().map(|s| s.instances_checked).sum()
    }
}

struct Partial {
    hyp: u64,
    filtered: u64,
    counterexamples: Vec<Counterexample>,
}

/// Runs one sweep. Work is split per `(map, relation)` frame; conditions
/// not involving `g` are evaluated once per frame, which decides every `g`
/// matrix of a frame that fails them. Frames are joined in canonical order,
/// so the report does not depend on the thread count.
pub fn run_sweep(sweep: Sweep) -> Result<SweepReport, OracleError> {
    sweep.validate()?;
    let masks = sweep.relation_masks();
    let g_count = sweep.g_count();
    let alpha = ALPHA_GRID[ALPHA_GRID.len() - 1];
    let frames: Vec<(u64, usize)> = (0..sweep.map_count())
        .flat_map(|m| (0..masks.len()).map(move |r| (m, r)))
        .collect();

    let partials: Vec<Partial> = frames
        .par_iter()
        .map(|&(m, r)| {
            let map = sweep.map_at(m);
            let rel = FiniteRelation::from_mask(sweep.n, masks[r]);
            let frame = Frame::new(&rel, &map);
            let mut out = Partial {
                hyp: 0,
                filtered: 0,
                counterexamples: Vec::new(),
            };
            if frame.structural.is_err() {
                return out;
            }
            let base = (m * masks.len() as u64 + r as u64) * g_count;
            let mut g = vec![-sweep.g_max; sweep.n * sweep.n];
            for k in 0..g_count {
                if k > 0 {
                    odometer_step(&mut g, sweep.g_max);
                }
                if metric_check(sweep.n, &g, &rel, &map, alpha).is_err() {
                    continue;
                }
                out.hyp += 1;
                let kind = if !frame.conclusion {
                    Some(CounterexampleKind::NoFixedPoint)
                } else if frame.image_connected {
                    out.filtered += 1;
                    (frame.fixed_count != 1).then_some(CounterexampleKind::NotUnique)
                } else {
                    None
                };
                if let Some(kind) = kind {
                    out.counterexamples.push(Counterexample {
                        index: base + k,
                        kind,
                        instance: FiniteInstance {
                            n: sweep.n,
                            g: g.clone(),
                            rel: rel.clone(),
                            map: map.clone(),
                            alpha,
                        },
                    });
                }
            }
            out
        })
        .collect();

    let mut report = SweepReport {
        sweep,
        relations: masks.len(),
        instances_checked: sweep.map_count() * masks.len() as u64 * g_count,
        hypotheses_satisfied: 0,
        uniqueness_filtered: 0,
        counterexamples: Vec::new(),
    };
    for p in partials {
        report.hypotheses_satisfied += p.hyp;
        report.uniqueness_filtered += p.filtered;
        report.counterexamples.extend(p.counterexamples);
    }
    Ok(report)
}

/// Little-endian increment of a base-`(2 g_max + 1)` digit vector offset by
/// `-g_max`; matches [`Sweep::g_at`].
fn odometer_step(g: &mut [i64], g_max: i64) {
    for d in g.iter_mut() {
        if *d < g_max {
            *d += 1;
            return;
        }
        *d = -g_max;
    }
}

pub fn run_oracle(sweeps: &[Sweep]) -> Result<OracleReport, OracleError> {
    Ok(OracleReport {
        sweeps: sweeps
            .iter()
            .map(|&s| run_sweep(s))
            .collect::<Result<_, _>>()?,
        readings: READINGS.iter().map(|s| s.to_string()).collect(),
    })
}

/// The sweep run for carrier size `n` when nothing else is configured.
/// `g_max` and the relation cap shrink with `n` to keep runs at desk scale:
/// `n = 3` covers all 512 relations with `g` entries in `{-1, 0, 1}`
/// (about 2.7·10⁸ instances); `n = 4` checks a single relation, which is
/// already about 10¹⁰ instances.
pub fn default_sweep(n: usize) -> Sweep {
    match n {
        0..=2 => Sweep::full(n, DEFAULT_G_MAX),
        3 => Sweep::full(3, 1),
        _ => Sweep::capped(n, 1, 1),
    }
}

/// The sweeps used by the command-line tool and the acceptance suite:
/// `n = 2` and `n = 3`.
pub fn default_sweeps() -> Vec<Sweep> {
    vec![default_sweep(2), default_sweep(3)]
}
