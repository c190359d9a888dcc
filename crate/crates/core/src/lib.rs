//! Fixed-point iteration on spaces carrying a binary relation and a
//! real-valued pair functional `g` in place of a metric.
//!
//! The crate is organised bottom-up:
//!
//! * [`relation`]: finite relations, closures, path search, `S`-closedness
//!   and the seed set `{u : (u, Su) in R}`.
//! * [`gspace`]: the `g` functional, checks of its axioms on samples and
//!   contraction-factor estimation over related pairs.
//! * [`picard`]: the iteration engine with residual tracking, a-priori
//!   geometric bounds and the path-based uniqueness argument.
//! * [`oracle`]: an exhaustive model checker over small finite instances.
//! * [`grid`] and [`frac`]: discretised `C[0,1]`, the Riemann-Liouville
//!   integral by product-trapezoid quadrature, and the fractional boundary
//!   value solver built on the Picard engine.
//! * [`plane`]: the two planar examples with their hypothesis-failure
//!   witnesses.
//! * [`output`]: CSV and SVG writers used by the command-line tool.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod frac;
pub mod grid;
pub mod gspace;
pub mod oracle;
pub mod output;
pub mod picard;
pub mod plane;
pub mod relation;

pub use grid::GridFunction;
pub use gspace::{DomainMode, GFn, GFunctional, PropertyReport};
pub use picard::{IterationTrace, StoppingPolicy};
pub use relation::{FiniteRelation, Path, Relation, RelationView, SelfMap};
