//! Funk area function of smooth convex bodies.
//!
//! Moving the origin of a convex body `K` to an interior point `p` gives a new
//! Minkowski functional `L_p`. The Finslerian area of its indicatrix, `r(p)`,
//! is a strictly convex function of `p` that blows up at the boundary. This
//! crate evaluates `r`, all of its partial derivatives, its Taylor models, and
//! locates the unique minimizer (the balancing point).
//!
//! Module map:
//!
//! * [`bodies`]: closed-form convex bodies and their Minkowski functionals.
//! * [`metric`]: Finsler metric tensor, angular metric, Cartan trace, volume weight.
//! * [`quadrature`]: sphere rules and indicatrix integrals.
//! * [`funk`]: Funk functionals, area function, derivatives, Taylor models,
//!   averaged metrics.
//! * [`balance`]: balancing point and the per-point field pipeline.
//! * [`reference`]: independent oracles (closed forms, Monte Carlo, finite
//!   differences).
//! * [`cli`]: the `funkarea` command-line tool.

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod bodies;
pub mod cli;
pub mod error;
pub mod funk;
pub mod linalg;
pub mod metric;
pub mod quadrature;
pub mod reference;

pub use bodies::{BodyKind, ConvexBody, RegularityReport};
pub use error::{FunkError, Result};
pub use quadrature::SphereRule;

/// Dense column vector used throughout (dimensions are small, n ≤ 4).
pub type Vector = nalgebra::DVector<f64>;
/// Dense square matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Default interior margin: base points must satisfy `L(p) ≤ 1 - DEFAULT_MARGIN`.
pub const DEFAULT_MARGIN: f64 = 1e-6;
