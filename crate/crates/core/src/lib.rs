//! Lotuses of plane curve singularities and the invariants read from them.
//!
//! Modules:
//! - [`arith`]: exact rationals, continued fractions, wedge of slopes, `n[:p]`.
//! - [`lotus`]: the lotus complex, Newton lotuses and a lattice oracle for them.
//! - [`invariants`]: log-discrepancies, multiplicities, orders of vanishing,
//!   intersection numbers, delta and Milnor numbers computed on a lotus.
//! - [`ewtree`]: Eggers-Wall trees, contact complexity, trunk decompositions,
//!   lotuses rebuilt from trees, semigroups.
//! - [`puiseux`]: Newton-Puiseux series in characteristic 0 and p.
//! - [`report`]: the invariant bundle used by the command-line tool.

pub mod arith;
pub mod error;
pub mod ewtree;
pub mod ffield;
pub mod fixtures;
pub mod invariants;
pub mod lotus;
pub mod puiseux;
pub mod render;
pub mod report;

pub use arith::{ContinuedFraction, ExtRational, Rational};
pub use error::{Error, Result};
pub use ewtree::EwTree;
pub use lotus::{Lotus, VertexId, VertexKind};
pub use puiseux::NpSeries;
