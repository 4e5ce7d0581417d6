//! Divisor theory on metric graphs with rational edge lengths, and linear
//! pencils on the chain of loops.
//!
//! Metric graphs are described by a [`ModelGraph`] whose edges carry exact
//! rational lengths. Divisors are supported on points of a [`Grid`], an
//! equal-length refinement of the model, where reduced divisors, linear
//! equivalence and rank are computed by chip-firing.
//!
//! On the [`ChainOfLoops`] of even genus `g`, the rank-one divisors of degree
//! `g/2 + 1` correspond to [`LatticePath`]s; [`pencil`] builds them and
//! [`symmetry`] studies the mirror involution of the chain.

pub mod chain;
pub mod divisor;
pub mod error;
pub mod firing;
pub mod graph;
pub mod grid;
pub mod paths;
pub mod pencil;
pub mod symmetry;
pub mod verify;

pub use chain::ChainOfLoops;
pub use divisor::Divisor;
pub use error::{Error, Result};
pub use firing::{Emptiness, PLFunction, RankResult};
pub use graph::{EdgeId, MetricPoint, ModelGraph, VertexId};
pub use grid::{refine, Grid};
pub use paths::LatticePath;
pub use pencil::PencilDivisor;
pub use symmetry::Involution;
pub use verify::{OutputFormat, VerificationReport};

pub use num_rational::Rational64;
