//! Discrete Weyl calculus and exponential-symbol time stepping on periodic
//! grids, with the operator machinery to measure sharp norm bounds,
//! consistency defects, and convergence rates, plus the chart/atlas layer
//! that runs the same scheme on the circle.

pub mod dense;
pub mod error;
pub mod grid;
pub mod jet;
pub mod manifold;
pub mod propagator;
pub mod rates;
pub mod symbols;
pub mod weyl;

pub use error::{Error, Result};
