//! Piecewise-linear functions, intervals and atom-plus-density measures.

pub mod function;
pub mod interval;
pub mod measure;

pub use function::{uniform_grid, PlFunction};
pub use interval::{Endpoint, Infinitesimal, Interval, IntervalSpec};
pub use measure::{Atom, Measure};
