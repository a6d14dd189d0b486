//! Numerical laboratory for the D-norm `‖x‖_D = (Σ 2^{-n}‖x‖_n²)^{1/2}` on
//! `C[0,1]`, where `‖x‖_n` is the sup of `|x|` over the n-th interval of a
//! neighborhood base.

pub mod base;
pub mod cli;
pub mod enclosure;
pub mod error;
pub mod model;
pub mod nested;
pub mod norm;
pub mod operator;
pub mod report;
pub mod rotundity;
mod sampling;
pub mod scalar;
pub mod slice;

pub use base::{BaseKind, EpsilonSchedule, NeighborhoodBase};
pub use enclosure::Enclosure;
pub use error::{LabError, Result};
pub use model::{Atom, Endpoint, Interval, IntervalSpec, Measure, PlFunction};
pub use nested::ExponentSchedule;
pub use norm::{DNormContext, DualNormBracket, DualOptions, NormContext, NormingFunctional, SupNorm};
pub use operator::{OperatorExpr, Rank1Projection};
pub use rotundity::MlurCertificate;
pub use scalar::Scalar;
pub use slice::{SetSpec, SliceSpec, WitnessCertificate};

pub type Function = PlFunction<f64>;
pub type Function32 = PlFunction<f32>;
pub type Base = NeighborhoodBase<f64>;
pub type Base32 = NeighborhoodBase<f32>;
pub type Context = DNormContext<f64>;
pub type Context32 = DNormContext<f32>;
pub type Measure64 = Measure<f64>;
