//! Simulator for a measurement-based quantum Maxwell's demon acting on a spin-1/2
//! working system with a spin-1/2 memory.
//!
//! The numerical core is generic over the real scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases at the crate root fix it to `f64`, which is
//! what the command-line tool and the stated tolerances assume.

// matrix code indexes several arrays per loop; negated comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod error;
pub mod protocol;
pub mod qmat;
pub mod sampling;
pub mod scalar;
pub mod thermo;
pub mod units;
pub mod workstats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix = qmat::CMatrix<f64>;
pub type HermitianOperator = qmat::HermitianOperator<f64>;
pub type DensityMatrix = qmat::DensityMatrix<f64>;
pub type EigenSystem = qmat::EigenSystem<f64>;
pub type KrausChannel = channels::KrausChannel<f64>;
pub type MeasurementInstrument = channels::MeasurementInstrument<f64>;
pub type ChiMatrix = channels::ChiMatrix<f64>;
pub type ProtocolConfig = protocol::ProtocolConfig<f64>;
pub type ProtocolEnsemble = protocol::ProtocolEnsemble<f64>;
pub type TradeoffReport = protocol::TradeoffReport<f64>;
pub type WorkPath = workstats::WorkPath<f64>;
pub type WorkDistribution = workstats::WorkDistribution<f64>;
