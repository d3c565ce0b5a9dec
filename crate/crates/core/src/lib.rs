//! Finite quasi-pseudometric spaces and certificate-producing variational
//! principles with exact rational arithmetic.

pub mod cli;
pub mod error;
pub mod generator;
pub mod incompleteness;
pub mod objective;
pub mod order;
pub mod rational;
pub mod sequences;
pub mod space;
pub mod suite;
pub mod variational;
pub mod verify;

pub use error::{Error, ErrorKind, Precondition, Result};
pub use objective::Objective;
pub use rational::{ExtReal, Rational};
pub use space::{FiniteQPSpace, PointId, PointSet};
