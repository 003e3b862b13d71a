//! Quantum 6j symbols at roots of unity for the unrolled quantum group of sl(2),
//! with the associated graph invariants and volume asymptotics.

pub mod cgc;
pub mod error;
pub mod graphinv;
pub mod qarith;
pub mod repcat;
pub mod sixj;
pub mod verify;
pub mod volume;

pub use error::QError;
pub use qarith::{LogComplex, RootContext, C64};
pub use repcat::{Color, RepOperator};
