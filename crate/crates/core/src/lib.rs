#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod moyal;
pub mod numeric;
pub mod phase;
pub mod qdiff;
pub mod qmoyal;
pub mod ring;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};

/// Default exact scalar.
pub type Rational = num_rational::BigRational;
/// Coefficient ring over the default scalar.
pub type Coeff = ring::Coefficient<Rational>;
/// Phase-space polynomial over the default scalar.
pub type Poly = phase::PhasePoly<Rational>;
