//! Exact basic-LP relaxations for finite-domain Min CSPs and valued CSPs,
//! with a polymorphism lab and the lattice and three-element rounding
//! schemes.
//!
//! Everything is generic over [`scalar::ExactField`]; the aliases below fix
//! the scalar to arbitrary-precision rationals.

pub mod blp;
pub mod csp;
pub mod error;
pub mod gadgets;
pub mod io;
pub mod polylab;
pub mod ratlp;
pub mod rounding;
pub mod scalar;

pub use error::{Caps, Error, Result};
pub use scalar::ExactField;

pub type Rational = num_rational::BigRational;
pub type Instance = csp::Instance<Rational>;
pub type Language = csp::Language<Rational>;
pub type CostFunction = csp::CostFunction<Rational>;
pub type Payload = csp::Payload<Rational>;
pub type LPSolution = blp::LPSolution<Rational>;
pub type LinearProgram = ratlp::LinearProgram<Rational>;
pub type FractionalOperation = polylab::FractionalOperation<Rational>;
pub type RoundingReport = rounding::RoundingReport<Rational>;
