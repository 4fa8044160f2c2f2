//! Exact integer, rational and quadratic-field arithmetic for 2x2 maps.

pub mod matrix;
pub mod quadratic;
pub mod real;
pub mod spectral;

pub use matrix::IntMatrix2;
pub use quadratic::QuadraticReal;
pub use real::Real;
pub use spectral::{companion_u, normalize, spectral_analyze, HyperbolicMap, SpectralData};

pub use num_rational::BigRational as Rational;
