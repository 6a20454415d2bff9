//! Exact scalars, vectors and matrices over ℚ and ℚ(√−1).

mod gaussian;
mod matrix;
mod rational;

pub use gaussian::GaussianRational;
pub use matrix::{elementary_divisors, real_projection_span, DimensionMismatch, Echelon, RatMatrix};
pub use rational::{common_denominator, dot, primitive_integer, ParseRationalError, Rational};

pub type RatVector = Vec<Rational>;

pub fn rat_vec(v: &[i64]) -> RatVector {
    v.iter().map(|&x| Rational::from(x)).collect()
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Rational::to_f64).collect()
}
