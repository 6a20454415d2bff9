use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rational;

/// Element of ℚ(√−1). Serializes as `{"re": "p/q", "im": "r/s"}`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        GaussianRational { re: re.into(), im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    /// |z|² as a Gaussian rational with zero imaginary part.
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    /// Multiplication by √−1.
    pub fn mul_i(&self) -> Self {
        GaussianRational { re: -&self.im, im: self.re.clone() }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(GaussianRational { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}{}{:?}i)", self.re, if self.im.is_negative() { "" } else { "+" }, self.im)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GaussianRational {
        GaussianRational::new(a.into(), b.into())
    }

    #[test]
    fn conj_involution_and_norm() {
        let z = GaussianRational::new(Rational::new(1, 3), Rational::new(-5, 2));
        assert_eq!(z.conj().conj(), z);
        let n = z.norm_sqr();
        assert!(n.im.is_zero());
        assert_eq!(n.re, Rational::new(1, 9) + Rational::new(25, 4));
    }

    #[test]
    fn field_ops() {
        let a = g(1, 1);
        assert_eq!(&a * &a, g(0, 2));
        assert_eq!(a.mul_i(), g(-1, 1));
        assert_eq!(&a * &a.inv().unwrap(), g(1, 0));
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn json_shape() {
        let z = GaussianRational::new(Rational::new(1, 2), Rational::from(-1));
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"re":"1/2","im":"-1"}"#);
    }
}
