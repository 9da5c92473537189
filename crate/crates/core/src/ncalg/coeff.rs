use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient field for series.
///
/// Two implementations ship: `Complex64` for numerical work (coefficients with
/// modulus at most [`FLOAT_PRUNE`] are dropped) and `BigRational` for exact
/// oracles (only true zeros are dropped).
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn modulus(&self) -> f64;

    /// Whether a stored coefficient should be pruned.
    fn negligible(&self) -> bool;

    fn from_f64(x: f64) -> Self;

    fn conj(&self) -> Self;

    fn to_complex(&self) -> Complex64;

    /// Text form of the real and imaginary parts, round-trip exact.
    fn to_text(&self) -> (String, String);

    fn from_text(re: &str, im: &str) -> Option<Self>;
}

pub const FLOAT_PRUNE: f64 = 1e-15;

impl Coeff for Complex64 {
    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn negligible(&self) -> bool {
        self.norm() <= FLOAT_PRUNE
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn to_text(&self) -> (String, String) {
        // `{:?}` on f64 prints the shortest string that parses back to the
        // same bits.
        (format!("{:?}", self.re), format!("{:?}", self.im))
    }

    fn from_text(re: &str, im: &str) -> Option<Self> {
        Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
    }
}

/// Exact rationals carry no imaginary part.
impl Coeff for BigRational {
    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_text(&self) -> (String, String) {
        (self.to_string(), "0".to_string())
    }

    fn from_text(re: &str, im: &str) -> Option<Self> {
        let im: BigRational = im.parse().ok()?;
        if !im.is_zero() {
            return None;
        }
        re.parse().ok()
    }
}

/// Exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips_bits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let c = Complex64::new(x, -x / 7.0);
            let (re, im) = c.to_text();
            let back = Complex64::from_text(&re, &im).unwrap();
            assert_eq!(back.re.to_bits(), c.re.to_bits());
            assert_eq!(back.im.to_bits(), c.im.to_bits());
        }
    }

    #[test]
    fn rational_text_round_trips() {
        let r = rational(-17, 34);
        let (re, im) = r.to_text();
        assert_eq!(re, "-1/2");
        assert_eq!(BigRational::from_text(&re, &im), Some(r));
        assert_eq!(BigRational::from_text("1", "1/2"), None);
    }

    #[test]
    fn pruning_thresholds() {
        assert!(Complex64::new(1e-16, 0.0).negligible());
        assert!(!Complex64::new(1e-14, 0.0).negligible());
        assert!(!rational(1, 1_000_000_000_000_000_000).negligible());
    }
}
