//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Synthesis, density bookkeeping and propagation only need field
//! arithmetic plus ordering, so they accept any [`Scalar`], including exact
//! rationals. Spectral analysis needs square roots and is bounded by
//! [`RealScalar`].

use std::fmt;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element usable by the synthesis and propagation code.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Slack used when validating probability sums and column sums.
    fn tolerance() -> Self;

    /// Converts a count; counts are small enough to be exact for every impl.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }

    /// Converts a literal, panicking if it cannot be represented.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable as scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for Rational64 {
    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }

    fn lit(value: f64) -> Self {
        // Decimal literals such as 0.05 should map to 1/20, not to the
        // nearest binary fraction.
        let scale = 1_000_000_000i64;
        let scaled = (value * scale as f64).round();
        if (scaled / scale as f64 - value).abs() <= f64::EPSILON * value.abs().max(1.0) {
            Rational64::new(scaled as i64, scale)
        } else {
            Rational64::from_f64(value).expect("literal representable as rational")
        }
    }
}

/// Floating-point scalar for the eigenvalue routines.
pub trait RealScalar: Scalar + Float {}

impl<T: Scalar + Float> RealScalar for T {}

/// Sums a slice without any compensation; every caller relies on the plain
/// left-to-right order so that results are reproducible bit for bit.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v)
}
