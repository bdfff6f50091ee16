//! Floating-point abstraction shared by the scoring, metric and training code.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::num::ParseFloatError;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for feature values, weights and scores: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + FromStr<Err = ParseFloatError>
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Dot product of two equally long slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

/// Shortest round-trip decimal, padded with trailing zeros to at least six
/// significant digits. Never uses exponent notation.
pub fn format_decimal<T: Scalar>(x: T) -> String {
    let mut s = format!("{x}");
    if !x.is_finite() {
        return s;
    }
    let digits = significant_digits(&s);
    if digits < 6 {
        if !s.contains('.') {
            s.push('.');
        }
        for _ in digits..6 {
            s.push('0');
        }
    }
    s
}

fn significant_digits(s: &str) -> usize {
    let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    if trimmed.is_empty() {
        // zero: count the fractional digits, so "0.000000" has six
        return s.split_once('.').map_or(0, |(_, frac)| frac.len());
    }
    trimmed.len()
}
