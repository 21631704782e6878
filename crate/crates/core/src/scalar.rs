//! Exact ordered-field scalars.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. Only exact
//! rational types implement it: the order relations the laboratory checks
//! are decided with zero tolerance, which rules out floating point.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

/// An exact ordered field element.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + FromStr + Send + Sync + 'static
{
    /// `numer / denom`; panics on a zero denominator.
    fn ratio(numer: i64, denom: i64) -> Self;

    /// Smallest integer `n >= self`, saturated to `u64`. Negative values map to 0.
    fn ceil_u64(&self) -> u64;

    fn is_integral(&self) -> bool;

    fn from_u64(n: u64) -> Self {
        Self::ratio(n as i64, 1)
    }

    /// Arithmetic midpoint.
    fn midpoint(&self, other: &Self) -> Self {
        (self.clone() + other.clone()) / (Self::one() + Self::one())
    }

    fn min_of(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn max_of(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Positive part `max(self, 0)`.
    fn pos(&self) -> Self {
        self.max_of(&Self::zero())
    }
}

macro_rules! impl_scalar_for_ratio {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(<$int>::from(numer), <$int>::from(denom))
            }

            fn ceil_u64(&self) -> u64 {
                if self.is_negative() {
                    return 0;
                }
                self.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
            }

            fn is_integral(&self) -> bool {
                self.is_integer()
            }
        }
    };
}

impl_scalar_for_ratio!(i64);
impl_scalar_for_ratio!(i128);
impl_scalar_for_ratio!(BigInt);

/// Parses `"p/q"` or `"p"`.
pub fn parse_scalar<S: Scalar>(text: &str) -> Option<S> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: S = n.trim().parse().ok()?;
        let d: S = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(n / d)
    } else {
        t.parse().ok()
    }
}
