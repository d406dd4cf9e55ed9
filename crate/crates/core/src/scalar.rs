//! Exact scalar abstraction.
//!
//! Every quantity in this crate (weights, costs, probabilities, LP values,
//! Lipschitz constants) is an element of an ordered field with exact
//! arithmetic. The algorithms are written against [`ExactField`] and the
//! crate root fixes the default instantiation to arbitrary-precision
//! rationals. Fixed-width rationals (`Ratio<i64>`, `Ratio<i128>`) are also
//! provided; they are faster but panic on overflow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// An ordered field with exact equality.
///
/// Floating point types deliberately do not implement this trait: the
/// simplex phase-one test, marginal consistency and the loss identity are
/// all asserted as exact equalities.
pub trait ExactField:
    Clone + Debug + Display + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    /// `numer / denom`; panics if `denom == 0`.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Builds a value from big integers. `None` when `denom == 0` or the
    /// value does not fit the representation.
    fn from_bigints(numer: BigInt, denom: BigInt) -> Option<Self>;

    /// Numerator in lowest terms (sign carried here).
    fn numer_big(&self) -> BigInt;

    /// Denominator in lowest terms, always positive.
    fn denom_big(&self) -> BigInt;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    /// `"num/den"`, including integers (`"3/1"`).
    fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.numer_big(), self.denom_big())
    }

    /// Parses `"num/den"` or a bare integer `"num"`.
    fn parse_ratio(s: &str) -> Result<Self, ParseRationalError> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let bad = || ParseRationalError(s.to_string());
        let n = BigInt::from_str(n).map_err(|_| bad())?;
        let d = BigInt::from_str(d).map_err(|_| bad())?;
        Self::from_bigints(n, d).ok_or_else(bad)
    }

    /// Exact conversion to a machine integer when the value is integral.
    fn to_integer_u64(&self) -> Option<u64> {
        if self.denom_big().is_one() {
            self.numer_big().to_u64()
        } else {
            None
        }
    }

    /// Lossy conversion for human-readable rendering only.
    fn to_f64_lossy(&self) -> f64 {
        let n = self.numer_big().to_f64().unwrap_or(f64::NAN);
        let d = self.denom_big().to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?} (expected \"num/den\")")]
pub struct ParseRationalError(pub String);

macro_rules! fixed_width_ratio {
    ($int:ty) => {
        impl ExactField for Ratio<$int> {
            fn from_ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(numer as $int, denom as $int)
            }

            fn from_bigints(numer: BigInt, denom: BigInt) -> Option<Self> {
                if denom.is_zero() {
                    return None;
                }
                let big = Ratio::new(numer, denom);
                let n: $int = big.numer().try_into().ok()?;
                let d: $int = big.denom().try_into().ok()?;
                Some(Ratio::new_raw(n, d))
            }

            fn numer_big(&self) -> BigInt {
                BigInt::from(*self.numer())
            }

            fn denom_big(&self) -> BigInt {
                BigInt::from(*self.denom())
            }
        }
    };
}

fixed_width_ratio!(i64);
fixed_width_ratio!(i128);

impl ExactField for Ratio<BigInt> {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_bigints(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Ratio::new(numer, denom))
        }
    }

    fn numer_big(&self) -> BigInt {
        self.numer().clone()
    }

    fn denom_big(&self) -> BigInt {
        self.denom().clone()
    }
}

/// Shorthand used throughout the crate.
#[cfg(test)]
pub(crate) fn q<T: ExactField>(numer: i64, denom: i64) -> T {
    T::from_ratio(numer, denom)
}

pub(crate) fn sum<'a, T: ExactField>(values: impl IntoIterator<Item = &'a T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v.clone())
}

/// Validates that `p` is a probability distribution.
pub(crate) fn is_distribution<T: ExactField>(p: &[T]) -> bool {
    !p.is_empty() && p.iter().all(|x| !x.is_negative()) && sum(p).is_one()
}
