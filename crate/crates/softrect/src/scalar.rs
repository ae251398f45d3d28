//! Numeric foundations: the exact rational scalar, the generic weight
//! trait used by the subsequence solvers, and rational string I/O.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational scalar used by all geometry and objective arithmetic.
pub type Rational = BigRational;

/// Arbitrary-precision integer backing [`Rational`].
pub type Int = BigInt;

/// Cost scalar for the least-weight subsequence solvers.
///
/// The solvers only add weights and compare them, so any ordered additive
/// type works: `Rational` for exact runs, `i128`/[`Int`] for scaled integer
/// weights on the fast path, `f64` for synthetic weight functions in tests.
pub trait Weight: Clone + PartialOrd + num_traits::Zero {}

impl<T> Weight for T where T: Clone + PartialOrd + num_traits::Zero {}

/// Shorthand for an integer-valued rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `p / q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses an integer string or a `p/q` fraction with positive denominator.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let (num_part, den_part) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (text, None),
    };
    let numer: BigInt = num_part
        .parse()
        .map_err(|_| Error::MalformedRational(text.to_string()))?;
    let denom: BigInt = match den_part {
        Some(q) => q
            .parse()
            .map_err(|_| Error::MalformedRational(text.to_string()))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::ZeroDenominator(text.to_string()));
    }
    if denom.sign() == Sign::Minus {
        return Err(Error::MalformedRational(text.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

/// Renders a rational in lowest terms: `p` when integral, `p/q` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest-`f64` conversion; infinite only for astronomically large values.
pub fn rational_to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        let numer = value.numer().to_f64().unwrap_or(f64::INFINITY);
        let denom = value.denom().to_f64().unwrap_or(f64::INFINITY);
        numer / denom
    })
}

/// Formats with six significant digits, the precision used in reports.
pub fn sig6(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let text = format!("{value:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

/// Largest integer whose square does not exceed `n`.
pub fn isqrt_floor(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut root = (n as f64).sqrt() as u64;
    while root.saturating_mul(root) > n {
        root -= 1;
    }
    while (root + 1).saturating_mul(root + 1) <= n {
        root += 1;
    }
    root
}

/// Smallest integer whose square is at least `n`.
pub fn isqrt_ceil(n: u64) -> u64 {
    let floor = isqrt_floor(n);
    if floor * floor == n {
        floor
    } else {
        floor + 1
    }
}
