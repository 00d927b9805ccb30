//! Exact rational scalars and vectors.
//!
//! Everything in the crate is computed over [`Rational`], an arbitrary
//! precision fraction kept in lowest terms with a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// A point of `Q^d`: strategy positions, price increments, separators.
pub type Vector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` reduced to lowest terms. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn vector(components: &[i64]) -> Vector {
    components.iter().map(|&c| int(c)).collect()
}

/// Parses an integer (`"-3"`), a decimal (`"0.125"`) or a fraction (`"7/16"`).
///
/// Decimals are converted exactly: `"0.1"` is `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let invalid = || ParseRationalError::Invalid(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = parse_integer(num.trim()).ok_or_else(invalid)?;
        let d: BigInt = parse_integer(den.trim()).ok_or_else(invalid)?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if (digits.is_empty() && frac.is_empty())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(invalid());
        }
        let mantissa: BigInt = format!("{}{}", if digits.is_empty() { "0" } else { digits }, frac)
            .parse()
            .map_err(|_| invalid())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_integer(s)
        .map(Rational::from_integer)
        .ok_or_else(invalid)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(v: &[Rational], factor: &Rational) -> Vector {
    v.iter().map(|x| x * factor).collect()
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Largest absolute component; zero for the zero vector.
pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter()
        .map(Signed::abs)
        .fold(Rational::zero(), |m, x| if x > m { x } else { m })
}

/// Rescales `v` so its largest absolute component is exactly one.
pub fn normalize_max(v: &[Rational]) -> Vector {
    let m = max_abs(v);
    if m.is_zero() {
        return v.to_vec();
    }
    let inv = Rational::one() / m;
    scale(v, &inv)
}

/// Display adapter rendering a vector as `[a, b, c]` with `p/q` components.
pub struct DisplayVector<'a>(pub &'a [Rational]);

impl fmt::Display for DisplayVector<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_literal_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-7/14").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("-.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(" 4/ 6 ").unwrap(), ratio(2, 3));
    }

    #[test]
    fn canonical_form_has_positive_denominator() {
        let r = parse_rational("3/-6").unwrap();
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(parse_rational("0/5").unwrap().denom(), &BigInt::from(1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_rational(""), Err(ParseRationalError::Empty)));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        for bad in ["abc", "1.2.3", "1e3", "--1", ".", "1/", "/2", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn normalize_max_puts_largest_component_at_one() {
        let v = normalize_max(&[int(-4), int(2), int(0)]);
        assert_eq!(v, vec![int(-1), ratio(1, 2), int(0)]);
        assert_eq!(normalize_max(&[int(0)]), vec![int(0)]);
    }
}
