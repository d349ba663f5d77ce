//! Exact scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator after every operation. Text form is `p/q` (or `p` when
//! the denominator is one), which is also the JSON encoding used everywhere.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use num_rational::BigRational as Rational;

use crate::error::{Error, Result};

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`; panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p`, `-p`, `p/q`. Whitespace around the parts is ignored.
pub fn parse(s: &str) -> Result<Rational> {
    let bad = || Error::schema("", format!("`{s}` is not a rational of the form p/q"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::schema("", format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse(" 2 / -4 ").unwrap(), frac(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn canonical_form() {
        let r = frac(10, -4);
        assert_eq!(r.numer(), &BigInt::from(-5));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format(&r), "-5/2");
        assert_eq!(format(&int(7)), "7");
    }

    proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = frac(n, d);
            prop_assert_eq!(parse(&format(&r)).unwrap(), r);
        }

        #[test]
        fn field_axioms(a in -50i64..50, b in -50i64..50, c in 1i64..50, d in 1i64..50) {
            let x = frac(a, c);
            let y = frac(b, d);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x / &y) * &y, x.clone());
            }
            let g = num_integer::Integer::gcd(x.numer(), x.denom());
            prop_assert!(g.is_one());
            prop_assert!(x.denom() > &BigInt::zero());
        }
    }
}
