//! Exact rational scalars.
//!
//! All edge lengths, distances, Busemann values and cross-ratios in this
//! crate are arbitrary-precision rationals, so every metric identity can be
//! asserted with `==` instead of a tolerance.  Floating point only enters
//! through the spectral layer (`patterson`) and the Monte Carlo layer
//! (`dynamics`).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational (`d != 0`).
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Lossy conversion for the floating-point layers.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Parses an edge-length literal.
///
/// Accepted forms: an integer `"3"`, a fraction `"p/q"`, or a decimal
/// `"1.25"`.  Decimals are stored exactly (scaled by a power of ten) but
/// flagged, so downstream arithmeticity verdicts know the input was only a
/// truncation of the intended real number.  Returns `(value, was_decimal)`.
pub fn parse_length(text: &str) -> Result<(Rat, bool), String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty length literal".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok((Rat::new(n, d), false));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let whole = if whole.is_empty() { "0" } else { whole };
        let sign = if whole.starts_with('-') { -1 } else { 1 };
        let w: BigInt = whole
            .parse()
            .map_err(|_| format!("bad decimal in {s:?}"))?;
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad decimal in {s:?}"));
        }
        let f: BigInt = frac.parse().expect("digits");
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let value = Rat::new(w * &scale + BigInt::from(sign) * f, scale);
        return Ok((value, true));
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad integer in {s:?}"))?;
    Ok((Rat::from_integer(n), false))
}

/// Greatest common divisor of a set of rationals: the largest `c` with every
/// input an integer multiple of `c`.  Zeros are ignored; returns `None` if no
/// nonzero input exists.
pub fn rational_gcd<'a, I: IntoIterator<Item = &'a Rat>>(values: I) -> Option<Rat> {
    let mut acc: Option<Rat> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let v = v.abs();
        acc = Some(match acc {
            None => v,
            // Over a common denominator L: gcd(a/L, b/L) = gcd(a, b)/L.
            Some(g) => {
                let lcm_den = g.denom().lcm(v.denom());
                let a = g.numer() * (&lcm_den / g.denom());
                let b = v.numer() * (&lcm_den / v.denom());
                Rat::new(a.gcd(&b), lcm_den)
            }
        });
    }
    acc
}

/// True when `x` is an integer multiple of `c`.
pub fn is_multiple_of(x: &Rat, c: &Rat) -> bool {
    if c.is_zero() {
        return x.is_zero();
    }
    (x / c).is_integer()
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn display(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_literal_forms() {
        assert_eq!(parse_length("3").unwrap(), (rat(3), false));
        assert_eq!(parse_length("3/2").unwrap(), (ratio(3, 2), false));
        assert_eq!(parse_length("1.25").unwrap(), (ratio(5, 4), true));
        assert_eq!(parse_length("-0.5").unwrap(), (ratio(-1, 2), true));
        assert!(parse_length("1/0").is_err());
        assert!(parse_length("abc").is_err());
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rational_gcd([rat(2), rat(3)].iter()), Some(rat(1)));
        assert_eq!(
            rational_gcd([rat(1), ratio(3, 2)].iter()),
            Some(ratio(1, 2))
        );
        assert_eq!(rational_gcd([rat(0)].iter()), None);
        assert_eq!(
            rational_gcd([ratio(4, 6), ratio(10, 6)].iter()),
            Some(ratio(1, 3))
        );
    }
}
