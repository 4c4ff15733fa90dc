use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact scalar of the rational backend.
pub type Rational = BigRational;

/// Parse `"p/q"` or a plain integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = |t: &str| Error::Input(format!("cannot parse rational entry {t:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad(text))?;
            let d: BigInt = den.trim().parse().map_err(|_| bad(text))?;
            if d.is_zero() {
                return Err(Error::Input(format!("zero denominator in {text:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = text.parse().map_err(|_| bad(text))?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Nearest f64 to an exact rational. Large numerators are handled by a
/// scaled division so that values far outside the integer f64 range still
/// convert with correct magnitude.
pub fn rational_to_f64(value: &Rational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on a log-scale reconstruction for extreme magnitudes.
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let bits_n = value.numer().bits() as i64;
    let bits_d = value.denom().bits() as i64;
    sign * ((bits_n - bits_d) as f64 * std::f64::consts::LN_2).exp()
}
