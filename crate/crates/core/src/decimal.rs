//! Fixed-significance decimal rendering of exact values, including
//! multiples of powers of π.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactalg::{PiScaled, Rational};

/// π to 100 decimal places.
pub const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

/// Significant digits used for every rendered closed form.
pub const SIGNIFICANT_DIGITS: usize = 50;

/// π truncated to [`PI_DIGITS`] as an exact fraction (relative error below 10⁻¹⁰⁰).
pub fn pi_rational() -> Rational {
    let (whole, frac) = PI_DIGITS.split_once('.').expect("decimal point");
    let digits = BigInt::from_str(&format!("{whole}{frac}")).expect("digits");
    Rational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
}

/// `coefficient · π^p` as a rational approximation good to ~100 digits.
pub fn pi_scaled_approx(value: &PiScaled) -> Rational {
    value.coefficient() * num_traits::pow(pi_rational(), value.pi_power() as usize)
}

pub fn pi_scaled_f64(value: &PiScaled) -> f64 {
    pi_scaled_approx(value).to_f64().expect("finite")
}

pub fn pi_scaled_decimal(value: &PiScaled) -> String {
    to_decimal(&pi_scaled_approx(value), SIGNIFICANT_DIGITS)
}

/// Positional decimal with `significant` digits, rounded half away from zero.
pub fn to_decimal(value: &Rational, significant: usize) -> String {
    assert!(significant > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let mag = value.abs();
    let ten = BigInt::from(10u32);

    // exponent e with 10^e <= mag < 10^(e+1)
    let mut e = mag.numer().to_string().len() as i64 - mag.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(ten.pow(k as u32))
        } else {
            Rational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    if mag < pow10(e) {
        e -= 1;
    }
    let scale_exp = significant as i64 - 1 - e;
    let mut digits = round_half_away(&(&mag * pow10(scale_exp)));
    if digits.to_string().len() > significant {
        // rounding carried into a new leading digit
        e += 1;
        digits = round_half_away(&(&mag * pow10(significant as i64 - 1 - e)));
    }
    let mut text = digits.to_string();
    let int_len = e + 1;
    let body = if int_len <= 0 {
        format!("0.{}{}", "0".repeat((-int_len) as usize), text)
    } else if int_len as usize >= text.len() {
        text.push_str(&"0".repeat(int_len as usize - text.len()));
        text
    } else {
        let (a, b) = text.split_at(int_len as usize);
        format!("{a}.{b}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn round_half_away(value: &Rational) -> BigInt {
    let (q, r) = value.numer().div_rem(value.denom());
    if BigInt::from(2) * r >= *value.denom() {
        q + 1
    } else {
        q
    }
}
