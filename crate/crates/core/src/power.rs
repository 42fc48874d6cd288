//! Power evaluation for large exponents.
//!
//! `u^q` is needed for `q` up to ~10^4 with `u` close to 1, and near zero on the
//! boundary layer. Values below [`UNDERFLOW_GUARD`] map to an exact zero instead
//! of subnormal noise; overflow saturates at `f64::MAX`.

use crate::error::{Error, Result};

pub const UNDERFLOW_GUARD: f64 = 1e-300;

/// `(base^exponent, exponent * base^(exponent - 1))` for `base ≥ 0`, `exponent ≥ 1`.
#[inline]
pub fn stable_pow(base: f64, exponent: f64) -> Result<(f64, f64)> {
    if base < 0.0 || base.is_nan() {
        return Err(Error::NegativeValue {
            index: 0,
            value: base,
        });
    }
    Ok(pow_unchecked(base, exponent))
}

/// [`stable_pow`] without the sign check; callers guarantee `base ≥ 0`.
#[inline]
pub(crate) fn pow_unchecked(base: f64, exponent: f64) -> (f64, f64) {
    if exponent == 1.0 {
        return (base, 1.0);
    }
    if base <= UNDERFLOW_GUARD {
        return (0.0, 0.0);
    }
    let log_b = base.ln();
    let value = saturate((exponent * log_b).exp());
    let derivative = saturate(exponent * ((exponent - 1.0) * log_b).exp());
    (value, derivative)
}

#[inline]
fn saturate(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// `base^exponent` alone, same guards as [`stable_pow`].
#[inline]
pub(crate) fn pow_value(base: f64, exponent: f64) -> f64 {
    pow_unchecked(base.max(0.0), exponent).0
}
