//! Normal distribution density and distribution functions.
//!
//! The `std_*` variants work on a standardized argument and skip parameter
//! validation; they are the ones used in integrand hot loops.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use super::special::{erfc, log_erfc};
use crate::{Error, Result};

/// ln(√(2π))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

fn check_sd(sd: f64) -> Result<()> {
    if sd > 0.0 && sd.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "normal standard deviation must be positive and finite, got {sd}"
        )))
    }
}

#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[inline]
pub fn std_normal_log_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// ln Φ(z), accurate deep into the lower tail.
#[inline]
pub fn std_normal_log_cdf(z: f64) -> f64 {
    if z < -1.0 {
        log_erfc(-z * FRAC_1_SQRT_2) - LN_2
    } else {
        (-0.5 * erfc(z * FRAC_1_SQRT_2)).ln_1p()
    }
}

/// ln(1 - Φ(z)).
#[inline]
pub fn std_normal_log_sf(z: f64) -> f64 {
    std_normal_log_cdf(-z)
}

pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> Result<f64> {
    check_sd(sd)?;
    Ok(std_normal_pdf((x - mean) / sd) / sd)
}

pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> Result<f64> {
    check_sd(sd)?;
    Ok(std_normal_cdf((x - mean) / sd))
}

pub fn normal_log_cdf(x: f64, mean: f64, sd: f64) -> Result<f64> {
    check_sd(sd)?;
    Ok(std_normal_log_cdf((x - mean) / sd))
}

pub fn normal_log_sf(x: f64, mean: f64, sd: f64) -> Result<f64> {
    check_sd(sd)?;
    Ok(std_normal_log_sf((x - mean) / sd))
}
