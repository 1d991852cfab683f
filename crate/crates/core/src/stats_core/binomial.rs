//! Log binomial coefficients for arguments up to ~10⁷ and beyond.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Below this size ln(n!) is tabulated by direct summation.
const TABLE_LEN: usize = 64;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: std::sync::OnceLock<[f64; TABLE_LEN]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for i in 1..TABLE_LEN {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

/// Stirling remainder δ(n) = ln n! − (n ln n − n + ½ ln(2πn)), for n ≥ 1.
fn stirling_remainder(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        let x = n as f64;
        return ln_factorial_table()[n as usize] - (x * x.ln() - x + 0.5 * (2.0 * PI * x).ln());
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/12x − 1/360x³ + 1/1260x⁵ − 1/1680x⁷ + 1/1188x⁹
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// Natural log of n!.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + stirling_remainder(n)
}

/// Natural log of C(n, j).
///
/// Small complements are summed directly; otherwise the Stirling form is
/// rearranged as `−j ln(j/n) − m ln(1 − j/n) + ½ ln(n / 2πjm) + δ(n) − δ(j) − δ(m)`
/// (m = n − j), whose leading terms are both non-negative, so nothing large
/// cancels the way `lnΓ(n+1) − lnΓ(j+1) − lnΓ(m+1)` does.
pub fn log_binomial(n: u64, j: u64) -> Result<f64> {
    if j > n {
        return Err(Error::Domain(format!(
            "log_binomial requires 0 <= j <= n, got n={n}, j={j}"
        )));
    }
    let small = j.min(n - j);
    if small == 0 {
        return Ok(0.0);
    }
    if small < 32 {
        let base = (n - small) as f64;
        let mut acc = 0.0;
        for i in 1..=small {
            acc += (base / i as f64).ln_1p();
        }
        return Ok(acc);
    }
    let (nf, jf) = (n as f64, small as f64);
    let m = n - small;
    let mf = m as f64;
    let frac = jf / nf;
    Ok(-jf * frac.ln() - mf * (-frac).ln_1p() + 0.5 * (nf / (2.0 * PI * jf * mf)).ln()
        + stirling_remainder(n)
        - stirling_remainder(small)
        - stirling_remainder(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn exact_binomial(n: u64, j: u64) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for i in 0..j {
            acc *= BigUint::from(n - i);
            acc /= BigUint::from(i + 1);
        }
        acc
    }

    fn big_ln(x: &BigUint) -> f64 {
        // ln of a big integer via its leading 60 bits
        let bits = x.bits();
        if bits <= 60 {
            return (x.iter_u64_digits().next().unwrap_or(0) as f64).ln();
        }
        let shift = bits - 60;
        let top: BigUint = x >> shift;
        (top.iter_u64_digits().next().unwrap() as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn zero_and_full_are_zero() {
        for n in [0, 1, 7, 1000, 10_000_000] {
            assert_eq!(log_binomial(n, 0).unwrap(), 0.0);
            assert_eq!(log_binomial(n, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(matches!(log_binomial(5, 6), Err(Error::Domain(_))));
    }

    #[test]
    fn symmetric() {
        for (n, j) in [(40, 3), (1000, 37), (123_456, 60_000), (10_000_000, 17)] {
            assert_eq!(log_binomial(n, j).unwrap(), log_binomial(n, n - j).unwrap());
        }
    }

    #[test]
    fn exact_for_small_n() {
        for n in 0..=30u64 {
            for j in 0..=n {
                let exact = exact_binomial(n, j).to_string().parse::<f64>().unwrap();
                let got = log_binomial(n, j).unwrap().exp();
                assert!(((got - exact) / exact).abs() < 1e-13, "C({n},{j})");
            }
        }
    }

    #[test]
    fn million_choose_two_from_big_integer() {
        let exact = exact_binomial(1_000_000, 2);
        assert_eq!(exact.to_string(), "499999500000");
        let want = big_ln(&exact);
        let got = log_binomial(1_000_000, 999_998).unwrap();
        assert!(((got - want) / want).abs() < 1e-10);
        assert!(((got - 26.937_872_935_368_102_9) / got).abs() < 1e-14);
    }

    #[test]
    fn large_arguments_against_big_integer_oracle() {
        for (n, j) in [(1000u64, 500u64), (990, 37), (5000, 64), (20_000, 2_500)] {
            let want = big_ln(&exact_binomial(n, j));
            let got = log_binomial(n, j).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "C({n},{j}): {got} vs {want}");
        }
    }

    #[test]
    fn ten_million_half() {
        // 40-digit reference for ln C(10⁷, 5·10⁶)
        let want = 6_931_463.520_760_249_970_284_99;
        let got = log_binomial(10_000_000, 5_000_000).unwrap();
        assert!(((got - want) / want).abs() < 1e-12);
    }

    #[test]
    fn ln_factorial_continuous_across_table_edge() {
        for n in 60..70u64 {
            let direct: f64 = (1..=n).map(|i| (i as f64).ln()).sum();
            assert!((ln_factorial(n) - direct).abs() < 1e-12 * direct);
        }
    }
}
