//! Upper tail of the central F distribution.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `P(F > f_value)` for `F ~ F(df1, df2)`.
///
/// Uses `P(F > f) = I_x(df2/2, df1/2)` with `x = df2 / (df2 + df1 f)`.
pub fn f_tail(f_value: f64, df1: usize, df2: usize) -> Result<f64> {
    if f_value.is_nan() || f_value < 0.0 {
        return Err(Error::input(format!("F value must be >= 0, got {f_value}")));
    }
    if df1 == 0 || df2 == 0 {
        return Err(Error::input("F degrees of freedom must be >= 1"));
    }
    if f_value == 0.0 {
        return Ok(1.0);
    }
    if f_value.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let x = d2 / (d2 + d1 * f_value);
    Ok(regularized_beta(d2 / 2.0, d1 / 2.0, x).clamp(0.0, 1.0))
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `0 <= x <= 1`.
pub fn regularized_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // The continued fraction converges fast only below the mean.
    if x > (a + 1.0) / (a + b + 2.0) {
        1.0 - beta_cf_scaled(b, a, 1.0 - x)
    } else {
        beta_cf_scaled(a, b, x)
    }
}

/// `x^a (1-x)^b / (a B(a,b))` times the Lentz-evaluated continued fraction.
fn beta_cf_scaled(a: f64, b: f64, x: f64) -> f64 {
    let ln_front =
        a * x.ln() + b * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    let front = ln_front.exp() / a;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + even * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + even / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + odd * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + odd / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front * h
}
