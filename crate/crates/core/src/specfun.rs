//! Exponential integral `E1` and the scaled product `e^x E1(x)`.
//!
//! Both functions use the power series around zero for `x <= 1` and the
//! modified-Lentz continued fraction for `x > 1`. The scaled form never
//! evaluates `e^x` on the continued-fraction branch, so it stays finite for
//! arbitrarily large arguments.

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_EPS: f64 = 1e-16;
// The Lentz ratio hovers within one ulp of 1 once converged.
const FRACTION_EPS: f64 = f64::EPSILON;
const MAX_TERMS: usize = 200;
const TINY: f64 = 1e-300;

fn check_domain(x: f64, name: &'static str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(x, name))
    }
}

/// `E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)`, valid for small `x`.
fn e1_series(x: f64) -> Result<f64> {
    let head = -EULER_GAMMA - libm::log(x);
    let mut sum = 0.0;
    let mut power_over_fact = 1.0;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        power_over_fact *= -x / kf;
        let term = power_over_fact / kf;
        sum += term;
        if libm::fabs(term) < SERIES_EPS * libm::fabs(head - sum) {
            return Ok(head - sum);
        }
    }
    Err(Error::NoConvergence("E1 power series", MAX_TERMS))
}

/// `e^x E1(x)` from the continued fraction `1/(x+1- 1/(x+3- 4/(x+5- …)))`.
fn scaled_e1_fraction(x: f64) -> Result<f64> {
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_TERMS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if libm::fabs(delta - 1.0) <= FRACTION_EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence("E1 continued fraction", MAX_TERMS))
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for finite `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_domain(x, "exp_integral_e1")?;
    if x <= 1.0 {
        e1_series(x)
    } else {
        Ok(scaled_e1_fraction(x)? * libm::exp(-x))
    }
}

/// `e^x E1(x)` for finite `x > 0`, without overflow for large `x`.
///
/// This is the expected value of `ln(1 + |h|²/x)` for unit-variance
/// circularly-symmetric Gaussian `h`; it lies strictly between `1/(x+1)`
/// and `1/x` and is strictly decreasing.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    check_domain(x, "exp_scaled_e1")?;
    if x <= 1.0 {
        Ok(libm::exp(x) * e1_series(x)?)
    } else {
        scaled_e1_fraction(x)
    }
}
