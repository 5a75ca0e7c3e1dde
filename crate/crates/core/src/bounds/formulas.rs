//! Closed-form distortion bounds as functions of the derived constants.

use crate::error::{check_range, Error, Result};
use crate::models::GFunction;
use crate::rules::GOLDEN_LAMBDA;

use super::{g_inverse, DerivedConstants};

/// Default slack exponent for the finite-`n` bounds.
pub const DEFAULT_EPSILON: f64 = 0.1;

fn check_m(m: usize, min: usize) -> Result<()> {
    if m < min {
        return Err(Error::Precondition(format!("m = {m} but at least {min} candidates are required")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfDomain { name: "eps", value: eps, domain: "(0, 1/2)" });
    }
    Ok(())
}

/// `1 / (1 - n^-(1/2 - eps))`, the finite-sample inflation of a vote share.
fn inflation(n: f64, eps: f64) -> f64 {
    1.0 / (1.0 - n.powf(-(0.5 - eps)))
}

/// `max(m gamma_mid - 1, m gamma_out + 1)`.
pub fn plurality_bound_limit(m: usize, c: &DerivedConstants) -> f64 {
    let m = m as f64;
    (m * c.gamma_mid - 1.0).max(m * c.gamma_out + 1.0)
}

/// Plurality bound for finite `n >= m^2`.
pub fn plurality_bound_finite(n: f64, m: usize, eps: f64, c: &DerivedConstants) -> Result<f64> {
    check_m(m, 2)?;
    check_epsilon(eps)?;
    let mf = m as f64;
    if !(n >= mf * mf) || !n.is_finite() {
        return Err(Error::Precondition(format!("n = {n} must be at least m^2 = {}", mf * mf)));
    }
    let exponent = (-n.powf(0.5 + eps) + 2.0 * mf) / ((2.0 * n.powf(0.5 - eps) - 1.0) * mf);
    let tail = mf * (mf - 1.0) * (c.gamma_mid + c.gamma_out) * exponent.exp();
    let k = inflation(n, eps);
    Ok(tail + (mf * c.gamma_mid * k - 1.0).max(mf * c.gamma_out * k + 1.0))
}

/// `max((2 gamma_mid - 1)^2, (2 gamma_out + 1)^2)`.
pub fn copeland_bound_limit(c: &DerivedConstants) -> f64 {
    (2.0 * c.gamma_mid - 1.0).powi(2).max((2.0 * c.gamma_out + 1.0).powi(2))
}

/// Copeland bound for finite `n >= 4`.
pub fn copeland_bound_finite(n: f64, m: usize, eps: f64, c: &DerivedConstants) -> Result<f64> {
    check_m(m, 2)?;
    check_epsilon(eps)?;
    if !(n >= 4.0) || !n.is_finite() {
        return Err(Error::Precondition(format!("n = {n} must be at least 4")));
    }
    let mf = m as f64;
    let exponent = (-n.powf(0.5 + eps) + 8.0) / (2.0 * (2.0 * n.powf(0.5 - eps) - 1.0));
    let tail = 4.0 * mf * (mf - 1.0) * exponent.exp() * (c.gamma_mid + c.gamma_out).powi(2);
    let k = inflation(n, eps);
    Ok(tail + (2.0 * c.gamma_mid * k - 1.0).powi(2).max((2.0 * c.gamma_out * k + 1.0).powi(2)))
}

/// Weighted-uncovered bound
/// `max((gm/(1-l) - 1)(gm/l - 1), (go/(1-l) + 1)(go/l + 1))`.
pub fn wu_bound_limit(c: &DerivedConstants, lambda: f64) -> Result<f64> {
    check_range("lambda", lambda, 0.5, 1.0 - f64::EPSILON, "[0.5, 1)")?;
    let (gm, go) = (c.gamma_mid, c.gamma_out);
    let mid = (gm / (1.0 - lambda) - 1.0) * (gm / lambda - 1.0);
    let out = (go / (1.0 - lambda) + 1.0) * (go / lambda + 1.0);
    Ok(mid.max(out))
}

/// [`wu_bound_limit`] at the golden-ratio parameter.
pub fn wu_bound_golden(c: &DerivedConstants) -> f64 {
    wu_bound_limit(c, GOLDEN_LAMBDA).expect("golden lambda is in range")
}

/// Random Dictator upper bound `(m - 1) gamma_mid + 1`.
pub fn rd_upper_bound(m: usize, c: &DerivedConstants) -> Result<f64> {
    check_m(m, 2)?;
    Ok((m as f64 - 1.0) * c.gamma_mid + 1.0)
}

/// Random Dictator lower bound `2 + 1/g^-1(1/(m-1)) - 2/n`. Pass
/// `n = inf` for the large-election limit.
pub fn rd_lower_bound(m: usize, n: f64, g: &GFunction) -> Result<f64> {
    check_m(m, 3)?;
    if !(n >= 2.0) {
        return Err(Error::Precondition(format!("n = {n} must be at least 2")));
    }
    let r = g_inverse(g, 1.0 / (m as f64 - 1.0))?;
    Ok(2.0 + 1.0 / r - 2.0 / n)
}

/// Random Dictator lower bound under Plackett-Luce, `1 + (m-1)^(1/theta) / 2`.
pub fn rd_lower_bound_pl(m: usize, theta: f64) -> Result<f64> {
    check_m(m, 2)?;
    GFunction::pl(theta)?;
    Ok(1.0 + (m as f64 - 1.0).powf(1.0 / theta) / 2.0)
}

/// Growth order `m^max(1 - 2/theta, 0)` of the Borda distortion.
pub fn borda_order(m: usize, theta: f64) -> Result<f64> {
    check_m(m, 2)?;
    GFunction::pl(theta)?;
    Ok((m as f64).powf((1.0 - 2.0 / theta).max(0.0)))
}

/// Lower bound `max(2 gamma_mid - 1, 2 gamma_out + 1)` for every
/// deterministic rule.
pub fn generic_det_lower(c: &DerivedConstants) -> f64 {
    (2.0 * c.gamma_mid - 1.0).max(2.0 * c.gamma_out + 1.0)
}
