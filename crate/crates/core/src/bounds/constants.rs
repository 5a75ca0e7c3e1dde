use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{check_class_shape, GFunction};

pub const GOLDEN_ITERATIONS: usize = 200;
pub const GOLDEN_TOLERANCE: f64 = 1e-10;
/// Target for `|x g_branch'(x) - g_branch(x)|` at each maximizer.
pub const STATIONARITY_TOLERANCE: f64 = 1e-9;

/// `gamma_mid = sup g(x/(1-x))/x` over `(0, 1)` and
/// `gamma_out = sup g(x/(1+x))/x` over `(0, inf)`, with their maximizers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub gamma_mid: f64,
    pub gamma_out: f64,
    pub x_star_mid: f64,
    pub x_star_out: f64,
    pub g_id: String,
}

impl DerivedConstants {
    /// Limit of the Plackett-Luce constants as `theta -> inf`, the
    /// deterministic-voting case.
    pub fn deterministic_limit() -> Self {
        Self {
            gamma_mid: 2.0,
            gamma_out: 0.0,
            x_star_mid: 0.5,
            x_star_out: f64::INFINITY,
            g_id: "deterministic".into(),
        }
    }
}

/// Maximizes a unimodal `f` on `(lo, hi)`; returns the final bracket midpoint.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if b - a <= GOLDEN_TOLERANCE {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Refines a maximizer by bisecting the stationarity function `phi`, which
/// is positive left of the maximum and negative right of it. Falls back to
/// `x0` when no sign change is found nearby.
fn polish(phi: impl Fn(f64) -> f64, x0: f64, lo: f64, hi: f64) -> f64 {
    let mut step = 1e-9_f64.max(x0 * 1e-9);
    let (mut a, mut b) = (x0, x0);
    for _ in 0..80 {
        a = (x0 - step).max(lo + (x0 - lo) * 1e-3);
        b = (x0 + step).min(hi - (hi - x0) * 1e-3);
        if phi(a) >= 0.0 && phi(b) <= 0.0 {
            break;
        }
        step *= 2.0;
    }
    if !(phi(a) >= 0.0 && phi(b) <= 0.0) {
        return x0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if phi(mid) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    if phi(a).abs() <= phi(b).abs() {
        a
    } else {
        b
    }
}

/// Stationarity residual `x g_mid'(x) - g_mid(x)`.
pub fn mid_residual(g: &GFunction, x: f64) -> f64 {
    x * g.g_mid_deriv(x) - g.g_mid(x)
}

/// Stationarity residual `x g_out'(x) - g_out(x)`.
pub fn out_residual(g: &GFunction, x: f64) -> f64 {
    x * g.g_out_deriv(x) - g.g_out(x)
}

/// Derives both constants after checking that `g` has the admissible shape.
pub fn compute_constants(g: &GFunction) -> Result<DerivedConstants> {
    check_class_shape(g)?;

    // mid branch: maximize g(x/(1-x))/x directly on (0, 1)
    let x0 = golden_section_max(|x| g.g_mid(x) / x, 0.0, 1.0);
    let x_star_mid = polish(|x| mid_residual(g, x), x0, 0.0, 1.0);

    // out branch: with u = x/(1+x), g_out(x)/x = g(u)(1-u)/u on (0, 1)
    let u0 = golden_section_max(|u| g.eval(u) * (1.0 - u) / u, 0.0, 1.0);
    let u_star = polish(|u| out_residual(g, u / (1.0 - u)), u0, 0.0, 1.0);
    let x_star_out = u_star / (1.0 - u_star);

    let c = DerivedConstants {
        gamma_mid: g.g_mid(x_star_mid) / x_star_mid,
        gamma_out: g.g_out(x_star_out) / x_star_out,
        x_star_mid,
        x_star_out,
        g_id: g.id(),
    };
    if !(c.gamma_mid.is_finite() && c.gamma_out.is_finite() && c.gamma_out > 0.0) {
        return Err(Error::NotInClass(format!("{}: degenerate constants {c:?}", g.id())));
    }
    Ok(c)
}

/// Constants for Plackett-Luce with parameter `theta`.
pub fn pl_constants(theta: f64) -> Result<DerivedConstants> {
    compute_constants(&GFunction::pl(theta)?)
}

/// Solves `g(r) = t` for `t` in `(0, 1)`.
pub fn g_inverse(g: &GFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfDomain { name: "t", value: t, domain: "(0, 1)" });
    }
    if let Some(r) = g.closed_inverse(t) {
        return Ok(r);
    }
    let (mut lo, mut hi) = (1.0, 1.0);
    while g.eval(lo) > t {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(Error::NotInClass(format!("{}: cannot bracket g^-1({t})", g.id())));
        }
    }
    while g.eval(hi) < t {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NotInClass(format!("{}: cannot bracket g^-1({t})", g.id())));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let v = g.eval(mid);
        if v == t || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if v < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
