use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Step for central-difference derivatives of custom functions.
pub const DIFF_STEP: f64 = 1e-6;

/// Pairwise-order probability function: `P[j above j'] = g(d(i, j') / d(i, j))`.
#[derive(Clone)]
pub enum GFunction {
    PlackettLuce { theta: f64 },
    Custom(CustomG),
}

/// User-supplied `g`. Derivative and inverse are optional; missing ones fall
/// back to central differences and bisection.
#[derive(Clone)]
pub struct CustomG {
    pub name: String,
    pub eval: ScalarFn,
    pub deriv: Option<ScalarFn>,
    pub inverse: Option<ScalarFn>,
}

impl fmt::Debug for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl GFunction {
    pub fn pl(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 1.0) {
            return Err(Error::OutOfDomain { name: "theta", value: theta, domain: "(1, inf)" });
        }
        Ok(Self::PlackettLuce { theta })
    }

    pub fn custom(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(CustomG {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: None,
            inverse: None,
        })
    }

    pub fn with_derivative(self, deriv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        match self {
            Self::Custom(mut c) => {
                c.deriv = Some(Arc::new(deriv));
                Self::Custom(c)
            }
            pl => pl,
        }
    }

    pub fn with_inverse(self, inverse: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        match self {
            Self::Custom(mut c) => {
                c.inverse = Some(Arc::new(inverse));
                Self::Custom(c)
            }
            pl => pl,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            Self::PlackettLuce { theta } => Some(*theta),
            Self::Custom(_) => None,
        }
    }

    pub fn id(&self) -> String {
        match self {
            Self::PlackettLuce { theta } => format!("pl(theta={theta})"),
            Self::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// `g(r)` for `r` in `[0, inf]`.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::PlackettLuce { theta } => {
                if r == f64::INFINITY {
                    1.0
                } else if r <= 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 + r.powf(-theta))
                }
            }
            Self::Custom(c) => (c.eval)(r),
        }
    }

    /// `1 - g(r)`, computed without cancellation for Plackett-Luce.
    pub fn complement(&self, r: f64) -> f64 {
        match self {
            Self::PlackettLuce { theta } => {
                if r == f64::INFINITY {
                    0.0
                } else if r <= 0.0 {
                    1.0
                } else {
                    1.0 / (1.0 + r.powf(*theta))
                }
            }
            Self::Custom(c) => 1.0 - (c.eval)(r),
        }
    }

    /// `g'(r)` for `r > 0`.
    pub fn deriv(&self, r: f64) -> f64 {
        match self {
            Self::PlackettLuce { theta } => theta * self.eval(r) * self.complement(r) / r,
            Self::Custom(c) => match &c.deriv {
                Some(d) => d(r),
                None => {
                    let h = DIFF_STEP.min(r / 2.0);
                    ((c.eval)(r + h) - (c.eval)(r - h)) / (2.0 * h)
                }
            },
        }
    }

    /// Closed-form inverse when one is known.
    pub fn closed_inverse(&self, t: f64) -> Option<f64> {
        match self {
            Self::PlackettLuce { theta } => Some((t / (1.0 - t)).powf(1.0 / theta)),
            Self::Custom(c) => c.inverse.as_ref().map(|f| f(t)),
        }
    }

    /// `g(x / (1 - x))` on `(0, 1)`.
    pub fn g_mid(&self, x: f64) -> f64 {
        self.eval(x / (1.0 - x))
    }

    /// `g(x / (1 + x))` on `(0, inf)`.
    pub fn g_out(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return self.eval(1.0);
        }
        self.eval(x / (1.0 + x))
    }

    pub fn g_mid_deriv(&self, x: f64) -> f64 {
        let s = 1.0 - x;
        self.deriv(x / s) / (s * s)
    }

    pub fn g_out_deriv(&self, x: f64) -> f64 {
        let s = 1.0 + x;
        self.deriv(x / s) / (s * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pl_values() {
        let g = GFunction::pl(2.0).unwrap();
        assert_eq!(g.eval(1.0), 0.5);
        assert!((g.eval(0.5) - 0.2).abs() < 1e-15);
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(f64::INFINITY), 1.0);
        assert!((g.complement(0.5) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pl_rejects_theta_at_most_one() {
        assert!(GFunction::pl(1.0).is_err());
        assert!(GFunction::pl(f64::NAN).is_err());
        assert!(GFunction::pl(f64::INFINITY).is_err());
    }

    #[test]
    fn analytic_and_numeric_derivatives_agree() {
        let pl = GFunction::pl(3.0).unwrap();
        let custom = GFunction::custom("pl3", |r: f64| 1.0 / (1.0 + r.powf(-3.0)));
        for &r in &[0.2, 0.9, 1.0, 1.7, 6.0] {
            let a = pl.deriv(r);
            let b = custom.deriv(r);
            assert!((a - b).abs() < 1e-7 * a.abs().max(1.0), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn branch_derivatives_match_differences() {
        let g = GFunction::pl(2.5).unwrap();
        let h = 1e-6;
        for &x in &[0.2, 0.5, 0.8] {
            let fd = (g.g_mid(x + h) - g.g_mid(x - h)) / (2.0 * h);
            assert!((g.g_mid_deriv(x) - fd).abs() < 1e-6);
        }
        for &x in &[0.2, 1.0, 7.0] {
            let fd = (g.g_out(x + h) - g.g_out(x - h)) / (2.0 * h);
            assert!((g.g_out_deriv(x) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn closed_inverse() {
        let g = GFunction::pl(2.0).unwrap();
        assert!((g.closed_inverse(0.2).unwrap() - 0.5).abs() < 1e-15);
        assert!(GFunction::custom("c", |r| r / (1.0 + r)).closed_inverse(0.3).is_none());
    }
}
