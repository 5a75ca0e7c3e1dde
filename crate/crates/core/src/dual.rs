//! Numerical certificates for the two-candidate social-cost program:
//! given that a candidate W gets an expected vote share of at least `alpha`
//! against B, how small can `SC(B) / SC(W)` be?
//!
//! Each voter is a pair `(b_i, w_i)` of distances to B and W. Feasibility
//! requires `max_i |w_i - b_i| <= min_i (w_i + b_i)` and
//! `(1/n) sum_i g(b_i / w_i) >= alpha`.

use rand::Rng;
use serde::Serialize;

use crate::bounds::{golden_section_max, DerivedConstants};
use crate::constructions::Branch;
use crate::error::{Error, Result};
use crate::metric::distance_ratio;
use crate::models::GFunction;

/// Slack allowed on the vote-share constraint.
pub const SHARE_TOLERANCE: f64 = 1e-12;
/// Slack allowed when comparing a sample's ratio with the bound.
pub const RATIO_TOLERANCE: f64 = 1e-9;
/// A dual branch value below this counts as a violation.
pub const DUAL_TOLERANCE: f64 = -1e-6;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain { name: "alpha", value: alpha, domain: "(0, 1)" });
    }
    Ok(())
}

/// `min((gamma_mid/alpha - 1)^-1, (gamma_out/alpha + 1)^-1)`, the smallest
/// attainable `sum b / sum w`.
pub fn lemma33_bound(alpha: f64, c: &DerivedConstants) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((1.0 / (c.gamma_mid / alpha - 1.0)).min(1.0 / (c.gamma_out / alpha + 1.0)))
}

/// `max(gamma_mid/alpha - 1, gamma_out/alpha + 1)`, the cap on
/// `SC(W) / SC(B)` when W holds vote share `alpha`.
pub fn sc_ratio_cap(alpha: f64, c: &DerivedConstants) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((c.gamma_mid / alpha - 1.0).max(c.gamma_out / alpha + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasiblePoint {
    pub b: Vec<f64>,
    pub w: Vec<f64>,
    pub alpha: f64,
}

impl FeasiblePoint {
    pub fn ratio(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.w.iter().sum::<f64>()
    }

    pub fn vote_share(&self, g: &GFunction) -> f64 {
        let total: f64 = self.b.iter().zip(&self.w).map(|(&b, &w)| g.eval(distance_ratio(w, b))).sum();
        total / self.b.len() as f64
    }

    /// `max |w - b| - min (w + b)`; nonpositive when the geometry is feasible.
    pub fn geometry_slack(&self) -> f64 {
        let spread = self.b.iter().zip(&self.w).map(|(b, w)| (w - b).abs()).fold(0.0, f64::max);
        let reach = self.b.iter().zip(&self.w).map(|(b, w)| w + b).fold(f64::INFINITY, f64::min);
        spread - reach
    }

    pub fn is_feasible(&self, g: &GFunction) -> bool {
        self.geometry_slack() <= 1e-12 && self.vote_share(g) >= self.alpha - SHARE_TOLERANCE
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleViolation {
    pub sample: usize,
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub alpha: f64,
    pub n: usize,
    pub accepted: usize,
    pub attempts: usize,
    pub bound: f64,
    pub min_ratio: f64,
    pub violations: Vec<SampleViolation>,
}

impl FeasibilityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Draws one voter pair on the unit band `b + w >= 1`, `|b - w| <= 1`.
fn draw_pair<R: Rng + ?Sized>(rng: &mut R, tilt: f64) -> (f64, f64) {
    let u: f64 = rng.random();
    match u {
        u if u < 0.1 => (0.0, 1.0),
        u if u < 0.15 => (1.0, 0.0),
        u if u < 0.25 => {
            let x: f64 = rng.random();
            (x, 1.0 - x)
        }
        u if u < 0.35 => {
            let x = (rng.random::<f64>() * 8.0 - 4.0).exp();
            (x, 1.0 + x)
        }
        _ => {
            // tilt above 1 pushes w above b, below 1 pushes b above w
            let diff = 2.0 * rng.random::<f64>().powf(tilt) - 1.0;
            let sum = if rng.random::<f64>() < 0.5 { 1.0 } else { (rng.random::<f64>() * 10f64.ln()).exp() };
            ((sum + diff) / 2.0, (sum - diff) / 2.0)
        }
    }
}

/// Random feasible points with `n` voters; every accepted point must have
/// `sum b / sum w >= lemma33_bound(alpha) - 1e-9`.
pub fn check_feasible_points<R: Rng + ?Sized>(
    g: &GFunction,
    c: &DerivedConstants,
    alpha: f64,
    n: usize,
    num_samples: usize,
    rng: &mut R,
) -> Result<FeasibilityReport> {
    let bound = lemma33_bound(alpha, c)?;
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let mut report = FeasibilityReport {
        alpha,
        n,
        accepted: 0,
        attempts: 0,
        bound,
        min_ratio: f64::INFINITY,
        violations: Vec::new(),
    };
    let max_attempts = num_samples.saturating_mul(1000).max(1000);
    let mut point = FeasiblePoint { b: vec![0.0; n], w: vec![0.0; n], alpha };
    while report.accepted < num_samples && report.attempts < max_attempts {
        report.attempts += 1;
        let tilt = ((rng.random::<f64>() * 2.0 - 1.0) * 50f64.ln()).exp();
        let scale = (rng.random::<f64>() * 6.0 - 3.0).exp();
        for i in 0..n {
            let (b, w) = draw_pair(rng, tilt);
            point.b[i] = b * scale;
            point.w[i] = w * scale;
        }
        if point.vote_share(g) < alpha - SHARE_TOLERANCE {
            continue;
        }
        debug_assert!(point.geometry_slack() <= 1e-9 * scale);
        let ratio = point.ratio();
        report.min_ratio = report.min_ratio.min(ratio);
        if ratio < bound - RATIO_TOLERANCE {
            report.violations.push(SampleViolation { sample: report.accepted, ratio, bound });
        }
        report.accepted += 1;
    }
    Ok(report)
}

/// The extremal point for one branch: `k = ceil(n alpha / g_branch(x*))`
/// voters at the branch maximizer and the rest at `(b, w) = (0, 1)`.
pub fn construct_tight_witness(g: &GFunction, c: &DerivedConstants, alpha: f64, n: usize, branch: Branch) -> Result<FeasiblePoint> {
    check_alpha(alpha)?;
    let (x, share, pair) = match branch {
        Branch::Mid => (c.x_star_mid, g.g_mid(c.x_star_mid), (c.x_star_mid, 1.0 - c.x_star_mid)),
        Branch::Out => (c.x_star_out, g.g_out(c.x_star_out), (c.x_star_out, 1.0 + c.x_star_out)),
    };
    let k = (n as f64 * alpha / share).ceil();
    if !(k <= n as f64) {
        return Err(Error::Infeasible(format!(
            "{branch:?} witness needs {k} of {n} voters at x* = {x}: alpha = {alpha} exceeds g_branch(x*) = {share}"
        )));
    }
    let k = k as usize;
    let mut b = vec![0.0; n];
    let mut w = vec![1.0; n];
    for i in 0..k {
        b[i] = pair.0;
        w[i] = pair.1;
    }
    Ok(FeasiblePoint { b, w, alpha })
}

/// Value of the branch the witness targets.
pub fn branch_bound(alpha: f64, c: &DerivedConstants, branch: Branch) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(match branch {
        Branch::Mid => 1.0 / (c.gamma_mid / alpha - 1.0),
        Branch::Out => 1.0 / (c.gamma_out / alpha + 1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualWitness {
    pub mu_star: f64,
    pub lambda_star: f64,
}

/// `mu* = lemma33_bound(alpha)`, `lambda* = mu* / alpha`.
pub fn dual_witness(alpha: f64, c: &DerivedConstants) -> Result<DualWitness> {
    let mu_star = lemma33_bound(alpha, c)?;
    Ok(DualWitness { mu_star, lambda_star: mu_star / alpha })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualBranch {
    Mid,
    Out,
    Constant,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualReport {
    pub alpha: f64,
    pub mu: f64,
    pub lambda: f64,
    pub pass: bool,
    pub min_value: f64,
    pub argmin_branch: DualBranch,
    pub argmin_b: f64,
}

/// `b (mu + 1) - mu - lambda (g_mid(b) - alpha)` on `(0, 1)`.
pub fn dual_mid(g: &GFunction, alpha: f64, mu: f64, lambda: f64, b: f64) -> f64 {
    b * (mu + 1.0) - mu - lambda * (g.g_mid(b) - alpha)
}

/// `b (1 - mu) - mu - lambda (g_out(b) - alpha)` on `(0, inf)`.
pub fn dual_out(g: &GFunction, alpha: f64, mu: f64, lambda: f64, b: f64) -> f64 {
    b * (1.0 - mu) - mu - lambda * (g.g_out(b) - alpha)
}

/// Minimizes the three boundary functions of the linearized program at
/// `(mu, lambda)` over a dense grid with local refinement. Passing means
/// the minimum is at least `-1e-6`.
pub fn verify_dual_feasibility(g: &GFunction, alpha: f64, mu: f64, lambda: f64, grid_size: usize) -> Result<DualReport> {
    check_alpha(alpha)?;
    if grid_size < 1000 {
        return Err(Error::Precondition(format!("grid_size = {grid_size} is below 1000")));
    }
    let mid = |b: f64| dual_mid(g, alpha, mu, lambda, b);
    // out branch over u in (0, 1) with b = u / (1 - u)
    let out = |u: f64| dual_out(g, alpha, mu, lambda, u / (1.0 - u));

    let (mut min_value, mut argmin_branch, mut argmin_b) = (-mu + lambda * alpha, DualBranch::Constant, 0.0);
    for (branch, f) in [(DualBranch::Mid, &mid as &dyn Fn(f64) -> f64), (DualBranch::Out, &out)] {
        let h = 1.0 / (grid_size as f64 + 1.0);
        let mut best = (f64::INFINITY, 0usize);
        for k in 1..=grid_size {
            let v = f(k as f64 * h);
            if v < best.0 {
                best = (v, k);
            }
        }
        let lo = (best.1 as f64 - 1.0) * h;
        let hi = (best.1 as f64 + 1.0) * h;
        let refined = golden_section_max(|x| -f(x), lo.max(1e-15), hi.min(1.0 - 1e-15));
        let (v, at) = if f(refined) < best.0 { (f(refined), refined) } else { (best.0, best.1 as f64 * h) };
        if v < min_value {
            min_value = v;
            argmin_branch = branch;
            argmin_b = if branch == DualBranch::Out { at / (1.0 - at) } else { at };
        }
    }
    Ok(DualReport {
        alpha,
        mu,
        lambda,
        pass: min_value >= DUAL_TOLERANCE,
        min_value,
        argmin_branch,
        argmin_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::pl_constants;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn bound_examples() {
        let c = pl_constants(2.0).unwrap();
        assert!((lemma33_bound(0.5, &c).unwrap() - 1.0 / SQRT2).abs() < 1e-9);
        assert!((lemma33_bound(0.2, &c).unwrap() - 0.1986).abs() < 1e-4);
        for a in [0.1, 0.3, 0.7] {
            let lb = lemma33_bound(a, &c).unwrap();
            assert!((1.0 / lb - sc_ratio_cap(a, &c).unwrap()).abs() < 1e-12);
        }
        assert!(lemma33_bound(0.0, &c).is_err());
        assert!(lemma33_bound(1.0, &c).is_err());
    }

    #[test]
    fn feasible_points_respect_bound() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = check_feasible_points(&g, &c, 0.5, 50, 2000, &mut rng).unwrap();
        assert_eq!(r.accepted, 2000);
        assert!(r.pass(), "{:?}", r.violations.first());
        assert!(r.min_ratio >= r.bound - 1e-9);
    }

    #[test]
    fn all_equal_point() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        let p = FeasiblePoint { b: vec![1.0; 10], w: vec![1.0; 10], alpha: 0.5 };
        assert!(p.is_feasible(&g));
        assert_eq!(p.ratio(), 1.0);
        assert!(p.ratio() >= lemma33_bound(0.5, &c).unwrap());
    }

    #[test]
    fn mid_witness_is_tight() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        let p = construct_tight_witness(&g, &c, 0.5, 10_000, Branch::Mid).unwrap();
        assert!(p.is_feasible(&g));
        assert!((p.ratio() - 1.0 / SQRT2).abs() < 1e-3);
        assert!(p.ratio() >= lemma33_bound(0.5, &c).unwrap() - 1e-9);
    }

    #[test]
    fn out_witness_needs_small_alpha() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        assert!(matches!(construct_tight_witness(&g, &c, 0.5, 10_000, Branch::Out), Err(Error::Infeasible(_))));
        let p = construct_tight_witness(&g, &c, 0.1, 10_000, Branch::Out).unwrap();
        assert!(p.is_feasible(&g));
        assert!((p.ratio() - branch_bound(0.1, &c, Branch::Out).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn witness_gap_shrinks_like_one_over_n() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        for n in [100usize, 1000, 10_000, 100_000] {
            let p = construct_tight_witness(&g, &c, 0.3, n, Branch::Mid).unwrap();
            let gap = p.ratio() - branch_bound(0.3, &c, Branch::Mid).unwrap();
            assert!(gap >= -1e-12 && gap * n as f64 <= 5.0, "n {n}: gap {gap}");
        }
    }

    #[test]
    fn dual_certificate() {
        let g = GFunction::pl(2.0).unwrap();
        let c = pl_constants(2.0).unwrap();
        let d = dual_witness(0.5, &c).unwrap();
        assert!((d.mu_star - 1.0 / SQRT2).abs() < 1e-9);
        assert!((d.lambda_star - SQRT2).abs() < 1e-9);
        let ok = verify_dual_feasibility(&g, 0.5, d.mu_star, d.lambda_star, 10_000).unwrap();
        assert!(ok.pass, "{ok:?}");
        let bad = verify_dual_feasibility(&g, 0.5, 2.0 * d.mu_star, d.lambda_star, 10_000).unwrap();
        assert!(!bad.pass);
        for m in 2..=10 {
            let a = 1.0 / m as f64;
            let d = dual_witness(a, &c).unwrap();
            assert!(verify_dual_feasibility(&g, a, d.mu_star, d.lambda_star, 10_000).unwrap().pass, "m {m}");
        }
        assert!(verify_dual_feasibility(&g, 0.5, 1.0, 1.0, 10).is_err());
    }
}
