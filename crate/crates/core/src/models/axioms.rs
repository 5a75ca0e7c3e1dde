//! Numerical checks of the axioms a pairwise model should satisfy:
//! scale-freeness, independence of other candidates and strict
//! monotonicity, plus the shape conditions defining the admissible class.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::log_grid;
use crate::metric::MetricInstance;

use super::{GFunction, PairwiseModel};

pub const SHAPE_GRID_POINTS: usize = 512;
pub const SHAPE_GRID_LO: f64 = 1e-4;
pub const SHAPE_GRID_HI: f64 = 1e4;

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: &'static str,
    pub model: String,
    pub pass: bool,
    pub checked: usize,
    pub failures: usize,
    pub worst_deviation: f64,
    pub witness: Option<String>,
}

impl AxiomReport {
    fn new(axiom: &'static str, model: String) -> Self {
        Self {
            axiom,
            model,
            pass: true,
            checked: 0,
            failures: 0,
            worst_deviation: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, deviation: f64, tol: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if deviation > self.worst_deviation {
            self.worst_deviation = deviation;
        }
        if !(deviation <= tol) {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn finish(mut self, allowed_failures: usize) -> Self {
        self.pass = self.failures <= allowed_failures;
        self
    }
}

/// Compares every pairwise probability on `instance` with the same
/// probability after scaling all distances by each `kappa`.
pub fn check_scale_freeness(model: &dyn PairwiseModel, instance: &MetricInstance, kappas: &[f64], tol: f64) -> Result<AxiomReport> {
    if let Some(&k) = kappas.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(Error::OutOfDomain { name: "kappa", value: k, domain: "(0, inf)" });
    }
    let mut report = AxiomReport::new("scale-freeness", model.name());
    let m = instance.m();
    let mut base = Vec::with_capacity(m);
    for i in 0..instance.n() {
        instance.voter_distances(i, &mut base);
        for &kappa in kappas {
            let scaled: Vec<f64> = base.iter().map(|d| d * kappa).collect();
            for j in 0..m {
                for jp in 0..m {
                    if j == jp {
                        continue;
                    }
                    let p = model.preference_probability(&base, j, jp);
                    let q = model.preference_probability(&scaled, j, jp);
                    report.record((p - q).abs(), tol, || {
                        format!("voter {i}, pair ({j}, {jp}), kappa {kappa}: {p} vs {q}")
                    });
                }
            }
        }
    }
    Ok(report.finish(0))
}

/// Walks `d'` over `grid` with `d = 1` and requires `P[j above j']` to rise
/// strictly at every step. A step also counts when the reverse probability
/// strictly falls, which keeps saturated floating-point tails from being
/// mistaken for plateaus. Up to `allowed_plateaus` flat steps are tolerated.
pub fn check_strict_monotonicity(model: &dyn PairwiseModel, grid: &[f64], allowed_plateaus: usize) -> AxiomReport {
    let mut report = AxiomReport::new("strict-monotonicity", model.name());
    let probe = |d: f64| {
        let dists = [1.0, d];
        (model.preference_probability(&dists, 0, 1), model.preference_probability(&dists, 1, 0))
    };
    let mut prev = grid.first().map(|&d| (d, probe(d)));
    for &d in grid.iter().skip(1) {
        let cur = probe(d);
        let (d0, (fwd0, rev0)) = prev.expect("grid is non-empty here");
        let rising = cur.0 > fwd0 || cur.1 < rev0;
        report.record(if rising { 0.0 } else { 1.0 }, 0.0, || {
            format!("no strict increase between d' = {d0} and d' = {d}")
        });
        prev = Some((d, cur));
    }
    report.finish(allowed_plateaus)
}

/// Moves each third candidate to several new distances and requires every
/// pairwise probability to stay put within `tol`.
pub fn check_ioc(model: &dyn PairwiseModel, instance: &MetricInstance, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::new("independence-of-other-candidates", model.name());
    let m = instance.m();
    let mut dists = Vec::with_capacity(m);
    for i in 0..instance.n() {
        instance.voter_distances(i, &mut dists);
        for j in 0..m {
            for jp in 0..m {
                if j == jp {
                    continue;
                }
                let p = model.preference_probability(&dists, j, jp);
                let lo = dists[j].min(dists[jp]);
                let hi = dists[j].max(dists[jp]);
                let moves = [if lo > 0.0 { lo / 2.0 } else { hi / 4.0 + 0.25 }, (lo + hi) / 2.0, 2.0 * hi + 1.0];
                for k in (0..m).filter(|&k| k != j && k != jp) {
                    for &v in &moves {
                        let mut moved = dists.clone();
                        moved[k] = v;
                        let q = model.preference_probability(&moved, j, jp);
                        report.record((p - q).abs(), tol, || {
                            format!("voter {i}, pair ({j}, {jp}): moving candidate {k} to {v} changes {p} to {q}")
                        });
                    }
                }
            }
        }
    }
    report.finish(0)
}

/// Checks the admissible-class conditions on a 512-point log grid:
/// boundary values, strict monotonicity, complementarity, convex-then-concave
/// `g_mid` with its inflection at 1/2, and a single convex-to-concave switch
/// for `g_out`.
pub fn check_class_shape(g: &GFunction) -> Result<()> {
    let fail = |why: String| Err(Error::NotInClass(format!("{}: {why}", g.id())));
    if g.eval(0.0) != 0.0 {
        return fail(format!("g(0) = {}", g.eval(0.0)));
    }
    if g.eval(f64::INFINITY) != 1.0 {
        return fail(format!("g(inf) = {}", g.eval(f64::INFINITY)));
    }
    let rs = log_grid(SHAPE_GRID_LO, SHAPE_GRID_HI, SHAPE_GRID_POINTS);
    for &r in &rs {
        let s = g.eval(r) + g.eval(1.0 / r);
        if !((s - 1.0).abs() <= 1e-12) {
            return fail(format!("g({r}) + g(1/{r}) = {s}"));
        }
    }
    // complementarity carries monotonicity over to r > 1; values that underflow
    // far below r = 1 are skipped
    if let Some(r) = rs.iter().find(|&&r| (0.9..1.0).contains(&r) && g.eval(r) < f64::MIN_POSITIVE) {
        return fail(format!("g({r}) vanishes"));
    }
    let lower: Vec<f64> = rs.iter().copied().filter(|&r| r <= 1.0 && g.eval(r) >= f64::MIN_POSITIVE).collect();
    let mono = check_strict_monotonicity(g, &lower, 0);
    if !mono.pass {
        return fail(mono.witness.unwrap_or_default());
    }

    let xs_mid: Vec<f64> = rs.iter().map(|r| r / (1.0 + r)).collect();
    let mid = slope_changes(&xs_mid, |x| g.g_mid(x));
    for (k, &(x, change)) in mid.iter().enumerate() {
        let left = xs_mid[k];
        let right = xs_mid[k + 2];
        if right <= 0.5 && change < 0 {
            return fail(format!("g_mid is not convex near x = {x}"));
        }
        if left >= 0.5 && change > 0 {
            return fail(format!("g_mid is not concave near x = {x}"));
        }
    }

    // strictness: g_mid lies strictly below its chord on (0, 1/2) and above it on (1/2, 1)
    if !(g.g_mid(0.25) < 0.25 - 1e-9 && g.g_mid(0.75) > 0.75 + 1e-9) {
        return fail("g_mid is not strictly convex-concave around 1/2".into());
    }

    let out = slope_changes(&rs, |x| g.g_out(x));
    let mut seen_concave = false;
    for &(x, change) in &out {
        if change < 0 {
            seen_concave = true;
        } else if change > 0 && seen_concave {
            return fail(format!("g_out turns convex again near x = {x}"));
        }
    }
    Ok(())
}

/// Sign of the slope change at each interior grid point, with changes
/// within rounding noise reported as zero.
fn slope_changes(xs: &[f64], f: impl Fn(f64) -> f64) -> Vec<(f64, i8)> {
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let slopes: Vec<f64> = xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect();
    slopes
        .windows(2)
        .enumerate()
        .map(|(k, s)| {
            // rounding in y alone moves a slope by about eps * |y| / dx
            let (x, y) = (&xs[k..k + 3], &ys[k..k + 3]);
            let noise = 8.0 * f64::EPSILON * (y[0].abs() + y[1].abs() + y[2].abs()) * (1.0 / (x[1] - x[0]) + 1.0 / (x[2] - x[1]));
            let tol = 1e-9 * s[0].abs().max(s[1].abs()) + noise + 1e-300;
            let d = s[1] - s[0];
            let sign = if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            };
            (xs[k + 1], sign)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{ExponentialStrength, Mallows};
    use super::*;

    fn small_instance() -> MetricInstance {
        let voters = vec![vec![0.1, 0.2], vec![0.7, 0.4], vec![0.5, 0.9]];
        let cands = vec![vec![0.0, 0.0], vec![1.0, 0.3], vec![0.4, 0.6], vec![0.9, 0.9]];
        MetricInstance::euclidean(2, &voters, &cands).unwrap()
    }

    #[test]
    fn pl_is_scale_free() {
        let g = GFunction::pl(2.0).unwrap();
        let r = check_scale_freeness(&g, &small_instance(), &[7.0], 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn exponential_strength_is_not_scale_free() {
        let r = check_scale_freeness(&ExponentialStrength, &small_instance(), &[2.0], 1e-12).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn identity_scaling_always_passes() {
        let inst = small_instance();
        assert!(check_scale_freeness(&ExponentialStrength, &inst, &[1.0], 1e-12).unwrap().pass);
        assert!(check_scale_freeness(&Mallows::new(0.5).unwrap(), &inst, &[1.0], 1e-12).unwrap().pass);
    }

    #[test]
    fn scale_freeness_rejects_bad_kappa() {
        let g = GFunction::pl(2.0).unwrap();
        assert!(check_scale_freeness(&g, &small_instance(), &[0.0], 1e-12).is_err());
    }

    #[test]
    fn monotonicity() {
        let grid = log_grid(SHAPE_GRID_LO, SHAPE_GRID_HI, SHAPE_GRID_POINTS);
        assert!(check_strict_monotonicity(&GFunction::pl(2.0).unwrap(), &grid, 0).pass);
        assert!(check_strict_monotonicity(&GFunction::pl(64.0).unwrap(), &grid, 0).pass);
        assert!(!check_strict_monotonicity(&Mallows::new(0.5).unwrap(), &grid, 0).pass);
        let step = GFunction::custom("step", |r| if r >= 1.0 { 1.0 } else { 0.0 });
        assert!(!check_strict_monotonicity(&step, &grid, 0).pass);
    }

    #[test]
    fn ioc() {
        let inst = small_instance();
        assert!(check_ioc(&GFunction::pl(1.5).unwrap(), &inst, 1e-15).pass);
        assert!(check_ioc(&ExponentialStrength, &inst, 1e-15).pass);
        assert!(!check_ioc(&Mallows::new(0.5).unwrap(), &inst, 1e-12).pass);
    }

    #[test]
    fn pl_family_is_in_class() {
        for theta in [1.05, 1.1, 1.5, 2.0, 4.0, 16.0, 64.0] {
            check_class_shape(&GFunction::pl(theta).unwrap()).unwrap();
        }
    }

    #[test]
    fn non_members_are_rejected() {
        let step = GFunction::custom("step", |r| if r > 1.0 { 1.0 } else if r == 1.0 { 0.5 } else { 0.0 });
        assert!(matches!(check_class_shape(&step), Err(Error::NotInClass(_))));
        let lopsided = GFunction::custom("lopsided", |r: f64| if r.is_infinite() { 1.0 } else { r / (2.0 + r) });
        assert!(check_class_shape(&lopsided).is_err());
        // theta < 1 is complementary and monotone but concave at the origin
        let flat = GFunction::custom("pl-half", |r: f64| if r.is_infinite() { 1.0 } else if r == 0.0 { 0.0 } else { 1.0 / (1.0 + r.powf(-0.5)) });
        assert!(check_class_shape(&flat).is_err());
    }
}
