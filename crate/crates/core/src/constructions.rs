//! Lower-bound elections: each generator returns a metric instance, the
//! voters' ranking distributions and the distortion the construction is
//! meant to force.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{compute_constants, g_inverse, DerivedConstants};
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::models::{ElectionModel, GFunction, PerVoterDistribution, VoterGroup};

/// Which maximizer a construction or witness uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Mid,
    Out,
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mid" => Ok(Branch::Mid),
            "out" => Ok(Branch::Out),
            _ => Err(Error::Parse(format!("unknown branch {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionKind {
    PluralityLb,
    PluralityPlLb,
    RdLb,
    RdPlLb,
    BordaLb,
    GenericLb,
}

impl ConstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::PluralityLb => "plurality-lb",
            ConstructionKind::PluralityPlLb => "plurality-pl-lb",
            ConstructionKind::RdLb => "rd-lb",
            ConstructionKind::RdPlLb => "rd-pl-lb",
            ConstructionKind::BordaLb => "borda-lb",
            ConstructionKind::GenericLb => "generic-lb",
        }
    }
}

impl std::str::FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use ConstructionKind::*;
        [PluralityLb, PluralityPlLb, RdLb, RdPlLb, BordaLb, GenericLb]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown construction {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct ConstructedElection {
    pub kind: ConstructionKind,
    pub instance: MetricInstance,
    pub model: ElectionModel,
    /// Distortion the construction forces (a limit for most generators).
    pub predicted_distortion: f64,
    /// Candidate the construction pushes to win.
    pub w: usize,
    /// Reference candidate with low social cost.
    pub b: usize,
    pub params: BTreeMap<String, f64>,
}

impl ConstructedElection {
    fn new(kind: ConstructionKind, instance: MetricInstance, model: ElectionModel, predicted: f64, w: usize, b: usize) -> Self {
        Self {
            kind,
            instance,
            model,
            predicted_distortion: predicted,
            w,
            b,
            params: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// `SC(w) / SC(b)` on the generated geometry.
    pub fn sc_ratio(&self) -> f64 {
        self.instance.social_cost_unchecked(self.w) / self.instance.social_cost_unchecked(self.b)
    }

    /// Largest gap between a distribution's analytic pairwise marginal and
    /// `g(ratio)` on the geometry. Voters that surely rank the candidate
    /// they sit on first are compared only on pairs involving it.
    pub fn marginal_deviation(&self, g: &GFunction) -> f64 {
        let m = self.instance.m();
        let mut dists = Vec::with_capacity(m);
        let mut prev: Option<(Vec<f64>, *const PerVoterDistribution)> = None;
        let mut worst = 0.0f64;
        for (i, dist) in self.model.voters() {
            if dist.is_pl() {
                continue;
            }
            self.instance.voter_distances(i, &mut dists);
            if let Some((d, p)) = &prev {
                if *d == dists && std::ptr::eq(*p, dist) {
                    continue;
                }
            }
            let anchor = match dist {
                PerVoterDistribution::TopOrLast { favored, q } if *q == 1.0 && dists[*favored] == 0.0 => Some(*favored),
                _ => None,
            };
            for j in 0..m {
                for k in (j + 1)..m {
                    if anchor.is_some_and(|a| a != j && a != k) {
                        continue;
                    }
                    let want = g.eval(crate::metric::distance_ratio(dists[j], dists[k]));
                    worst = worst.max((dist.pairwise_marginal(&dists, j, k) - want).abs());
                }
            }
            prev = Some((dists.clone(), dist as *const _));
        }
        worst
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Infeasible(msg()))
    }
}

fn check_small_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::OutOfDomain { name, value: v, domain: "(0, 1)" });
    }
    Ok(())
}

/// Shared geometry of the plurality constructions in 3-D: W at (1, 0, 0)
/// (index m - 1), the other m - 1 candidates equally spaced on a circle of
/// radius `eps` in the y-z plane, `per_good` voters on each of them and the
/// remaining voters at `ambivalent_x` on the x axis.
fn plurality_geometry(m: usize, n: usize, eps: f64, per_good: usize, ambivalent_x: f64) -> Result<MetricInstance> {
    let goods = m - 1;
    let mut candidates: Vec<[f64; 3]> = (0..goods)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / goods as f64;
            [0.0, eps * a.cos(), eps * a.sin()]
        })
        .collect();
    candidates.push([1.0, 0.0, 0.0]);
    let mut voters = Vec::with_capacity(n);
    for c in &candidates[..goods] {
        voters.extend(std::iter::repeat_n(*c, per_good));
    }
    voters.resize(n, [ambivalent_x, 0.0, 0.0]);
    MetricInstance::from_points(3, voters, candidates)
}

/// Overlap fraction `a = (1 - (1 + zeta)/(m q)) / (m - 1)` and the count per
/// good candidate.
fn overlap(m: usize, n: usize, q: f64, zeta: f64) -> Result<(f64, usize)> {
    let a = (1.0 - (1.0 + zeta) / (m as f64 * q)) / (m as f64 - 1.0);
    require(a > 0.0, || format!("overlap fraction a = {a} is not positive (q = {q})"))?;
    let per_good = (a * n as f64).floor() as usize;
    require(per_good >= 1, || format!("a n = {} is below one voter", a * n as f64))?;
    Ok((a, per_good))
}

/// The good candidates are optimal only for small enough eps and zeta; past
/// that W itself can be optimal and the instance witnesses nothing.
fn require_w_worse(ratio: f64) -> Result<()> {
    require(ratio > 1.0, || format!("SC(W)/SC(B) = {ratio} is not above 1; shrink eps or zeta"))
}

/// Plurality lower bound: ambivalent voters at `x*_mid` (or `-x*_out`) rank
/// W first with probability `q`; a slight overlap of voters sits on each
/// good candidate. W wins while every good candidate is optimal.
pub fn gen_plurality_lb(m: usize, n: usize, eps: f64, zeta: f64, g: &GFunction, branch: Branch) -> Result<ConstructedElection> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    check_small_positive("eps", eps)?;
    check_small_positive("zeta", zeta)?;
    let c = compute_constants(g)?;
    let (x, d_w, predicted) = match branch {
        Branch::Mid => (c.x_star_mid, 1.0 - c.x_star_mid, m as f64 * c.gamma_mid - 1.0),
        Branch::Out => (-c.x_star_out, 1.0 + c.x_star_out, m as f64 * c.gamma_out + 1.0),
    };
    let q = g.eval((x * x + eps * eps).sqrt() / d_w);
    let (a, per_good) = overlap(m, n, q, zeta)?;
    let instance = plurality_geometry(m, n, eps, per_good, x)?;
    let w = m - 1;
    let mut groups: Vec<VoterGroup> = (0..m - 1)
        .map(|j| VoterGroup { count: per_good, dist: PerVoterDistribution::TopOrLast { favored: j, q: 1.0 } })
        .collect();
    let ambivalent = n - (m - 1) * per_good;
    groups.push(VoterGroup { count: ambivalent, dist: PerVoterDistribution::TopOrLast { favored: w, q } });
    let e = ConstructedElection::new(ConstructionKind::PluralityLb, instance, ElectionModel::from_groups(groups), predicted, w, 0);
    let ratio = e.sc_ratio();
    require_w_worse(ratio)?;
    Ok(e.param("q", q)
        .param("a", a)
        .param("eps", eps)
        .param("zeta", zeta)
        .param("x_star", x.abs())
        .param("ambivalent_voters", ambivalent as f64)
        .param("sc_ratio", ratio))
}

/// Plurality lower bound with Plackett-Luce voters placed at
/// `x_hat = 1 - m^(-1/theta)`.
pub fn gen_plurality_pl_lb(m: usize, n: usize, eps: f64, zeta: f64, theta: f64) -> Result<ConstructedElection> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    check_small_positive("eps", eps)?;
    check_small_positive("zeta", zeta)?;
    GFunction::pl(theta)?;
    let mf = m as f64;
    let x_hat = 1.0 - mf.powf(-1.0 / theta);
    let w_strength = (1.0 - x_hat).powf(-theta);
    let q = w_strength / ((mf - 1.0) * (x_hat * x_hat + eps * eps).sqrt().powf(-theta) + w_strength);
    let (a, per_good) = overlap(m, n, q, zeta)?;
    let instance = plurality_geometry(m, n, eps, per_good, x_hat)?;
    let formula = mf * w_strength / (x_hat * ((mf - 1.0) * x_hat.powf(-theta) + w_strength)) - 1.0;
    let e = ConstructedElection::new(
        ConstructionKind::PluralityPlLb,
        instance,
        ElectionModel::pl(n, theta),
        formula.max(1.0),
        m - 1,
        0,
    );
    let ratio = e.sc_ratio();
    require_w_worse(ratio)?;
    Ok(e.param("q", q)
        .param("a", a)
        .param("eps", eps)
        .param("zeta", zeta)
        .param("x_hat", x_hat)
        .param("limit_formula", formula)
        .param("sc_ratio", ratio))
}

/// Random Dictator lower bound on a line: B at 0, the other candidates at
/// 1, `n - 1` voters on B and one voter at `x~ = r/(1+r)` with
/// `r = g^-1(1/(m-1))` who ranks a uniform other candidate first and B
/// second.
pub fn gen_rd_lb(m: usize, n: usize, g: &GFunction) -> Result<ConstructedElection> {
    if m < 3 || n < 2 {
        return Err(Error::Precondition(format!("need m >= 3 and n >= 2, got m = {m}, n = {n}")));
    }
    let r = g_inverse(g, 1.0 / (m as f64 - 1.0))?;
    let x = r / (1.0 + r);
    let mut candidates = vec![[0.0; 3]];
    candidates.extend(std::iter::repeat_n([1.0, 0.0, 0.0], m - 1));
    let mut voters = vec![[0.0; 3]; n - 1];
    voters.push([x, 0.0, 0.0]);
    let instance = MetricInstance::from_points(1, voters, candidates)?;
    let model = ElectionModel::from_groups(vec![
        VoterGroup { count: n - 1, dist: PerVoterDistribution::TopOrLast { favored: 0, q: 1.0 } },
        VoterGroup {
            count: 1,
            dist: PerVoterDistribution::TopUniformThenFixed { favored_set: (1..m).collect(), q: 1.0, runner_up: 0 },
        },
    ]);
    let predicted = 2.0 + 1.0 / r - 2.0 / n as f64;
    let e = ConstructedElection::new(ConstructionKind::RdLb, instance, model, predicted, 1, 0);
    Ok(e.param("x_tilde", x).param("g_inverse", r))
}

/// Random Dictator lower bound under Plackett-Luce: same line layout with
/// the lone voter at `t = (m-1)^(-1/theta)`.
pub fn gen_rd_pl_lb(m: usize, n: usize, theta: f64) -> Result<ConstructedElection> {
    if m < 2 || n < 2 {
        return Err(Error::Precondition(format!("need m >= 2 and n >= 2, got m = {m}, n = {n}")));
    }
    GFunction::pl(theta)?;
    let t = (m as f64 - 1.0).powf(-1.0 / theta);
    let mut candidates = vec![[0.0; 3]];
    candidates.extend(std::iter::repeat_n([1.0, 0.0, 0.0], m - 1));
    let mut voters = vec![[0.0; 3]; n - 1];
    voters.push([t, 0.0, 0.0]);
    let instance = MetricInstance::from_points(1, voters, candidates)?;
    let p_b = crate::models::pl_top_choice_from_distances(
        &std::iter::once(t).chain(std::iter::repeat_n(1.0 - t, m - 1)).collect::<Vec<_>>(),
        theta,
        n - 1,
        0,
    )?;
    let nf = n as f64;
    let exact = (nf - 1.0) / nf + p_b / nf + (1.0 - p_b) * (nf - t) / (nf * t);
    let predicted = 1.0 + (m as f64 - 1.0).powf(1.0 / theta) / 2.0;
    let e = ConstructedElection::new(ConstructionKind::RdPlLb, instance, ElectionModel::pl(n, theta), predicted, 1, 0);
    Ok(e.param("t", t)
        .param("p_b_top", p_b)
        .param("exact_distortion", exact)
        .param("exact_limit", 1.0 + (1.0 - p_b) / t))
}

/// Borda lower bound in the plane: B at the origin, W at (1, 0), the other
/// m - 2 candidates at the apex of an equilateral triangle over O and
/// L = (t, 0). A fraction `delta` of voters sits at L, the rest at O.
pub fn gen_borda_lb(m: usize, n: usize, theta: f64) -> Result<ConstructedElection> {
    if m < 3 {
        return Err(Error::Precondition("m must be at least 3".into()));
    }
    GFunction::pl(theta)?;
    let mf = m as f64;
    let t = mf.powf(1.0 / theta);
    let delta = 24.0 * mf.powf(1.0 / theta - 1.0);
    require(delta <= 1.0, || format!("delta = {delta} exceeds 1; m is too small for theta = {theta}"))?;
    // the social-cost bound below needs t >= 2, i.e. m >= 2^theta
    require(t >= 2.0, || format!("t = {t} is below 2; m is too small for theta = {theta}"))?;
    let at_l = (delta * n as f64).floor() as usize;
    require(at_l >= 1, || format!("delta n = {} is below one voter", delta * n as f64))?;
    let apex = [t / 2.0, t * 3f64.sqrt() / 2.0, 0.0];
    let mut candidates = vec![[0.0; 3], [1.0, 0.0, 0.0]];
    candidates.extend(std::iter::repeat_n(apex, m - 2));
    let mut voters = vec![[0.0; 3]; n - at_l];
    voters.extend(std::iter::repeat_n([t, 0.0, 0.0], at_l));
    let instance = MetricInstance::from_points(2, voters, candidates)?;
    let sc_bound = mf.powf(1.0 - 2.0 / theta) / 24.0;
    let e = ConstructedElection::new(ConstructionKind::BordaLb, instance, ElectionModel::pl(n, theta), sc_bound.max(1.0), 1, 0);
    let ratio = e.sc_ratio();
    Ok(e.param("t", t)
        .param("delta", delta)
        .param("voters_at_l", at_l as f64)
        .param("sc_ratio", ratio)
        .param("sc_ratio_bound", sc_bound))
}

/// Two-candidate pair of instances with W at distance 1 from B. In the
/// first, `n (1 - 1/(2 g_branch(x*)))` voters sit on W and the rest at
/// distance `x*` from W; the second swaps W and B. W's expected vote share
/// is 1/2 in both, yet its distortion is 1 in the first and
/// `2 gamma_mid - 1` in the second.
pub fn gen_generic_lb_pair(g: &GFunction, branch: Branch, n: usize) -> Result<[ConstructedElection; 2]> {
    let c: DerivedConstants = compute_constants(g)?;
    let (x, share) = match branch {
        Branch::Mid => (c.x_star_mid, g.g_mid(c.x_star_mid)),
        Branch::Out => (c.x_star_out, g.g_out(c.x_star_out)),
    };
    let fraction = 1.0 / (2.0 * share);
    require(fraction <= 1.0, || {
        format!("{branch:?} branch needs g_branch(x*) >= 1/2, got {share}")
    })?;
    let movers = (n as f64 * fraction).round() as usize;
    require(movers >= 1 && movers <= n, || format!("{movers} of {n} voters cannot be placed"))?;
    let stay = n - movers;
    let position = match branch {
        Branch::Mid => x,
        Branch::Out => -x,
    };
    let mut voters = vec![[0.0; 3]; stay];
    voters.extend(std::iter::repeat_n([position, 0.0, 0.0], movers));
    let predicted = match branch {
        Branch::Mid => 2.0 * c.gamma_mid - 1.0,
        Branch::Out => 2.0 * c.gamma_out + 1.0,
    };
    let build = |w_at: f64, b_at: f64| -> Result<ConstructedElection> {
        let instance = MetricInstance::from_points(1, voters.clone(), vec![[w_at, 0.0, 0.0], [b_at, 0.0, 0.0]])?;
        let mut groups = Vec::new();
        let mut dists = Vec::new();
        for (start, count) in [(0, stay), (stay, movers)] {
            if count == 0 {
                continue;
            }
            instance.voter_distances(start, &mut dists);
            let q = g.eval(crate::metric::distance_ratio(dists[0], dists[1]));
            groups.push(VoterGroup { count, dist: PerVoterDistribution::TopOrLast { favored: 0, q } });
        }
        let model = ElectionModel::from_groups(groups);
        let share: f64 = model.voters().map(|(i, d)| {
            instance.voter_distances(i, &mut dists);
            d.pairwise_marginal(&dists, 0, 1)
        }).sum::<f64>() / n as f64;
        let e = ConstructedElection::new(ConstructionKind::GenericLb, instance, model, predicted, 0, 1);
        let ratio = e.sc_ratio();
        Ok(e.param("x_star", x).param("expected_w_share", share).param("sc_ratio", ratio))
    };
    Ok([build(0.0, 1.0)?, build(1.0, 0.0)?])
}
