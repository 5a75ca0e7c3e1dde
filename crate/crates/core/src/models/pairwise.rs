use crate::error::{check_range, Error, Result};
use crate::metric::{distance_ratio, MetricInstance};

use super::GFunction;

/// Anything that assigns `P[j above j']` to a voter given the voter's
/// distances to every candidate.
pub trait PairwiseModel {
    fn name(&self) -> String;

    fn preference_probability(&self, dists: &[f64], j: usize, j_prime: usize) -> f64;
}

impl PairwiseModel for GFunction {
    fn name(&self) -> String {
        self.id()
    }

    fn preference_probability(&self, dists: &[f64], j: usize, j_prime: usize) -> f64 {
        self.eval(distance_ratio(dists[j], dists[j_prime]))
    }
}

/// `P[j above j'] = g(d(i, j') / d(i, j))` on a metric instance.
pub fn pairwise_probability(g: &GFunction, instance: &MetricInstance, voter: usize, j: usize, j_prime: usize) -> Result<f64> {
    let r = instance.pairwise_ratio(voter, j, j_prime)?;
    Ok(g.eval(r))
}

/// Strengths `exp(-d)`: pairwise odds depend on distance differences, so
/// the model is not scale-free.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExponentialStrength;

impl PairwiseModel for ExponentialStrength {
    fn name(&self) -> String {
        "exp-strength".into()
    }

    fn preference_probability(&self, dists: &[f64], j: usize, j_prime: usize) -> f64 {
        1.0 / (1.0 + (dists[j] - dists[j_prime]).exp())
    }
}

/// Mallows marginals driven by the rank gap between two candidates in the
/// voter's distance order.
#[derive(Clone, Copy, Debug)]
pub struct Mallows {
    pub phi: f64,
}

impl Mallows {
    pub fn new(phi: f64) -> Result<Self> {
        check_range("phi", phi, f64::MIN_POSITIVE, 1.0 - f64::EPSILON, "(0, 1)")?;
        Ok(Self { phi })
    }
}

impl PairwiseModel for Mallows {
    fn name(&self) -> String {
        format!("mallows(phi={})", self.phi)
    }

    fn preference_probability(&self, dists: &[f64], j: usize, j_prime: usize) -> f64 {
        if j == j_prime {
            return 0.5;
        }
        let rank = |c: usize| {
            dists
                .iter()
                .enumerate()
                .filter(|&(k, &d)| d < dists[c] || (d == dists[c] && k < c))
                .count()
        };
        mallows_pairwise_marginal(rank(j), rank(j_prime), self.phi).expect("distinct ranks, phi checked")
    }
}

/// `h(k, phi) = k / (1 - phi^k)`, extended to `k = 0` by its limit `-1 / ln phi`.
pub fn mallows_h(k: f64, phi: f64) -> f64 {
    if k == 0.0 {
        -1.0 / phi.ln()
    } else {
        k / (1.0 - phi.powf(k))
    }
}

/// `P[j above j']` under Mallows for reference ranks `rank_j`, `rank_j_prime`
/// (0 is best). A positive gap `k = rank_j' - rank_j` gives
/// `h(k + 1) - h(k)`; a negative gap is the complement of the mirrored pair.
pub fn mallows_pairwise_marginal(rank_j: usize, rank_j_prime: usize, phi: f64) -> Result<f64> {
    check_range("phi", phi, f64::MIN_POSITIVE, 1.0 - f64::EPSILON, "(0, 1)")?;
    if rank_j == rank_j_prime {
        return Err(Error::Precondition("Mallows marginal needs distinct ranks".into()));
    }
    let forward = |k: usize| {
        let k = k as f64;
        mallows_h(k + 1.0, phi) - mallows_h(k, phi)
    };
    Ok(if rank_j < rank_j_prime {
        forward(rank_j_prime - rank_j)
    } else {
        1.0 - forward(rank_j - rank_j_prime)
    })
}
