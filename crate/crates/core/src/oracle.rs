//! Exact expectations by enumerating every vote profile of a tiny election.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::models::ElectionModel;
use crate::profile::VoteProfile;
use crate::rules::Rule;

/// Largest number of profiles `(m!)^n` the oracle will visit.
pub const MAX_PROFILES: f64 = 1e6;

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub distortion: f64,
    pub total_probability: f64,
    pub profiles_visited: usize,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<u32>> {
    let mut current: Vec<u32> = (0..m as u32).collect();
    let mut out = vec![current.clone()];
    // next lexicographic permutation until exhausted
    loop {
        let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| current[j] > current[i - 1]).expect("pivot has a successor");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Calls `visit(profile, probability)` for every profile of nonzero
/// probability and returns the total probability seen.
pub fn enumerate_profiles(
    instance: &MetricInstance,
    model: &ElectionModel,
    mut visit: impl FnMut(&VoteProfile, f64),
) -> Result<(f64, usize)> {
    let (n, m) = (instance.n(), instance.m());
    model.validate(n, m)?;
    let count = (1..=m).map(|k| k as f64).product::<f64>().powi(n as i32);
    if count > MAX_PROFILES {
        return Err(Error::TooLarge { profiles: count, limit: MAX_PROFILES });
    }
    let perms = permutations(m);
    let mut dists = Vec::with_capacity(m);
    let mut support: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (i, dist) in model.voters() {
        instance.voter_distances(i, &mut dists);
        if dist.is_pl() {
            crate::models::check_pl_distances(&dists, i)?;
        }
        support.push(
            perms
                .iter()
                .enumerate()
                .map(|(k, p)| (k, dist.ranking_probability(&dists, p)))
                .filter(|&(_, p)| p > 0.0)
                .collect(),
        );
    }

    let mut profile = VoteProfile::from_flat(m, vec![0; n * m]);
    let mut total = CompensatedSum::default();
    let mut visited = 0usize;
    let mut choice = vec![0usize; n];
    let mut weight = vec![1.0f64; n + 1];
    let mut depth = 0usize;
    // iterative depth-first walk over voters
    loop {
        if depth == n {
            visit(&profile, weight[n]);
            total.add(weight[n]);
            visited += 1;
            if n == 0 {
                break;
            }
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        if choice[depth] == support[depth].len() {
            if depth == 0 {
                break;
            }
            choice[depth] = 0;
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        let (k, p) = support[depth][choice[depth]];
        profile.flat_mut()[depth * m..(depth + 1) * m].copy_from_slice(&perms[k]);
        weight[depth + 1] = weight[depth] * p;
        depth += 1;
    }
    Ok((total.value(), visited))
}

/// Expectation of a vector-valued statistic over all profiles.
pub fn brute_force_expectation(
    instance: &MetricInstance,
    model: &ElectionModel,
    len: usize,
    mut stat: impl FnMut(&VoteProfile) -> Vec<f64>,
) -> Result<Vec<f64>> {
    let mut acc = vec![CompensatedSum::default(); len];
    let (total, _) = enumerate_profiles(instance, model, |profile, p| {
        for (a, v) in acc.iter_mut().zip(stat(profile)) {
            a.add(p * v);
        }
    })?;
    check_total(total)?;
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

fn check_total(total: f64) -> Result<()> {
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("profile probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Exact `E[SC(rule(profile))] / min_j SC(j)`. Random Dictator contributes
/// the expected social cost of its outcome distribution.
pub fn brute_force_distortion(instance: &MetricInstance, model: &ElectionModel, rule: Rule) -> Result<OracleResult> {
    let table = instance.optimal_candidate();
    let opt = table.optimal_cost();
    if opt <= 0.0 {
        return Err(Error::DegenerateInstance);
    }
    let mut acc = CompensatedSum::default();
    let (total, visited) = enumerate_profiles(instance, model, |profile, p| {
        acc.add(p * rule.apply(profile).expectation(&table.costs));
    })?;
    check_total(total)?;
    Ok(OracleResult {
        distortion: acc.value() / opt,
        total_probability: total,
        profiles_visited: visited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PerVoterDistribution;

    fn quarter_instance() -> MetricInstance {
        MetricInstance::euclidean(1, &[vec![0.25]], &[vec![0.0], vec![1.0]]).unwrap()
    }

    #[test]
    fn permutation_count_and_order() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(5).len(), 120);
    }

    #[test]
    fn single_voter_examples() {
        let inst = quarter_instance();
        let model = ElectionModel::pl(1, 2.0);
        for rule in [Rule::RandomDictator, Rule::Plurality, Rule::Copeland, Rule::Borda] {
            let r = brute_force_distortion(&inst, &model, rule).unwrap();
            assert!((r.distortion - 1.2).abs() < 1e-12, "{rule}: {r:?}");
        }
        let sure = ElectionModel::uniform(1, PerVoterDistribution::TopOrLast { favored: 0, q: 1.0 });
        let r = brute_force_distortion(&inst, &sure, Rule::Plurality).unwrap();
        assert_eq!(r.distortion, 1.0);
    }

    #[test]
    fn total_probability_is_one() {
        let inst = MetricInstance::euclidean(1, &[vec![0.1], vec![0.6], vec![0.9]], &[vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        let r = brute_force_distortion(&inst, &ElectionModel::pl(3, 1.5), Rule::Copeland).unwrap();
        assert!((r.total_probability - 1.0).abs() < 1e-12);
        assert_eq!(r.profiles_visited, 216);
    }

    #[test]
    fn too_large() {
        let voters: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let inst = MetricInstance::euclidean(1, &voters, &[vec![0.5], vec![1.5], vec![2.5]]).unwrap();
        assert!(matches!(
            brute_force_distortion(&inst, &ElectionModel::pl(8, 2.0), Rule::Borda),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_optimum_is_degenerate() {
        let inst = MetricInstance::euclidean(1, &[vec![0.0]], &[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            brute_force_distortion(&inst, &ElectionModel::pl(1, 2.0), Rule::Plurality),
            Err(Error::DegenerateInstance)
        ));
    }

    #[test]
    fn compensated_sum() {
        let mut s = CompensatedSum::default();
        for v in [1.0, 1e100, 1.0, -1e100] {
            s.add(v);
        }
        assert_eq!(s.value(), 2.0);
    }
}
