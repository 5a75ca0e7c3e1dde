use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::metric::MetricInstance;

use super::GFunction;

/// Ranking distribution of a single voter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerVoterDistribution {
    /// Plackett-Luce with strengths `d^-theta`.
    Pl { theta: f64 },
    /// `favored` first with probability `q`, otherwise last; everyone else
    /// in uniform random order.
    TopOrLast { favored: usize, q: f64 },
    /// With probability `q`: a uniform member of `favored_set` first,
    /// `runner_up` second, the rest uniform. Otherwise `runner_up` first and
    /// the rest uniform.
    #[serde(rename = "top_uniform")]
    TopUniformThenFixed {
        favored_set: Vec<usize>,
        q: f64,
        runner_up: usize,
    },
}

impl PerVoterDistribution {
    pub fn validate(&self, m: usize) -> Result<()> {
        let check_index = |c: usize| {
            if c >= m {
                Err(Error::IndexOutOfRange { what: "candidate", index: c, len: m })
            } else {
                Ok(())
            }
        };
        match self {
            Self::Pl { theta } => {
                GFunction::pl(*theta)?;
            }
            Self::TopOrLast { favored, q } => {
                check_index(*favored)?;
                check_range("q", *q, 0.0, 1.0, "[0, 1]")?;
            }
            Self::TopUniformThenFixed { favored_set, q, runner_up } => {
                check_range("q", *q, 0.0, 1.0, "[0, 1]")?;
                check_index(*runner_up)?;
                if favored_set.is_empty() {
                    return Err(Error::Precondition("favored_set is empty".into()));
                }
                let mut seen = vec![false; m];
                seen[*runner_up] = true;
                for &c in favored_set {
                    check_index(c)?;
                    if std::mem::replace(&mut seen[c], true) {
                        return Err(Error::Precondition(format!(
                            "candidate {c} repeats in favored_set or equals runner_up"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_pl(&self) -> bool {
        matches!(self, Self::Pl { .. })
    }

    /// Draws a ranking into `out`. `dists` is only read by the PL variant.
    pub fn sample<R: Rng + ?Sized>(&self, dists: &[f64], voter: usize, rng: &mut R, out: &mut [u32]) -> Result<()> {
        let m = out.len();
        match self {
            Self::Pl { theta } => sample_pl_into(dists, *theta, voter, rng, out)?,
            Self::TopOrLast { favored, q } => {
                let favored = *favored as u32;
                let rest = if rng.random::<f64>() < *q {
                    out[0] = favored;
                    &mut out[1..]
                } else {
                    out[m - 1] = favored;
                    &mut out[..m - 1]
                };
                fill_except(rest, &[favored]);
                rest.shuffle(rng);
            }
            Self::TopUniformThenFixed { favored_set, q, runner_up } => {
                let runner_up = *runner_up as u32;
                if rng.random::<f64>() < *q {
                    let top = favored_set[rng.random_range(0..favored_set.len())] as u32;
                    out[0] = top;
                    out[1] = runner_up;
                    let rest = &mut out[2..];
                    fill_except(rest, &[top, runner_up]);
                    rest.shuffle(rng);
                } else {
                    out[0] = runner_up;
                    let rest = &mut out[1..];
                    fill_except(rest, &[runner_up]);
                    rest.shuffle(rng);
                }
            }
        }
        Ok(())
    }

    /// Exact probability of `ranking`.
    pub fn ranking_probability(&self, dists: &[f64], ranking: &[u32]) -> f64 {
        let m = ranking.len();
        match self {
            Self::Pl { theta } => pl_ranking_probability(dists, *theta, ranking),
            Self::TopOrLast { favored, q } => {
                let favored = *favored as u32;
                let uniform = 1.0 / factorial(m - 1);
                let mut p = 0.0;
                if ranking[0] == favored {
                    p += q * uniform;
                }
                if ranking[m - 1] == favored {
                    p += (1.0 - q) * uniform;
                }
                p
            }
            Self::TopUniformThenFixed { favored_set, q, runner_up } => {
                let runner_up = *runner_up as u32;
                if ranking[0] == runner_up {
                    (1.0 - q) / factorial(m - 1)
                } else if m >= 2 && ranking[1] == runner_up && favored_set.contains(&(ranking[0] as usize)) {
                    q / favored_set.len() as f64 / factorial(m - 2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact `P[j above j']`.
    pub fn pairwise_marginal(&self, dists: &[f64], j: usize, j_prime: usize) -> f64 {
        if j == j_prime {
            return 0.5;
        }
        match self {
            Self::Pl { theta } => super::pairwise::PairwiseModel::preference_probability(
                &GFunction::PlackettLuce { theta: *theta },
                dists,
                j,
                j_prime,
            ),
            Self::TopOrLast { favored, q } => {
                if j == *favored {
                    *q
                } else if j_prime == *favored {
                    1.0 - q
                } else {
                    0.5
                }
            }
            Self::TopUniformThenFixed { favored_set, q, runner_up } => {
                let f = favored_set.len() as f64;
                let in_set = |c: usize| favored_set.contains(&c);
                // value for (a, b) with a ranked in a "stronger" role than b
                let forward = |a: usize, b: usize| -> Option<f64> {
                    if in_set(a) && b == *runner_up {
                        Some(q / f)
                    } else if in_set(a) && !in_set(b) {
                        Some(q * (1.0 / f + (1.0 - 1.0 / f) / 2.0) + (1.0 - q) / 2.0)
                    } else if a == *runner_up && !in_set(b) {
                        Some(1.0)
                    } else if in_set(a) == in_set(b) && a != *runner_up && b != *runner_up {
                        Some(0.5)
                    } else {
                        None
                    }
                };
                forward(j, j_prime)
                    .or_else(|| forward(j_prime, j).map(|p| 1.0 - p))
                    .expect("every pair falls in one role")
            }
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

fn fill_except(slots: &mut [u32], skip: &[u32]) {
    let mut c = 0u32;
    for s in slots.iter_mut() {
        while skip.contains(&c) {
            c += 1;
        }
        *s = c;
        c += 1;
    }
}

/// Rejects voters that sit on two or more candidates.
pub(crate) fn check_pl_distances(dists: &[f64], voter: usize) -> Result<()> {
    coincident(dists, voter).map(|_| ())
}

/// Index of the single candidate at distance zero, or a degenerate-tie
/// error when several coincide with the voter.
fn coincident(dists: &[f64], voter: usize) -> Result<Option<usize>> {
    let mut hit = None;
    let mut count = 0;
    for (j, &d) in dists.iter().enumerate() {
        if d == 0.0 {
            count += 1;
            hit.get_or_insert(j);
        }
    }
    match count {
        0 => Ok(None),
        1 => Ok(hit),
        _ => Err(Error::DegenerateTie { voter, count }),
    }
}

/// Sequential Plackett-Luce sampling realized as an exponential race:
/// sorting `ln E_j + theta ln d_j` ascending with `E_j ~ Exp(1)` has the
/// same law as repeatedly drawing the top choice with probability
/// proportional to `d^-theta`.
fn sample_pl_into<R: Rng + ?Sized>(dists: &[f64], theta: f64, voter: usize, rng: &mut R, out: &mut [u32]) -> Result<()> {
    coincident(dists, voter)?;
    let mut keys: Vec<(f64, u32)> = dists
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let e: f64 = rng.sample(Exp1);
            (e.ln() + theta * d.ln(), j as u32)
        })
        .collect();
    keys.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (slot, (_, c)) in out.iter_mut().zip(keys) {
        *slot = c;
    }
    Ok(())
}

fn pl_ranking_probability(dists: &[f64], theta: f64, ranking: &[u32]) -> f64 {
    let zeros = dists.iter().filter(|&&d| d == 0.0).count();
    let mut p = 1.0;
    let mut rest: Vec<usize> = ranking.iter().map(|&c| c as usize).collect();
    if zeros > 0 {
        if zeros > 1 || dists[rest[0]] != 0.0 {
            return 0.0;
        }
        rest.remove(0);
    }
    let dmin = rest.iter().map(|&c| dists[c]).fold(f64::INFINITY, f64::min);
    let strength: Vec<f64> = rest.iter().map(|&c| (dists[c] / dmin).powf(-theta)).collect();
    let mut remaining: f64 = strength.iter().sum();
    for s in &strength {
        p *= s / remaining;
        remaining -= s;
    }
    p
}

/// `d(i, j)^-theta / sum_k d(i, k)^-theta`; a voter on top of one
/// candidate picks it surely.
pub fn pl_top_choice_probability(instance: &MetricInstance, theta: f64, voter: usize, j: usize) -> Result<f64> {
    GFunction::pl(theta)?;
    instance.check_voter(voter)?;
    instance.check_candidate(j)?;
    let mut dists = Vec::new();
    instance.voter_distances(voter, &mut dists);
    pl_top_choice_from_distances(&dists, theta, voter, j)
}

pub(crate) fn pl_top_choice_from_distances(dists: &[f64], theta: f64, voter: usize, j: usize) -> Result<f64> {
    if let Some(c) = coincident(dists, voter)? {
        return Ok(if c == j { 1.0 } else { 0.0 });
    }
    let dmin = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let total: f64 = dists.iter().map(|d| (d / dmin).powf(-theta)).sum();
    Ok((dists[j] / dmin).powf(-theta) / total)
}

/// One Plackett-Luce ranking for `voter`.
pub fn sample_pl_ranking<R: Rng + ?Sized>(instance: &MetricInstance, theta: f64, voter: usize, rng: &mut R) -> Result<Vec<usize>> {
    GFunction::pl(theta)?;
    instance.check_voter(voter)?;
    let mut dists = Vec::new();
    instance.voter_distances(voter, &mut dists);
    sample_pl_from_distances(&dists, theta, voter, rng)
}

/// Plackett-Luce ranking from a raw distance vector (any `m >= 1`).
pub fn sample_pl_from_distances<R: Rng + ?Sized>(dists: &[f64], theta: f64, voter: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut out = vec![0u32; dists.len()];
    sample_pl_into(dists, theta, voter, rng, &mut out)?;
    Ok(out.into_iter().map(|c| c as usize).collect())
}

/// Ranking from one of the distance-free construction distributions.
pub fn sample_construction_ranking<R: Rng + ?Sized>(dist: &PerVoterDistribution, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if dist.is_pl() {
        return Err(Error::Precondition("Plackett-Luce rankings need distances".into()));
    }
    dist.validate(m)?;
    let mut out = vec![0u32; m];
    dist.sample(&[], 0, rng, &mut out)?;
    Ok(out.into_iter().map(|c| c as usize).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_perms(m: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur: Vec<u32> = (0..m as u32).collect();
        permute(&mut cur, 0, &mut out);
        out
    }

    fn permute(v: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, out);
            v.swap(k, i);
        }
    }

    fn dists_for_tests() -> Vec<f64> {
        vec![0.4, 1.3, 0.9, 2.2]
    }

    fn all_dists() -> Vec<PerVoterDistribution> {
        vec![
            PerVoterDistribution::Pl { theta: 2.5 },
            PerVoterDistribution::TopOrLast { favored: 2, q: 0.3 },
            PerVoterDistribution::TopUniformThenFixed { favored_set: vec![1, 3], q: 0.7, runner_up: 0 },
            PerVoterDistribution::TopUniformThenFixed { favored_set: vec![2], q: 1.0, runner_up: 3 },
        ]
    }

    #[test]
    fn ranking_probabilities_sum_to_one_and_match_marginals() {
        let d = dists_for_tests();
        let perms = all_perms(4);
        for dist in all_dists() {
            dist.validate(4).unwrap();
            let total: f64 = perms.iter().map(|p| dist.ranking_probability(&d, p)).sum();
            assert!((total - 1.0).abs() < 1e-12, "{dist:?}: {total}");
            for j in 0..4 {
                for k in 0..4 {
                    if j == k {
                        continue;
                    }
                    let enumerated: f64 = perms
                        .iter()
                        .filter(|p| p.iter().position(|&c| c == j as u32) < p.iter().position(|&c| c == k as u32))
                        .map(|p| dist.ranking_probability(&d, p))
                        .sum();
                    let analytic = dist.pairwise_marginal(&d, j, k);
                    assert!((enumerated - analytic).abs() < 1e-12, "{dist:?} ({j},{k}): {enumerated} vs {analytic}");
                }
            }
        }
    }

    #[test]
    fn sampling_frequencies_match_probabilities() {
        let d = dists_for_tests();
        let perms = all_perms(4);
        let trials = 40_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dist in all_dists() {
            let mut counts = std::collections::HashMap::new();
            let mut out = vec![0u32; 4];
            for _ in 0..trials {
                dist.sample(&d, 0, &mut rng, &mut out).unwrap();
                *counts.entry(out.clone()).or_insert(0usize) += 1;
            }
            for p in &perms {
                let expect = dist.ranking_probability(&d, p);
                let freq = *counts.get(p).unwrap_or(&0) as f64 / trials as f64;
                let se = (expect * (1.0 - expect) / trials as f64).sqrt();
                assert!((freq - expect).abs() <= 5.0 * se + 1e-12, "{dist:?} {p:?}: {freq} vs {expect}");
            }
        }
    }

    #[test]
    fn pl_top_choice() {
        let v = vec![vec![0.0]];
        let inst = MetricInstance::euclidean(1, &v, &[vec![1.0], vec![-1.0], vec![1.0]]).unwrap();
        assert!((pl_top_choice_probability(&inst, 2.0, 0, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let inst = MetricInstance::euclidean(1, &v, &[vec![1.0], vec![2.0]]).unwrap();
        assert!((pl_top_choice_probability(&inst, 2.0, 0, 0).unwrap() - 0.8).abs() < 1e-15);
        let inst = MetricInstance::euclidean(1, &v, &[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(pl_top_choice_probability(&inst, 2.0, 0, 0).unwrap(), 1.0);
        let inst = MetricInstance::euclidean(1, &v, &[vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            pl_top_choice_probability(&inst, 2.0, 0, 0),
            Err(Error::DegenerateTie { voter: 0, count: 2 })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_pl_ranking(&inst, 2.0, 0, &mut rng).is_err());
    }

    #[test]
    fn pl_single_candidate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_pl_from_distances(&[0.7], 2.0, 0, &mut rng).unwrap(), vec![0]);
    }

    #[test]
    fn coincident_candidate_leads() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = sample_pl_from_distances(&[1.0, 0.0, 3.0], 1.5, 0, &mut rng).unwrap();
            assert_eq!(r[0], 1);
        }
        let p = pl_ranking_probability(&[1.0, 0.0, 3.0], 1.5, &[1, 0, 2]);
        let expect = 1.0 / (1.0 + 3f64.powf(-1.5));
        assert!((p - expect).abs() < 1e-15);
        assert_eq!(pl_ranking_probability(&[1.0, 0.0, 3.0], 1.5, &[0, 1, 2]), 0.0);
    }

    #[test]
    fn construction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let always = PerVoterDistribution::TopOrLast { favored: 1, q: 1.0 };
        for _ in 0..200 {
            assert_eq!(sample_construction_ranking(&always, 3, &mut rng).unwrap()[0], 1);
        }
        let never = PerVoterDistribution::TopOrLast { favored: 1, q: 0.0 };
        let mut first0 = 0;
        let trials = 10_000;
        for _ in 0..trials {
            let r = sample_construction_ranking(&never, 3, &mut rng).unwrap();
            assert_eq!(r[2], 1);
            first0 += usize::from(r[0] == 0);
        }
        let freq = first0 as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 3.0 * (0.25 / trials as f64).sqrt());

        let rd = PerVoterDistribution::TopUniformThenFixed { favored_set: vec![1, 2], q: 1.0, runner_up: 0 };
        assert_eq!(rd.pairwise_marginal(&[], 0, 1), 0.5);
        assert_eq!(rd.pairwise_marginal(&[], 1, 0), 0.5);
        assert!(sample_construction_ranking(&PerVoterDistribution::Pl { theta: 2.0 }, 3, &mut rng).is_err());
    }

    #[test]
    fn validation() {
        assert!(PerVoterDistribution::TopOrLast { favored: 3, q: 0.5 }.validate(3).is_err());
        assert!(PerVoterDistribution::TopOrLast { favored: 0, q: 1.5 }.validate(3).is_err());
        assert!(PerVoterDistribution::TopUniformThenFixed { favored_set: vec![0, 1], q: 0.5, runner_up: 1 }
            .validate(3)
            .is_err());
        assert!(PerVoterDistribution::Pl { theta: 0.5 }.validate(3).is_err());
    }

    #[test]
    fn json_shape() {
        let d: PerVoterDistribution = serde_json::from_str(r#"{"kind":"top_uniform","favored_set":[1,2],"q":1.0,"runner_up":0}"#).unwrap();
        assert_eq!(d, PerVoterDistribution::TopUniformThenFixed { favored_set: vec![1, 2], q: 1.0, runner_up: 0 });
    }
}
