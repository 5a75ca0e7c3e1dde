//! Seeded Monte Carlo estimation, exact expected Borda scores and bound
//! sweeps.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    borda_order, compute_constants, copeland_bound_limit, plurality_bound_limit, rd_lower_bound, rd_upper_bound,
    wu_bound_golden,
};
use crate::constructions::ConstructedElection;
use crate::error::{Error, Result};
use crate::metric::{distance_ratio, MetricInstance};
use crate::models::{ElectionModel, GFunction};
use crate::profile::VoteProfile;
use crate::rng::StreamFactory;
use crate::rules::Rule;

pub const DEFAULT_TRIALS: usize = 10_000;

/// Trials per work unit. Fixed so the reduction order does not depend on
/// the number of threads.
const CHUNK: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionEstimate {
    pub mean_ratio: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
    pub rule: Rule,
    pub model: String,
}

/// Streaming mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two partial summaries.
    pub fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Welford {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.sample_variance() / self.count as f64).sqrt()
    }
}

/// Draws the profile of trial `trial` into `profile`.
fn sample_profile(
    instance: &MetricInstance,
    model: &ElectionModel,
    factory: &StreamFactory,
    trial: u64,
    profile: &mut VoteProfile,
    dists: &mut Vec<f64>,
) -> Result<()> {
    let m = instance.m();
    let flat = profile.flat_mut();
    for (i, dist) in model.voters() {
        let mut rng = factory.stream(trial, i as u64);
        if dist.is_pl() {
            instance.voter_distances(i, dists);
        }
        dist.sample(dists, i, &mut rng, &mut flat[i * m..(i + 1) * m])?;
    }
    Ok(())
}

/// Runs `per_trial` on `trials` sampled profiles in parallel and reduces in
/// trial order.
fn run_trials(
    instance: &MetricInstance,
    model: &ElectionModel,
    trials: usize,
    seed: u64,
    per_trial: impl Fn(&VoteProfile) -> f64 + Sync,
) -> Result<Welford> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let (n, m) = (instance.n(), instance.m());
    model.validate(n, m)?;
    let factory = StreamFactory::new(seed);
    let chunks: Vec<Welford> = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut stats = Welford::default();
            let mut profile = VoteProfile::from_flat(m, vec![0; n * m]);
            let mut dists = Vec::with_capacity(m);
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                sample_profile(instance, model, &factory, t as u64, &mut profile, &mut dists)?;
                profile.seed = Some(seed);
                stats.push(per_trial(&profile));
            }
            Ok(stats)
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().fold(Welford::default(), Welford::merge))
}

/// Monte Carlo estimate of `E[SC(rule(profile))] / min_j SC(j)`. Random
/// Dictator uses the expected social cost of its outcome in every trial.
pub fn estimate_distortion(
    instance: &MetricInstance,
    model: &ElectionModel,
    rule: Rule,
    trials: usize,
    seed: u64,
) -> Result<DistortionEstimate> {
    let table = instance.optimal_candidate();
    let opt = table.optimal_cost();
    if opt <= 0.0 {
        return Err(Error::DegenerateInstance);
    }
    let stats = run_trials(instance, model, trials, seed, |profile| {
        rule.apply(profile).expectation(&table.costs) / opt
    })?;
    Ok(DistortionEstimate {
        mean_ratio: stats.mean(),
        stderr: stats.stderr(),
        trials,
        seed,
        rule,
        model: model.id(),
    })
}

pub fn estimate_election(election: &ConstructedElection, rule: Rule, trials: usize, seed: u64) -> Result<DistortionEstimate> {
    estimate_distortion(&election.instance, &election.model, rule, trials, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Frequency {
    pub frequency: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Fraction of trials in which `target` wins. Random Dictator counts the
/// probability its outcome picks `target`.
pub fn win_frequency(
    instance: &MetricInstance,
    model: &ElectionModel,
    rule: Rule,
    target: usize,
    trials: usize,
    seed: u64,
) -> Result<Frequency> {
    instance.check_candidate(target)?;
    if instance.optimal_candidate().optimal_cost() <= 0.0 {
        return Err(Error::DegenerateInstance);
    }
    let stats = run_trials(instance, model, trials, seed, |profile| rule.apply(profile).distribution[target])?;
    Ok(Frequency { frequency: stats.mean(), stderr: stats.stderr(), trials })
}

/// Exact expected Borda scores when every pairwise marginal is
/// `g(d(i, j') / d(i, j))`. Candidates at equal distance from a voter are
/// grouped, and consecutive voters with identical distances reuse the
/// previous row.
pub fn expected_borda_scores(instance: &MetricInstance, g: &GFunction) -> Vec<f64> {
    let m = instance.m();
    let mut totals = vec![0.0; m];
    let mut dists = Vec::with_capacity(m);
    let mut prev: Vec<f64> = Vec::new();
    let mut repeat = 0usize;
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut level_score: Vec<f64> = Vec::new();
    let mut flush = |prev: &[f64], repeat: usize, levels: &mut Vec<(f64, usize)>, level_score: &mut Vec<f64>| {
        if repeat == 0 {
            return;
        }
        levels.clear();
        let mut sorted = prev.to_vec();
        sorted.sort_by(f64::total_cmp);
        for d in sorted {
            match levels.last_mut() {
                Some((v, c)) if *v == d => *c += 1,
                _ => levels.push((d, 1)),
            }
        }
        level_score.clear();
        // a candidate at distance v beats one at distance u with g(u / v)
        level_score.extend(levels.iter().map(|&(v, _)| {
            levels.iter().map(|&(u, c)| c as f64 * g.eval(distance_ratio(v, u))).sum::<f64>() - 0.5
        }));
        for (j, d) in prev.iter().enumerate() {
            let k = levels.partition_point(|&(v, _)| v < *d);
            totals[j] += repeat as f64 * level_score[k];
        }
    };
    for i in 0..instance.n() {
        instance.voter_distances(i, &mut dists);
        if repeat > 0 && dists == prev {
            repeat += 1;
            continue;
        }
        flush(&prev, repeat, &mut levels, &mut level_score);
        std::mem::swap(&mut prev, &mut dists);
        repeat = 1;
    }
    flush(&prev, repeat, &mut levels, &mut level_score);
    totals
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub m: usize,
    pub rule: String,
    /// `upper`, `lower`, or `order` for the Borda growth rate.
    pub bound_kind: String,
    pub value: f64,
}

/// Closed-form bounds for every Plackett-Luce `theta` and candidate count.
pub fn sweep_bounds(thetas: &[f64], ms: &[usize]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &theta in thetas {
        let g = GFunction::pl(theta)?;
        let c = compute_constants(&g)?;
        for &m in ms {
            let mut row = |rule: &str, kind: &str, value: f64| {
                rows.push(SweepRow { theta, m, rule: rule.into(), bound_kind: kind.into(), value });
            };
            row("copeland", "upper", copeland_bound_limit(&c));
            row("plurality", "upper", plurality_bound_limit(m, &c));
            row("weighted_uncovered", "upper", wu_bound_golden(&c));
            row("random_dictator", "upper", rd_upper_bound(m, &c)?);
            row("random_dictator", "lower", rd_lower_bound(m, f64::INFINITY, &g)?);
            row("borda", "order", borda_order(m, theta)?);
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: [&str; 5] = ["theta", "m", "rule", "bound_kind", "value"];

/// Writes rows as CSV with floats at 17 significant digits.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.theta),
            r.m.to_string(),
            r.rule.clone(),
            r.bound_kind.clone(),
            format!("{:.16e}", r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Uniform points in `[0, 1]^dim` for property tests.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, m: usize) -> Result<MetricInstance> {
    let mut point = || {
        let mut p = [0.0; 3];
        for x in p.iter_mut().take(dim) {
            *x = rng.random::<f64>();
        }
        p
    };
    let voters = (0..n).map(|_| point()).collect();
    let candidates = (0..m).map(|_| point()).collect();
    MetricInstance::from_points(dim, voters, candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PerVoterDistribution;
    use crate::oracle::brute_force_expectation;
    use crate::rules::borda;
    use rand::SeedableRng;

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let mut whole = Welford::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..33].iter().for_each(|&x| a.push(x));
        xs[33..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert!((merged.mean() - whole.mean()).abs() < 1e-12);
        assert!((merged.sample_variance() - whole.sample_variance()).abs() < 1e-12);
    }

    #[test]
    fn unanimous_is_exactly_one() {
        let inst = MetricInstance::euclidean(1, &[vec![0.0], vec![0.0], vec![0.2]], &[vec![0.0], vec![5.0]]).unwrap();
        let model = ElectionModel::uniform(3, PerVoterDistribution::TopOrLast { favored: 1, q: 0.0 });
        for rule in [Rule::Plurality, Rule::Copeland, Rule::Borda, Rule::WeightedUncovered] {
            let e = estimate_distortion(&inst, &model, rule, 200, 1).unwrap();
            assert_eq!(e.mean_ratio, 1.0);
            assert_eq!(e.stderr, 0.0);
        }
        let f = win_frequency(&inst, &model, Rule::Plurality, 0, 50, 1).unwrap();
        assert_eq!(f.frequency, 1.0);
    }

    #[test]
    fn single_voter_random_dictator() {
        let inst = MetricInstance::euclidean(1, &[vec![0.25]], &[vec![0.0], vec![1.0]]).unwrap();
        let e = estimate_distortion(&inst, &ElectionModel::pl(1, 2.0), Rule::RandomDictator, 20_000, 3).unwrap();
        assert!((e.mean_ratio - 1.2).abs() < 3.0 * e.stderr + 1e-9, "{e:?}");
    }

    #[test]
    fn errors() {
        let inst = MetricInstance::euclidean(1, &[vec![0.0]], &[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            estimate_distortion(&inst, &ElectionModel::pl(1, 2.0), Rule::Plurality, 10, 0),
            Err(Error::DegenerateInstance)
        ));
        let inst = MetricInstance::euclidean(1, &[vec![0.5]], &[vec![0.0], vec![1.0]]).unwrap();
        assert!(estimate_distortion(&inst, &ElectionModel::pl(1, 2.0), Rule::Plurality, 0, 0).is_err());
        assert!(estimate_distortion(&inst, &ElectionModel::pl(2, 2.0), Rule::Plurality, 5, 0).is_err());
        let tie = MetricInstance::euclidean(1, &[vec![0.0]], &[vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            win_frequency(&tie, &ElectionModel::pl(1, 2.0), Rule::Plurality, 0, 5, 0),
            Err(Error::DegenerateInstance) | Err(Error::DegenerateTie { .. })
        ));
    }

    #[test]
    fn borda_scores_symmetric_and_conserved() {
        let g = GFunction::pl(2.0).unwrap();
        let inst = MetricInstance::from_matrix(
            2,
            &[
                vec![0.0, 2.0, 1.0, 1.0, 1.0],
                vec![2.0, 0.0, 1.0, 1.0, 1.0],
                vec![1.0, 1.0, 0.0, 2.0, 2.0],
                vec![1.0, 1.0, 2.0, 0.0, 2.0],
                vec![1.0, 1.0, 2.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(expected_borda_scores(&inst, &g), vec![2.0; 3]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let inst = random_instance(&mut rng, 2, 17, 5).unwrap();
        let total: f64 = expected_borda_scores(&inst, &g).iter().sum();
        assert!((total - 17.0 * 10.0).abs() < 1e-9);
    }

    #[test]
    fn borda_scores_match_enumeration() {
        let g = GFunction::pl(2.0).unwrap();
        let inst = MetricInstance::euclidean(1, &[vec![0.1], vec![0.7]], &[vec![0.0], vec![0.5], vec![1.2]]).unwrap();
        let exact = brute_force_expectation(&inst, &ElectionModel::pl(2, 2.0), 3, |p| {
            borda(p).0.iter().map(|&s| s as f64).collect()
        })
        .unwrap();
        for (a, b) in expected_borda_scores(&inst, &g).iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn sweep_shape_and_csv() {
        let rows = sweep_bounds(&[2.0, 4.0], &[5, 10]).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 6);
        let cope: Vec<f64> = rows.iter().filter(|r| r.rule == "copeland").map(|r| r.value).collect();
        assert!((cope[0] - 2.0).abs() < 1e-9 && cope[0] == cope[1]);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,m,rule,bound_kind,value\n"));
        assert_eq!(text.lines().count(), rows.len() + 1);
        assert!(sweep_bounds(&[1.0], &[5]).is_err());
    }
}
