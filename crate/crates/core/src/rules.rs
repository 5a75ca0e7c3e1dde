//! Voting rules over a vote profile. Every tie is broken toward the
//! lowest candidate index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::profile::VoteProfile;

/// `(sqrt(5) - 1) / 2`.
pub const GOLDEN_LAMBDA: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Plurality,
    Copeland,
    Borda,
    RandomDictator,
    WeightedUncovered,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::Plurality,
        Rule::Copeland,
        Rule::Borda,
        Rule::RandomDictator,
        Rule::WeightedUncovered,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Copeland => "copeland",
            Rule::Borda => "borda",
            Rule::RandomDictator => "random_dictator",
            Rule::WeightedUncovered => "weighted_uncovered",
        }
    }

    pub fn apply(self, profile: &VoteProfile) -> RuleOutcome {
        match self {
            Rule::Plurality => plurality(profile),
            Rule::Copeland => copeland(profile),
            Rule::Borda => borda(profile).1,
            Rule::RandomDictator => random_dictator(profile),
            Rule::WeightedUncovered => weighted_uncovered(profile),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown rule {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleOutcome {
    pub distribution: Vec<f64>,
    pub winner: usize,
}

impl RuleOutcome {
    fn deterministic(m: usize, winner: usize) -> Self {
        let mut distribution = vec![0.0; m];
        distribution[winner] = 1.0;
        Self { distribution, winner }
    }

    /// Expected value of `per_candidate` under the outcome distribution.
    pub fn expectation(&self, per_candidate: &[f64]) -> f64 {
        if self.distribution[self.winner] == 1.0 {
            return per_candidate[self.winner];
        }
        self.distribution.iter().zip(per_candidate).map(|(p, v)| p * v).sum()
    }
}

/// `wins[j][j']` = number of voters ranking `j` above `j'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairwiseTally {
    pub n: usize,
    pub m: usize,
    wins: Vec<u32>,
}

impl PairwiseTally {
    pub fn wins(&self, j: usize, j_prime: usize) -> u32 {
        self.wins[j * self.m + j_prime]
    }

    pub fn matrix(&self) -> Vec<Vec<u32>> {
        self.wins.chunks(self.m).map(<[u32]>::to_vec).collect()
    }
}

pub fn pairwise_tally(profile: &VoteProfile) -> PairwiseTally {
    let m = profile.m();
    let mut wins = vec![0u32; m * m];
    for ranking in profile.rankings() {
        for (k, &a) in ranking.iter().enumerate() {
            let row = a as usize * m;
            for &b in &ranking[k + 1..] {
                wins[row + b as usize] += 1;
            }
        }
    }
    PairwiseTally { n: profile.n(), m, wins }
}

fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = j;
        }
    }
    best
}

pub fn plurality(profile: &VoteProfile) -> RuleOutcome {
    let mut counts = vec![0u32; profile.m()];
    for i in 0..profile.n() {
        counts[profile.top(i)] += 1;
    }
    RuleOutcome::deterministic(profile.m(), argmax_first(&counts))
}

pub fn copeland_scores(tally: &PairwiseTally) -> Vec<u32> {
    let n = tally.n as u64;
    (0..tally.m)
        .map(|j| (0..tally.m).filter(|&k| k != j && 2 * u64::from(tally.wins(j, k)) > n).count() as u32)
        .collect()
}

pub fn copeland(profile: &VoteProfile) -> RuleOutcome {
    let scores = copeland_scores(&pairwise_tally(profile));
    RuleOutcome::deterministic(profile.m(), argmax_first(&scores))
}

/// Borda scores `sum_{j'} wins[j][j']` and the winner.
pub fn borda(profile: &VoteProfile) -> (Vec<u64>, RuleOutcome) {
    let m = profile.m();
    let mut scores = vec![0u64; m];
    for ranking in profile.rankings() {
        for (pos, &c) in ranking.iter().enumerate() {
            scores[c as usize] += (m - 1 - pos) as u64;
        }
    }
    let winner = argmax_first(&scores);
    (scores, RuleOutcome::deterministic(m, winner))
}

pub fn random_dictator(profile: &VoteProfile) -> RuleOutcome {
    let mut counts = vec![0u32; profile.m()];
    for i in 0..profile.n() {
        counts[profile.top(i)] += 1;
    }
    let n = profile.n() as f64;
    RuleOutcome {
        winner: argmax_first(&counts),
        distribution: counts.iter().map(|&c| f64::from(c) / n).collect(),
    }
}

/// Candidates that reach every other candidate either directly with more
/// than `(1 - lambda) n` votes, or through an intermediate they beat that
/// way which in turn beats the target with more than `lambda n` votes.
pub fn lambda_uncovered_set(profile: &VoteProfile, lambda: f64) -> Result<Vec<usize>> {
    check_range("lambda", lambda, 0.5, 1.0, "[0.5, 1]")?;
    Ok(lambda_uncovered_from_tally(&pairwise_tally(profile), lambda))
}

pub fn lambda_uncovered_from_tally(tally: &PairwiseTally, lambda: f64) -> Vec<usize> {
    let m = tally.m;
    let n = tally.n as f64;
    let strong = |a: usize, b: usize| f64::from(tally.wins(a, b)) > (1.0 - lambda) * n;
    let weak = |a: usize, b: usize| f64::from(tally.wins(a, b)) > lambda * n;
    (0..m)
        .filter(|&j| {
            (0..m).filter(|&t| t != j).all(|t| {
                strong(j, t) || (0..m).any(|mid| mid != j && mid != t && strong(j, mid) && weak(mid, t))
            })
        })
        .collect()
}

/// Lowest-index member of the golden-ratio uncovered set. When ties leave
/// that set empty the Copeland winner is returned.
pub fn weighted_uncovered(profile: &VoteProfile) -> RuleOutcome {
    let tally = pairwise_tally(profile);
    let winner = match lambda_uncovered_from_tally(&tally, GOLDEN_LAMBDA).first() {
        Some(&j) => j,
        None => argmax_first(&copeland_scores(&tally)),
    };
    RuleOutcome::deterministic(profile.m(), winner)
}
