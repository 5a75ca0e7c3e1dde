//! Pairwise-probability functions, ranking samplers and axiom checks.

mod axioms;
mod distribution;
mod gfunc;
mod pairwise;

pub use axioms::{
    check_class_shape, check_ioc, check_scale_freeness, check_strict_monotonicity, AxiomReport, SHAPE_GRID_HI,
    SHAPE_GRID_LO, SHAPE_GRID_POINTS,
};
pub use distribution::{
    pl_top_choice_probability, sample_construction_ranking, sample_pl_from_distances, sample_pl_ranking,
    PerVoterDistribution,
};
pub(crate) use distribution::{check_pl_distances, pl_top_choice_from_distances};
pub use gfunc::{CustomG, GFunction, ScalarFn, DIFF_STEP};
pub use pairwise::{
    mallows_h, mallows_pairwise_marginal, pairwise_probability, ExponentialStrength, Mallows, PairwiseModel,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A run of consecutive voters sharing one distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoterGroup {
    pub count: usize,
    pub dist: PerVoterDistribution,
}

/// Ranking distributions for all `n` voters of an election, stored as
/// consecutive groups in voter order.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectionModel {
    groups: Vec<VoterGroup>,
    starts: Vec<usize>,
    n: usize,
}

impl ElectionModel {
    pub fn uniform(n: usize, dist: PerVoterDistribution) -> Self {
        Self::from_groups(vec![VoterGroup { count: n, dist }])
    }

    pub fn pl(n: usize, theta: f64) -> Self {
        Self::uniform(n, PerVoterDistribution::Pl { theta })
    }

    pub fn from_groups(groups: Vec<VoterGroup>) -> Self {
        let groups: Vec<VoterGroup> = groups.into_iter().filter(|g| g.count > 0).collect();
        let mut starts = Vec::with_capacity(groups.len());
        let mut n = 0;
        for g in &groups {
            starts.push(n);
            n += g.count;
        }
        Self { groups, starts, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[VoterGroup] {
        &self.groups
    }

    pub fn for_voter(&self, voter: usize) -> &PerVoterDistribution {
        let g = self.starts.partition_point(|&s| s <= voter) - 1;
        &self.groups[g].dist
    }

    /// Iterates `(voter, distribution)` in voter order.
    pub fn voters(&self) -> impl Iterator<Item = (usize, &PerVoterDistribution)> {
        self.groups
            .iter()
            .zip(&self.starts)
            .flat_map(|(g, &s)| (s..s + g.count).map(move |i| (i, &g.dist)))
    }

    pub fn is_all_pl(&self) -> bool {
        self.groups.iter().all(|g| g.dist.is_pl())
    }

    /// Checks the voter count and every distribution against `m`.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::Dimension(format!("model covers {} voters, instance has {n}", self.n)));
        }
        for g in &self.groups {
            g.dist.validate(m)?;
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        match self.groups.as_slice() {
            [g] => dist_id(&g.dist),
            gs => format!("groups({})", gs.iter().map(|g| format!("{}x{}", g.count, dist_id(&g.dist))).collect::<Vec<_>>().join(",")),
        }
    }
}

fn dist_id(d: &PerVoterDistribution) -> String {
    match d {
        PerVoterDistribution::Pl { theta } => format!("pl(theta={theta})"),
        PerVoterDistribution::TopOrLast { favored, q } => format!("top_or_last(favored={favored},q={q})"),
        PerVoterDistribution::TopUniformThenFixed { favored_set, q, runner_up } => {
            format!("top_uniform(set={favored_set:?},q={q},runner_up={runner_up})")
        }
    }
}

/// On-disk model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Every voter uses Plackett-Luce.
    Pl { theta: f64 },
    /// Every voter uses the same construction distribution.
    Construction(PerVoterDistribution),
    /// Explicit groups of consecutive voters.
    PerVoter { groups: Vec<VoterGroup> },
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }

    pub fn into_model(self, n: usize, m: usize) -> Result<ElectionModel> {
        let model = match self {
            ModelSpec::Pl { theta } => ElectionModel::pl(n, theta),
            ModelSpec::Construction(dist) => ElectionModel::uniform(n, dist),
            ModelSpec::PerVoter { groups } => ElectionModel::from_groups(groups),
        };
        model.validate(n, m)?;
        Ok(model)
    }
}

impl From<&ElectionModel> for ModelSpec {
    fn from(model: &ElectionModel) -> Self {
        match model.groups.as_slice() {
            [VoterGroup { dist: PerVoterDistribution::Pl { theta }, .. }] => ModelSpec::Pl { theta: *theta },
            _ => ModelSpec::PerVoter { groups: model.groups.clone() },
        }
    }
}
