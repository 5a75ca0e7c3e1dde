//! Metric distortion of voting rules under probabilistic voting.
//!
//! Voters and candidates live in a metric space. Each voter submits a random
//! ranking whose pairwise marginals are `g(d(i, j') / d(i, j))` for a
//! pairwise function `g` (Plackett-Luce gives `g(r) = 1 / (1 + r^-theta)`).
//! The crate provides the voting rules, the constants and closed-form
//! distortion bounds derived from `g`, the lower-bound instance
//! constructions, an exact enumeration oracle for tiny elections and a
//! seeded, parallel Monte Carlo estimator.

// `!(x <= y)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod constructions;
pub mod dual;
pub mod error;
pub mod harness;
pub mod io;
pub mod metric;
pub mod models;
pub mod oracle;
pub mod profile;
pub mod rng;
pub mod rules;

pub use bounds::DerivedConstants;
pub use constructions::{Branch, ConstructedElection};
pub use error::{Error, Result};
pub use harness::DistortionEstimate;
pub use metric::{MetricInstance, SocialCostTable};
pub use models::{ElectionModel, GFunction, PerVoterDistribution};
pub use profile::VoteProfile;
pub use rules::{Rule, RuleOutcome};
