//! Metric spaces over voters and candidates.
//!
//! Voters occupy indices `0..n` and candidates `n..n + m` of the combined
//! point set. Euclidean instances compute distances on demand; explicit
//! matrices store the full `(n + m) x (n + m)` table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack allowed on the triangle inequality for explicit matrices.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Euclidean {
        dim: usize,
        voters: Vec<[f64; 3]>,
        candidates: Vec<[f64; 3]>,
    },
    Matrix {
        /// Row-major `(n + m) x (n + m)` distances.
        dist: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricInstance {
    n: usize,
    m: usize,
    geometry: Geometry,
}

/// One broken metric axiom. Point indices use the combined numbering
/// (voters first, then candidates).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriangleViolation {
    Negative { a: usize, b: usize, value: f64 },
    Asymmetric { a: usize, b: usize },
    NonzeroDiagonal { a: usize, value: f64 },
    /// `d(x, y) > d(x, z) + d(z, y) + tolerance`.
    Triangle { x: usize, y: usize, z: usize, excess: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<TriangleViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SocialCostTable {
    pub costs: Vec<f64>,
    pub opt_index: usize,
}

impl SocialCostTable {
    pub fn optimal_cost(&self) -> f64 {
        self.costs[self.opt_index]
    }
}

fn pad(dim: usize, coords: &[f64], what: &str) -> Result<[f64; 3]> {
    if coords.len() != dim {
        return Err(Error::Dimension(format!(
            "{what} has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::Dimension(format!("{what} has a non-finite coordinate")));
    }
    let mut p = [0.0; 3];
    p[..dim].copy_from_slice(coords);
    Ok(p)
}

#[inline]
fn euclid(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

impl MetricInstance {
    pub fn euclidean(dim: usize, voters: &[Vec<f64>], candidates: &[Vec<f64>]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Dimension(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        let voters = voters
            .iter()
            .enumerate()
            .map(|(i, v)| pad(dim, v, &format!("voter {i}")))
            .collect::<Result<Vec<_>>>()?;
        let candidates = candidates
            .iter()
            .enumerate()
            .map(|(j, c)| pad(dim, c, &format!("candidate {j}")))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(dim, voters, candidates)
    }

    /// Builds a Euclidean instance from already padded points.
    pub fn from_points(dim: usize, voters: Vec<[f64; 3]>, candidates: Vec<[f64; 3]>) -> Result<Self> {
        if voters.is_empty() {
            return Err(Error::Dimension("at least one voter is required".into()));
        }
        if candidates.len() < 2 {
            return Err(Error::Dimension("at least two candidates are required".into()));
        }
        Ok(Self {
            n: voters.len(),
            m: candidates.len(),
            geometry: Geometry::Euclidean { dim, voters, candidates },
        })
    }

    /// Explicit distance matrix over `n` voters followed by the candidates.
    /// Only the shape is checked here; see [`MetricInstance::validate`].
    pub fn from_matrix(n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if n == 0 {
            return Err(Error::Dimension("at least one voter is required".into()));
        }
        if size < n + 2 {
            return Err(Error::Dimension(format!(
                "matrix of size {size} leaves fewer than two candidates for {n} voters"
            )));
        }
        let mut dist = Vec::with_capacity(size * size);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Dimension(format!(
                    "row {r} has {} entries, expected {size}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        Ok(Self {
            n,
            m: size - n,
            geometry: Geometry::Matrix { dist },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    fn point_count(&self) -> usize {
        self.n + self.m
    }

    /// Distance between two points of the combined index space.
    pub fn point_distance(&self, a: usize, b: usize) -> f64 {
        match &self.geometry {
            Geometry::Euclidean { voters, candidates, .. } => {
                let n = self.n;
                let pa = if a < n { &voters[a] } else { &candidates[a - n] };
                let pb = if b < n { &voters[b] } else { &candidates[b - n] };
                euclid(pa, pb)
            }
            Geometry::Matrix { dist } => dist[a * self.point_count() + b],
        }
    }

    /// `d(i, j)` for voter `i` and candidate `j`. Indices are not checked.
    #[inline]
    pub fn distance(&self, voter: usize, candidate: usize) -> f64 {
        match &self.geometry {
            Geometry::Euclidean { voters, candidates, .. } => euclid(&voters[voter], &candidates[candidate]),
            Geometry::Matrix { dist } => dist[voter * self.point_count() + self.n + candidate],
        }
    }

    /// Fills `out` with the voter's distances to every candidate.
    pub fn voter_distances(&self, voter: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.m).map(|j| self.distance(voter, j)));
    }

    pub fn check_voter(&self, voter: usize) -> Result<()> {
        if voter >= self.n {
            return Err(Error::IndexOutOfRange { what: "voter", index: voter, len: self.n });
        }
        Ok(())
    }

    pub fn check_candidate(&self, candidate: usize) -> Result<()> {
        if candidate >= self.m {
            return Err(Error::IndexOutOfRange { what: "candidate", index: candidate, len: self.m });
        }
        Ok(())
    }

    /// Checks nonnegativity, symmetry, zero diagonal and the triangle
    /// inequality. Euclidean instances are metric by construction.
    pub fn validate(&self) -> ValidationReport {
        let dist = match &self.geometry {
            Geometry::Euclidean { .. } => return ValidationReport::default(),
            Geometry::Matrix { dist } => dist,
        };
        let size = self.point_count();
        let at = |a: usize, b: usize| dist[a * size + b];
        let mut violations = Vec::new();
        for a in 0..size {
            let diag = at(a, a);
            if diag != 0.0 {
                violations.push(TriangleViolation::NonzeroDiagonal { a, value: diag });
            }
            for b in 0..size {
                let v = at(a, b);
                if v.is_nan() || v < 0.0 {
                    violations.push(TriangleViolation::Negative { a, b, value: v });
                }
                if a < b && at(a, b) != at(b, a) {
                    violations.push(TriangleViolation::Asymmetric { a, b });
                }
            }
        }
        for x in 0..size {
            for y in (x + 1)..size {
                let direct = at(x, y);
                for z in 0..size {
                    if z == x || z == y {
                        continue;
                    }
                    let excess = direct - (at(x, z) + at(z, y));
                    if excess > TRIANGLE_TOLERANCE {
                        violations.push(TriangleViolation::Triangle { x, y, z, excess });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn social_cost(&self, candidate: usize) -> Result<f64> {
        self.check_candidate(candidate)?;
        Ok(self.social_cost_unchecked(candidate))
    }

    pub(crate) fn social_cost_unchecked(&self, candidate: usize) -> f64 {
        (0..self.n).map(|i| self.distance(i, candidate)).sum()
    }

    /// Social costs of every candidate with the lowest-index minimizer.
    pub fn optimal_candidate(&self) -> SocialCostTable {
        let costs: Vec<f64> = (0..self.m).map(|j| self.social_cost_unchecked(j)).collect();
        let opt_index = argmin_first(&costs);
        SocialCostTable { costs, opt_index }
    }

    /// `d(i, j') / d(i, j)`, with `+inf` when only `d(i, j)` is zero and `1`
    /// when both are zero.
    pub fn pairwise_ratio(&self, voter: usize, j: usize, j_prime: usize) -> Result<f64> {
        self.check_voter(voter)?;
        self.check_candidate(j)?;
        self.check_candidate(j_prime)?;
        Ok(distance_ratio(self.distance(voter, j), self.distance(voter, j_prime)))
    }

    /// Every distance multiplied by `kappa`.
    pub fn scaled(&self, kappa: f64) -> Self {
        let geometry = match &self.geometry {
            Geometry::Euclidean { dim, voters, candidates } => {
                let s = |p: &[f64; 3]| [p[0] * kappa, p[1] * kappa, p[2] * kappa];
                Geometry::Euclidean {
                    dim: *dim,
                    voters: voters.iter().map(s).collect(),
                    candidates: candidates.iter().map(s).collect(),
                }
            }
            Geometry::Matrix { dist } => Geometry::Matrix {
                dist: dist.iter().map(|d| d * kappa).collect(),
            },
        };
        Self { geometry, ..self.clone() }
    }

    /// Reorders voters so that new voter `k` is old voter `order[k]`.
    pub fn permute_voters(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if order.len() != self.n || order.iter().any(|&i| i >= self.n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Dimension("voter order is not a permutation".into()));
        }
        let geometry = match &self.geometry {
            Geometry::Euclidean { dim, voters, candidates } => Geometry::Euclidean {
                dim: *dim,
                voters: order.iter().map(|&i| voters[i]).collect(),
                candidates: candidates.clone(),
            },
            Geometry::Matrix { .. } => {
                let size = self.point_count();
                let map = |p: usize| if p < self.n { order[p] } else { p };
                let mut dist = Vec::with_capacity(size * size);
                for a in 0..size {
                    for b in 0..size {
                        dist.push(self.point_distance(map(a), map(b)));
                    }
                }
                Geometry::Matrix { dist }
            }
        };
        Ok(Self { geometry, ..self.clone() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let instance = file.into_instance()?;
        let report = instance.validate();
        if !report.is_ok() {
            return Err(Error::InvalidMetric(report.violations));
        }
        Ok(instance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }
}

/// Ratio convention shared by every pairwise model.
#[inline]
pub fn distance_ratio(d_j: f64, d_j_prime: f64) -> f64 {
    if d_j == 0.0 {
        if d_j_prime == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        d_j_prime / d_j
    }
}

pub(crate) fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = j;
        }
    }
    best
}

/// On-disk instance format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceFile {
    Euclidean {
        dim: usize,
        voters: Vec<Vec<f64>>,
        candidates: Vec<Vec<f64>>,
    },
    Matrix {
        n_voters: usize,
        dist: Vec<Vec<f64>>,
    },
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<MetricInstance> {
        match self {
            InstanceFile::Euclidean { dim, voters, candidates } => MetricInstance::euclidean(dim, &voters, &candidates),
            InstanceFile::Matrix { n_voters, dist } => MetricInstance::from_matrix(n_voters, &dist),
        }
    }
}

impl From<&MetricInstance> for InstanceFile {
    fn from(instance: &MetricInstance) -> Self {
        match &instance.geometry {
            Geometry::Euclidean { dim, voters, candidates } => InstanceFile::Euclidean {
                dim: *dim,
                voters: voters.iter().map(|p| p[..*dim].to_vec()).collect(),
                candidates: candidates.iter().map(|p| p[..*dim].to_vec()).collect(),
            },
            Geometry::Matrix { dist } => {
                let size = instance.point_count();
                InstanceFile::Matrix {
                    n_voters: instance.n,
                    dist: dist.chunks(size).map(<[f64]>::to_vec).collect(),
                }
            }
        }
    }
}
