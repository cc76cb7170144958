//! Metric sparsification: cluster decompositions, their verification, the
//! interval algorithm, exhaustive oracles, the sparsification game, and
//! combinators that assemble sparsifiers for larger spaces.

mod combinators;
mod game;
mod interval;
mod oracle;
mod sparsifier;

pub use combinators::{
    color_sparsify, extension_sparsify, pullback_decomposition, pullback_parameters, union_sparsify,
};
pub use game::{game_value, GameMode, EXACT_GAME_CAP, GameResult, WeightedSet};
pub use interval::{lightest_class, sparsify_interval};
pub use oracle::{
    best_decomposition, best_response, is_admissible, m_components, maximal_admissible_sets, ORACLE_CAP,
};
pub use sparsifier::{ColorSparsifier, GridSparsifier, IntervalSparsifier, Sparsifier, UnionSparsifier};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};
use crate::space::{FiniteMetricSpace, Measure, Subset};

/// `Ω = ⊔ Ω_i` with cached separation and diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDecomposition<S> {
    universe: usize,
    clusters: Vec<Subset>,
    separation: Option<S>,
    max_diameter: S,
}

impl<S: Scalar> ClusterDecomposition<S> {
    /// Empty clusters are dropped; the rest must be pairwise disjoint.
    pub fn new(space: &FiniteMetricSpace<S>, clusters: Vec<Subset>) -> Result<Self> {
        let n = space.len();
        let mut owner = vec![usize::MAX; n];
        let mut kept = Vec::with_capacity(clusters.len());
        for c in clusters {
            c.check_universe(n)?;
            if c.is_empty() {
                continue;
            }
            for x in c.iter() {
                if owner[x] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("point {x} lies in two clusters")));
                }
                owner[x] = kept.len();
            }
            kept.push(c);
        }
        kept.sort();
        let separation = space.min_separation(&kept);
        let max_diameter = kept
            .iter()
            .map(|c| space.diameter_unchecked(c.indices()))
            .fold(S::zero(), S::max_of);
        Ok(Self { universe: n, clusters: kept, separation, max_diameter })
    }

    pub fn empty(n: usize) -> Self {
        Self { universe: n, clusters: Vec::new(), separation: None, max_diameter: S::zero() }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn clusters(&self) -> &[Subset] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Minimum pairwise cluster distance; `None` (infinite) for fewer than two clusters.
    pub fn separation(&self) -> Option<&S> {
        self.separation.as_ref()
    }

    pub fn max_diameter(&self) -> &S {
        &self.max_diameter
    }

    pub fn support(&self) -> Subset {
        let mut idx: Vec<usize> = self.clusters.iter().flat_map(|c| c.iter()).collect();
        idx.sort_unstable();
        Subset::new(self.universe, idx).expect("cluster points are in range")
    }

    pub fn mass(&self, mu: &Measure<S>) -> S {
        mu.mass_of_all(&self.clusters)
    }
}

/// Outcome of checking the three sparsification conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub separation_ok: bool,
    pub diameter_ok: bool,
    pub mass_ok: bool,
    /// `null` when fewer than two clusters exist.
    pub separation: Option<f64>,
    pub max_diam: f64,
    pub mass: f64,
    pub total: f64,
    pub mass_ratio: f64,
    pub m: f64,
    pub dmax: f64,
    pub c: f64,
}

impl Report {
    pub fn passes(&self) -> bool {
        self.separation_ok && self.diameter_ok && self.mass_ok
    }
}

/// Checks `d(Ω_i, Ω_j) ≥ m`, `diam(Ω_i) ≤ dmax` and `μ(Ω) ≥ c·μ(X)`.
///
/// For inexact scalars the mass condition allows a relative slack of
/// `S::tolerance()`.
pub fn verify_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    omega: &ClusterDecomposition<S>,
    mu: &Measure<S>,
    m: &S,
    dmax: &S,
    c: &S,
) -> Result<Report> {
    if omega.universe != space.len() {
        return Err(Error::SpaceMismatch { expected: space.len(), found: omega.universe });
    }
    mu.check_len(space.len())?;
    let separation_ok = omega.separation.as_ref().is_none_or(|s| s >= m);
    let diameter_ok = omega.max_diameter <= *dmax;
    let mass = omega.mass(mu);
    let total = mu.total().clone();
    let slack = S::tolerance() * total.clone();
    let mass_ok = mass.clone() + slack >= c.clone() * total.clone();
    let ratio = if total > S::zero() { to_f64(&mass) / to_f64(&total) } else { 1.0 };
    Ok(Report {
        separation_ok,
        diameter_ok,
        mass_ok,
        separation: omega.separation.as_ref().map(to_f64),
        max_diam: to_f64(&omega.max_diameter),
        mass: to_f64(&mass),
        total: to_f64(&total),
        mass_ratio: ratio,
        m: to_f64(m),
        dmax: to_f64(dmax),
        c: to_f64(c),
    })
}
