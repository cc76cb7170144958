use std::ops::Range;

use rayon::prelude::*;

use super::{family, projection_approximant, FamilySpec, Method, Multigraph};
use crate::error::Result;
use crate::operators::{localized_ratio, operator_norm};
use crate::scalar::{from_usize, Real, Scalar};
use crate::space::{disjoint_union, FiniteMetricSpace};

/// Disjoint union of graph metrics with cross-block gaps growing like `s(i + j)`.
pub fn box_space<S: Scalar>(graphs: &[Multigraph], scale: &S) -> Result<(FiniteMetricSpace<S>, Vec<Range<usize>>)> {
    let spaces: Vec<FiniteMetricSpace<S>> = graphs.iter().map(Multigraph::metric_space).collect::<Result<_>>()?;
    disjoint_union(&spaces, scale)
}

/// One family member of the decay table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow<T> {
    pub index: usize,
    pub vertices: usize,
    /// `None` for a single vertex.
    pub lambda1: Option<T>,
    /// Approximant degree, an upper bound on its propagation.
    pub degree: usize,
    pub certificate: T,
    pub norm: T,
    /// Best localized ratio at radius `R`.
    pub ratio: T,
    /// Largest ball `|B(x, R)|`.
    pub s_r: usize,
    /// `√(s_R/|V|) + ε`.
    pub bound: T,
    pub seed: Option<u64>,
}

/// Per member: approximant of the constant projection, its norm, and its
/// best localized ratio on supports of diameter `≤ R`. Rows sorted by size,
/// family order on ties.
pub fn decay_experiment<T: Real>(spec: &FamilySpec, radius: &T, eps: T, method: Method) -> Result<Vec<DecayRow<T>>> {
    let graphs = family(spec)?;
    let mut rows = graphs
        .par_iter()
        .enumerate()
        .map(|(index, g)| {
            let space = g.metric_space::<T>()?;
            let approx = projection_approximant(g, eps, method)?;
            let norm = operator_norm(&approx.operator)?;
            let report = localized_ratio(&space, &approx.operator, radius)?;
            let s_r = space.max_ball_size(radius);
            Ok(DecayRow {
                index,
                vertices: g.len(),
                lambda1: approx.lambda1,
                degree: approx.degree,
                certificate: approx.certificate,
                norm,
                ratio: report.ratio,
                s_r,
                bound: (from_usize::<T>(s_r) / from_usize::<T>(g.len())).sqrt() + eps,
                seed: spec.member_seed(index),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.vertices);
    Ok(rows)
}
