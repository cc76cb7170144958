//! Building sparsifiers from other sparsifiers.

use super::interval::interval_clusters;
use super::{ClusterDecomposition, Sparsifier};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::space::{CoarseMap, FiniteMetricSpace, Measure, Subset};

/// Pulls a decomposition of the target back along `map`.
///
/// Clusters are the preimages `F⁻¹(Ω'_i)`; empty preimages are dropped.
/// See [`pullback_parameters`] for the transported separation and diameter.
pub fn pullback_decomposition<S: Scalar>(
    source: &FiniteMetricSpace<S>,
    map: &CoarseMap<S>,
    target_decomposition: &ClusterDecomposition<S>,
) -> Result<ClusterDecomposition<S>> {
    if map.source_len() != source.len() {
        return Err(Error::SpaceMismatch { expected: source.len(), found: map.source_len() });
    }
    if target_decomposition.universe() != map.target_len() {
        return Err(Error::SpaceMismatch { expected: map.target_len(), found: target_decomposition.universe() });
    }
    let clusters = target_decomposition
        .clusters()
        .iter()
        .map(|c| map.preimage(c))
        .collect::<Result<Vec<_>>>()?;
    ClusterDecomposition::new(source, clusters)
}

/// Transported parameters for a pullback.
///
/// Returns `(s, D')`: if the target decomposition has separation strictly
/// greater than `s` and cluster diameter at most `target_diameter`, the
/// pulled-back one has separation at least `m` and diameter at most `D'`.
pub fn pullback_parameters<S: Scalar>(map: &CoarseMap<S>, m: &S, target_diameter: &S) -> (S, S) {
    (map.rho2_below(m), map.rho1_inverse(target_diameter))
}

/// Sparsifies a measure supported on an `m`-disjoint family of pieces by
/// sparsifying each restriction separately and taking the union.
///
/// Each piece's clusters are intersected with the piece, so the union keeps
/// the per-piece constant and the largest per-piece diameter bound.
pub fn union_sparsify<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pieces: &[Subset],
    sparsifiers: &[&dyn Sparsifier<S>],
    mu: &Measure<S>,
    m: usize,
) -> Result<ClusterDecomposition<S>> {
    let n = space.len();
    mu.check_len(n)?;
    if pieces.len() != sparsifiers.len() {
        return Err(Error::InvalidParameter(format!(
            "{} pieces but {} sparsifiers",
            pieces.len(),
            sparsifiers.len()
        )));
    }
    let m_scalar: S = crate::scalar::from_usize(m);
    for (i, a) in pieces.iter().enumerate() {
        a.check_universe(n)?;
        for (j, b) in pieces.iter().enumerate().skip(i + 1) {
            if !a.is_empty() && !b.is_empty() && space.set_distance(a, b)? < m_scalar {
                return Err(Error::NotDisjointEnough(i, j));
            }
        }
    }
    let mut covered = vec![false; n];
    for p in pieces {
        for x in p.iter() {
            covered[x] = true;
        }
    }
    if let Some(x) = (0..n).find(|&x| !covered[x] && *mu.weight(x) > S::zero()) {
        return Err(Error::MassOutsidePieces(x));
    }
    let mut clusters = Vec::new();
    for (piece, sparsifier) in pieces.iter().zip(sparsifiers) {
        let restricted = mu.restrict(piece);
        if restricted.is_zero() {
            continue;
        }
        let local = sparsifier.sparsify(space, &restricted, m)?;
        clusters.extend(local.clusters().iter().map(|c| c.intersection(piece)));
    }
    ClusterDecomposition::new(space, clusters)
}

/// Two-step sparsifier on a `rows × cols` grid with the ℓ¹ metric.
///
/// The projection to the first coordinate is sparsified with the interval
/// algorithm; over each base cluster the measure is pushed to the second
/// coordinate and sparsified again. Product clusters are at least `m` apart,
/// have diameter at most `2km` and keep at least `(1 - 1/k)²` of the mass.
pub fn extension_sparsify<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &Measure<S>,
    m: usize,
    k: usize,
) -> Result<ClusterDecomposition<S>> {
    let Some((rows, cols)) = space.grid_shape() else {
        return Err(Error::InvalidParameter("extension sparsifier needs a grid space".into()));
    };
    mu.check_len(space.len())?;
    let w = mu.weights();
    let base: Vec<S> = (0..rows)
        .map(|x| compensated_sum(&w[x * cols..(x + 1) * cols]))
        .collect();
    let mut clusters = Vec::new();
    for base_cluster in interval_clusters(&base, m, k)? {
        let fiber: Vec<S> = (0..cols)
            .map(|y| {
                let col: Vec<S> = base_cluster.iter().map(|&x| w[x * cols + y].clone()).collect();
                compensated_sum(&col)
            })
            .collect();
        if !(compensated_sum(&fiber) > S::zero()) {
            continue;
        }
        for fiber_cluster in interval_clusters(&fiber, m, k)? {
            let pts = base_cluster
                .iter()
                .flat_map(|&x| fiber_cluster.iter().map(move |&y| x * cols + y))
                .collect();
            clusters.push(Subset::new(space.len(), pts)?);
        }
    }
    ClusterDecomposition::new(space, clusters)
}

/// Sparsifier from a colored cover whose same-colored members are pairwise
/// at least `m` apart.
///
/// Each point is charged to the first member covering it; the color with the
/// largest charged mass (smallest color on ties) is returned, its members
/// being the clusters. With `d + 1` colors this keeps at least `μ(X)/(d+1)`.
pub fn color_sparsify<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &[(usize, Subset)],
    mu: &Measure<S>,
    m: &S,
) -> Result<ClusterDecomposition<S>> {
    let n = space.len();
    mu.check_len(n)?;
    if !(*m > S::zero()) {
        return Err(Error::InvalidParameter("separation must be positive".into()));
    }
    for (i, (ci, a)) in cover.iter().enumerate() {
        a.check_universe(n)?;
        for (cj, b) in cover.iter().skip(i + 1) {
            if ci == cj && !a.is_empty() && !b.is_empty() && space.set_distance(a, b)? < *m {
                return Err(Error::BadCover(format!(
                    "members of color {ci} are closer than the separation parameter"
                )));
            }
        }
    }
    let mut charged: Vec<Option<usize>> = vec![None; n];
    for (color, member) in cover {
        for x in member.iter() {
            charged[x].get_or_insert(*color);
        }
    }
    if let Some(x) = (0..n).find(|&x| charged[x].is_none() && *mu.weight(x) > S::zero()) {
        return Err(Error::MassOutsidePieces(x));
    }
    let mut colors: Vec<usize> = cover.iter().map(|c| c.0).collect();
    colors.sort_unstable();
    colors.dedup();
    let mut best: Option<(usize, S)> = None;
    for &color in &colors {
        let mass: Vec<S> = (0..n)
            .filter(|&x| charged[x] == Some(color))
            .map(|x| mu.weight(x).clone())
            .collect();
        let mass = compensated_sum(&mass);
        if best.as_ref().is_none_or(|(_, b)| mass > *b) {
            best = Some((color, mass));
        }
    }
    let Some((color, _)) = best else {
        return Ok(ClusterDecomposition::empty(n));
    };
    let clusters = cover
        .iter()
        .filter(|(c, _)| *c == color)
        .map(|(_, s)| s.clone())
        .collect();
    ClusterDecomposition::new(space, clusters)
}
