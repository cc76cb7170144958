use super::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, from_usize, Scalar};
use crate::space::{FiniteMetricSpace, Measure, Subset};

/// Residue classes `C_j = {x : x mod m(k+1) ∈ [jm, (j+1)m)}`, `j = 0..=k`.
///
/// Returns the lightest class (smallest index among ties) and all class masses.
pub fn lightest_class<S: Scalar>(weights: &[S], m: usize, k: usize) -> (usize, Vec<S>) {
    let period = m * (k + 1);
    let mut parts: Vec<Vec<S>> = vec![Vec::new(); k + 1];
    for (x, w) in weights.iter().enumerate() {
        parts[(x % period) / m].push(w.clone());
    }
    let masses: Vec<S> = parts.iter().map(|p| compensated_sum(p)).collect();
    let mut best = 0;
    for j in 1..=k {
        if masses[j] < masses[best] {
            best = j;
        }
    }
    (best, masses)
}

/// Clusters (as sorted positions) produced on `{0, .., weights.len()-1}`.
pub(crate) fn interval_clusters<S: Scalar>(weights: &[S], m: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    if m == 0 || k < 2 {
        return Err(Error::InvalidParameter(format!("need m ≥ 1 and k ≥ 2, got m={m}, k={k}")));
    }
    if !(compensated_sum(weights) > S::zero()) {
        return Err(Error::ZeroMass);
    }
    let (removed, _) = lightest_class(weights, m, k);
    let period = m * (k + 1);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<usize> = None;
    for x in (0..weights.len()).filter(|x| (x % period) / m != removed) {
        match last {
            Some(prev) if x - prev < m => clusters.last_mut().unwrap().push(x),
            _ => clusters.push(vec![x]),
        }
        last = Some(x);
    }
    Ok(clusters)
}

/// Sparsifier for a measure on the integer interval `{0, .., N-1}`.
///
/// Drops the lightest of the `k + 1` residue classes of width `m` modulo
/// `m(k+1)` and returns the remaining runs as clusters. Clusters are at
/// least `m + 1` apart, span at most `km` points and keep at least
/// `(1 - 1/(k+1))` of the mass.
pub fn sparsify_interval<S: Scalar>(mu: &Measure<S>, m: usize, k: usize) -> Result<ClusterDecomposition<S>> {
    let n = mu.len();
    let clusters = interval_clusters(mu.weights(), m, k)?;
    let space = FiniteMetricSpace::<S>::path(n)?;
    let subsets = clusters.into_iter().map(|c| Subset::from_sorted(n, c)).collect();
    ClusterDecomposition::new(&space, subsets)
}

pub(crate) fn interval_diameter_bound<S: Scalar>(m: usize, k: usize) -> S {
    from_usize(k * m)
}
