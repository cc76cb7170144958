//! Exhaustive search over admissible sets.
//!
//! A set `Ω` is admissible for `(m, R)` when every `m`-component of `Ω`
//! (transitive closure of `d < m`) has diameter at most `R`; its
//! `m`-components are then clusters satisfying the separation and diameter
//! conditions. Admissibility is closed under taking subsets.

use rayon::prelude::*;

use super::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::space::{FiniteMetricSpace, Measure, Subset};

/// `m`-components of a point set, each sorted, ordered by smallest point.
pub fn m_components<S: Scalar>(space: &FiniteMetricSpace<S>, points: &[usize], m: &S) -> Vec<Vec<usize>> {
    let k = points.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..k {
        for j in i + 1..k {
            if space.dist(points[i], points[j]) < *m {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(points[i]);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort();
    groups
}

pub fn is_admissible<S: Scalar>(space: &FiniteMetricSpace<S>, points: &[usize], m: &S, radius: &S) -> bool {
    m_components(space, points, m)
        .iter()
        .all(|c| space.diameter_unchecked(c) <= *radius)
}

/// Default point cap for the exhaustive decomposition search.
pub const ORACLE_CAP: usize = 16;

/// Bit tables for fast admissibility tests on spaces with at most 64 points.
pub(crate) struct MaskOracle {
    n: usize,
    close: Vec<u64>,
    far: Vec<u64>,
}

impl MaskOracle {
    pub(crate) fn new<S: Scalar>(space: &FiniteMetricSpace<S>, m: &S, radius: &S) -> Result<Self> {
        let n = space.len();
        if n > 64 {
            return Err(Error::TooLarge { what: "bitmask search", size: n, cap: 64 });
        }
        let mut close = vec![0u64; n];
        let mut far = vec![0u64; n];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let d = space.dist(x, y);
                if d < *m {
                    close[x] |= 1 << y;
                }
                if d > *radius {
                    far[x] |= 1 << y;
                }
            }
        }
        Ok(Self { n, close, far })
    }

    /// The `m`-component of `x` inside `mask` (which must contain `x`).
    fn component(&self, mask: u64, x: usize) -> u64 {
        let mut comp = 1u64 << x;
        let mut frontier = comp;
        while frontier != 0 {
            let y = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.close[y] & mask & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        comp
    }

    fn component_ok(&self, comp: u64) -> bool {
        let mut rest = comp;
        while rest != 0 {
            let y = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.far[y] & comp != 0 {
                return false;
            }
        }
        true
    }

    pub(crate) fn admissible(&self, mask: u64) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            let comp = self.component(mask, x);
            if !self.component_ok(comp) {
                return false;
            }
            rest &= !comp;
        }
        true
    }

    /// Whether `mask ∪ {x}` stays admissible, given that `mask` is.
    fn can_add(&self, mask: u64, x: usize) -> bool {
        let grown = mask | 1 << x;
        self.component_ok(self.component(grown, x))
    }

    /// Greedy completion to an inclusion-maximal admissible set.
    pub(crate) fn saturate(&self, mut mask: u64) -> u64 {
        for x in 0..self.n {
            if mask >> x & 1 == 0 && self.can_add(mask, x) {
                mask |= 1 << x;
            }
        }
        mask
    }
}

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap || n > 63 {
        return Err(Error::TooLarge { what, size: n, cap: cap.min(63) });
    }
    Ok(())
}

fn masked_mass<S: Scalar>(weights: &[S], mask: u64) -> S {
    let picked: Vec<S> = (0..weights.len())
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| weights[i].clone())
        .collect();
    compensated_sum(&picked)
}

const BLOCK: u64 = 1 << 12;

/// Exact maximum of `μ(Ω)/μ(X)` over admissible `Ω`, by iterating all `2ⁿ` subsets.
///
/// Ties go to the numerically smallest bitmask. Returns the decomposition of
/// the optimum into its `m`-components and the ratio.
pub fn best_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &Measure<S>,
    m: &S,
    radius: &S,
    cap: usize,
) -> Result<(ClusterDecomposition<S>, S)> {
    let n = space.len();
    check_cap(n, cap, "exhaustive decomposition search")?;
    mu.check_len(n)?;
    if mu.is_zero() {
        return Err(Error::ZeroMass);
    }
    let oracle = MaskOracle::new(space, m, radius)?;
    let weights = mu.weights();
    let total: u64 = 1 << n;
    let blocks: Vec<u64> = (0..total.div_ceil(BLOCK)).collect();
    let per_block: Vec<Option<(S, u64)>> = blocks
        .par_iter()
        .map(|&b| {
            let mut best: Option<(S, u64)> = None;
            for mask in b * BLOCK..((b + 1) * BLOCK).min(total) {
                if !oracle.admissible(mask) {
                    continue;
                }
                let mass = masked_mass(weights, mask);
                if best.as_ref().is_none_or(|(bm, _)| mass > *bm) {
                    best = Some((mass, mask));
                }
            }
            best
        })
        .collect();
    let mut best: Option<(S, u64)> = None;
    for cand in per_block.into_iter().flatten() {
        if best.as_ref().is_none_or(|(bm, _)| cand.0 > *bm) {
            best = Some(cand);
        }
    }
    let (mass, mask) = best.expect("the empty set is admissible");
    let points = Subset::from_mask(n, mask);
    let clusters = m_components(space, points.indices(), m)
        .into_iter()
        .map(|c| Subset::new(n, c))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = ClusterDecomposition::new(space, clusters)?;
    Ok((decomposition, mass / mu.total().clone()))
}

/// All inclusion-maximal admissible sets, in increasing bitmask order.
pub fn maximal_admissible_sets<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    m: &S,
    radius: &S,
    cap: usize,
) -> Result<Vec<Subset>> {
    let n = space.len();
    check_cap(n, cap, "maximal admissible enumeration")?;
    let oracle = MaskOracle::new(space, m, radius)?;
    let total: u64 = 1 << n;
    let flags: Vec<bool> = (0..total).into_par_iter().map(|mask| oracle.admissible(mask)).collect();
    let sets = (0..total)
        .filter(|&mask| flags[mask as usize] && (0..n).all(|i| mask >> i & 1 == 1 || !flags[(mask | 1 << i) as usize]))
        .map(|mask| Subset::from_mask(n, mask))
        .collect();
    Ok(sets)
}

/// Maximum-mass admissible set by branch and bound (spaces up to 64 points).
///
/// The returned set is completed to an inclusion-maximal admissible set.
pub fn best_response<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    weights: &[S],
    m: &S,
    radius: &S,
) -> Result<(Subset, S)> {
    let n = space.len();
    if weights.len() != n {
        return Err(Error::SpaceMismatch { expected: n, found: weights.len() });
    }
    let oracle = MaskOracle::new(space, m, radius)?;
    let mut order: Vec<usize> = (0..n).filter(|&i| weights[i] > S::zero()).collect();
    order.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut suffix = vec![S::zero(); order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix[i] = suffix[i + 1].clone() + weights[order[i]].clone();
    }
    let mut bb = BranchAndBound { oracle: &oracle, weights, order: &order, suffix: &suffix, best_mass: S::zero(), best_mask: 0 };
    bb.search(0, 0, S::zero());
    let mask = oracle.saturate(bb.best_mask);
    Ok((Subset::from_mask(n, mask), masked_mass(weights, mask)))
}

struct BranchAndBound<'a, S> {
    oracle: &'a MaskOracle,
    weights: &'a [S],
    order: &'a [usize],
    suffix: &'a [S],
    best_mass: S,
    best_mask: u64,
}

impl<S: Scalar> BranchAndBound<'_, S> {
    fn search(&mut self, depth: usize, mask: u64, mass: S) {
        if mass > self.best_mass {
            self.best_mass = mass.clone();
            self.best_mask = mask;
        }
        if depth == self.order.len() || mass.clone() + self.suffix[depth].clone() <= self.best_mass {
            return;
        }
        let x = self.order[depth];
        if self.oracle.can_add(mask, x) {
            self.search(depth + 1, mask | 1 << x, mass.clone() + self.weights[x].clone());
        }
        self.search(depth + 1, mask, mass);
    }
}
