//! Finite metric spaces and the geometric queries built on them.
//!
//! A space stores its distance function either as a dense table or
//! implicitly, for the integer interval `{0, .., n-1}` and for rectangular
//! grids with the ℓ¹ path metric. Implicit spaces keep large experiments
//! linear in memory and let set distances and diameters use closed forms.

mod cliques;
mod coarse;
mod measure;
mod subset;

use std::collections::VecDeque;
use std::ops::Range;

pub use cliques::{ball_family, maximal_bounded_subsets, BoundedSubsets, SupportMode, DEFAULT_CLIQUE_CAP};
pub use coarse::{CoarseMap, ControlPoint};
pub use measure::Measure;
pub use subset::Subset;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Metric<S> {
    /// Row-major `n × n` table.
    Dense(Vec<S>),
    /// `d(i, j) = |i - j|` on `{0, .., n-1}`.
    Path,
    /// `rows × cols` grid, point `x * cols + y`, `d = |Δx| + |Δy|`.
    Grid { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S> {
    n: usize,
    labels: Option<Vec<String>>,
    metric: Metric<S>,
    integral: bool,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Builds a space from a full distance table and validates the metric axioms.
    pub fn from_distances(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMetric("space has no points".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            table.extend(row);
        }
        let space = Self::from_table(n, table, false);
        space.validate()?;
        Ok(space)
    }

    /// Table known to satisfy the metric axioms (graph and union constructions).
    pub(crate) fn from_table(n: usize, table: Vec<S>, integral: bool) -> Self {
        debug_assert_eq!(table.len(), n * n);
        Self { n, labels: None, metric: Metric::Dense(table), integral }
    }

    /// The integer interval `{0, .., n-1}`.
    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMetric("space has no points".into()));
        }
        Ok(Self { n, labels: None, metric: Metric::Path, integral: true })
    }

    /// `rows × cols` grid with the ℓ¹ (grid graph) metric.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMetric("grid has no points".into()));
        }
        Ok(Self { n: rows * cols, labels: None, metric: Metric::Grid { rows, cols }, integral: true })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SpaceMismatch { expected: self.n, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    /// True when every distance is an integer.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn dist(&self, x: usize, y: usize) -> S {
        match &self.metric {
            Metric::Dense(t) => t[x * self.n + y].clone(),
            Metric::Path => from_usize(x.abs_diff(y)),
            Metric::Grid { cols, .. } => {
                let (xa, ya) = (x / cols, x % cols);
                let (xb, yb) = (y / cols, y % cols);
                from_usize(xa.abs_diff(xb) + ya.abs_diff(yb))
            }
        }
    }

    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        match self.metric {
            Metric::Grid { rows, cols } => Some((rows, cols)),
            Metric::Path => Some((1, self.n)),
            Metric::Dense(_) => None,
        }
    }

    /// Whether `d(i, j) = |i - j|` holds for every pair.
    pub fn is_path_metric(&self) -> bool {
        match &self.metric {
            Metric::Path => true,
            Metric::Grid { rows, cols } => *rows == 1 || *cols == 1,
            Metric::Dense(_) => (0..self.n)
                .all(|i| (i + 1..self.n).all(|j| self.dist(i, j) == from_usize::<S>(j - i))),
        }
    }

    /// Checks symmetry, zero diagonal, positivity and the triangle inequality.
    ///
    /// Integral metrics are checked exactly; others with `S::tolerance()`.
    pub fn validate(&self) -> Result<()> {
        let Metric::Dense(_) = &self.metric else {
            return Ok(());
        };
        let n = self.n;
        let tol = if self.integral { S::zero() } else { S::tolerance() };
        for x in 0..n {
            let dxx = self.dist(x, x);
            if dxx != S::zero() {
                return Err(Error::InvalidMetric(format!("d({x},{x}) = {dxx:?} is not zero")));
            }
            for y in x + 1..n {
                let dxy = self.dist(x, y);
                if !(dxy > S::zero()) {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) = {dxy:?} is not positive")));
                }
                if dxy != self.dist(y, x) {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) is not symmetric")));
                }
            }
        }
        for y in 0..n {
            for x in 0..n {
                let dxy = self.dist(x, y);
                for z in 0..n {
                    if self.dist(x, z) > dxy.clone() + self.dist(y, z) + tol.clone() {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Converts the scalar type, e.g. to exact rationals.
    pub fn cast<T: Scalar>(&self) -> FiniteMetricSpace<T> {
        let metric = match &self.metric {
            Metric::Dense(t) => Metric::Dense(
                t.iter()
                    .map(|d| T::from_f64(crate::scalar::to_f64(d)).expect("finite distance"))
                    .collect(),
            ),
            Metric::Path => Metric::Path,
            Metric::Grid { rows, cols } => Metric::Grid { rows: *rows, cols: *cols },
        };
        FiniteMetricSpace { n: self.n, labels: self.labels.clone(), metric, integral: self.integral }
    }

    pub fn distance_rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|x| (0..self.n).map(|y| self.dist(x, y)).collect()).collect()
    }

    pub fn points(&self) -> Subset {
        Subset::full(self.n)
    }

    /// Closed ball `B(x, r)`.
    pub fn ball(&self, x: usize, r: &S) -> Subset {
        let idx = (0..self.n).filter(|&y| self.dist(x, y) <= *r).collect();
        Subset::from_sorted(self.n, idx)
    }

    /// `max_x |B(x, r)|`.
    pub fn max_ball_size(&self, r: &S) -> usize {
        (0..self.n).map(|x| self.ball(x, r).len()).max().unwrap_or(0)
    }

    /// `[U]_k = {x : d(x, U) ≤ k}`.
    pub fn neighborhood(&self, u: &Subset, k: &S) -> Result<Subset> {
        u.check_universe(self.n)?;
        u.require_nonempty()?;
        let idx = match self.metric {
            Metric::Path => {
                let pts = u.indices();
                (0..self.n)
                    .filter(|&x| {
                        let pos = pts.partition_point(|&p| p < x);
                        let left = pos.checked_sub(1).map(|i| x - pts[i]);
                        let right = pts.get(pos).map(|&p| p - x);
                        let near = left.into_iter().chain(right).min().unwrap();
                        from_usize::<S>(near) <= *k
                    })
                    .collect()
            }
            _ => (0..self.n)
                .filter(|&x| u.iter().any(|y| self.dist(x, y) <= *k))
                .collect(),
        };
        Ok(Subset::from_sorted(self.n, idx))
    }

    /// `min_{a ∈ A, b ∈ B} d(a, b)`.
    pub fn set_distance(&self, a: &Subset, b: &Subset) -> Result<S> {
        a.check_universe(self.n)?;
        b.check_universe(self.n)?;
        a.require_nonempty()?;
        b.require_nonempty()?;
        if let Metric::Path = self.metric {
            let (xs, ys) = (a.indices(), b.indices());
            let (mut i, mut j, mut best) = (0, 0, usize::MAX);
            while i < xs.len() && j < ys.len() {
                best = best.min(xs[i].abs_diff(ys[j]));
                if xs[i] < ys[j] {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            return Ok(from_usize(best));
        }
        let mut best: Option<S> = None;
        for x in a.iter() {
            for y in b.iter() {
                let d = self.dist(x, y);
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        Ok(best.unwrap())
    }

    /// `max_{x, y ∈ U} d(x, y)`; zero for singletons.
    pub fn diameter(&self, u: &Subset) -> Result<S> {
        u.check_universe(self.n)?;
        u.require_nonempty()?;
        Ok(self.diameter_unchecked(u.indices()))
    }

    pub(crate) fn diameter_unchecked(&self, pts: &[usize]) -> S {
        match self.metric {
            Metric::Path => from_usize(pts[pts.len() - 1] - pts[0]),
            Metric::Grid { cols, .. } => {
                let (mut smin, mut smax) = (i64::MAX, i64::MIN);
                let (mut dmin, mut dmax) = (i64::MAX, i64::MIN);
                for &p in pts {
                    let (x, y) = ((p / cols) as i64, (p % cols) as i64);
                    smin = smin.min(x + y);
                    smax = smax.max(x + y);
                    dmin = dmin.min(x - y);
                    dmax = dmax.max(x - y);
                }
                from_usize((smax - smin).max(dmax - dmin) as usize)
            }
            Metric::Dense(_) => {
                let mut best = S::zero();
                for (i, &x) in pts.iter().enumerate() {
                    for &y in &pts[i + 1..] {
                        let d = self.dist(x, y);
                        if d > best {
                            best = d;
                        }
                    }
                }
                best
            }
        }
    }

    pub fn diameter_all(&self) -> S {
        self.diameter_unchecked(Subset::full(self.n).indices())
    }

    /// Minimum distance between distinct parts, `None` with fewer than two parts.
    pub(crate) fn min_separation(&self, parts: &[Subset]) -> Option<S> {
        if parts.len() < 2 {
            return None;
        }
        if let Metric::Path = self.metric {
            let mut tagged: Vec<(usize, usize)> = parts
                .iter()
                .enumerate()
                .flat_map(|(i, p)| p.iter().map(move |x| (x, i)))
                .collect();
            tagged.sort_unstable();
            let best = tagged
                .windows(2)
                .filter(|w| w[0].1 != w[1].1)
                .map(|w| w[1].0 - w[0].0)
                .min()?;
            return Some(from_usize(best));
        }
        let mut best: Option<S> = None;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let d = self.set_distance(&parts[i], &parts[j]).ok()?;
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best
    }
}

/// Shortest-path hop metric of an undirected multigraph.
///
/// Edge multiplicities do not affect the metric; zero-multiplicity edges are ignored.
pub fn build_graph_space<S: Scalar>(n: usize, edges: &[(usize, usize, u32)]) -> Result<FiniteMetricSpace<S>> {
    if n == 0 {
        return Err(Error::InvalidMetric("graph has no vertices".into()));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v, mult) in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidParameter(format!("edge ({u},{v}) out of range for {n} vertices")));
        }
        if mult > 0 && u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let hops = bfs_all_pairs(&adj)?;
    let table = hops.into_iter().map(|h| from_usize(h)).collect();
    Ok(FiniteMetricSpace::from_table(n, table, true))
}

pub(crate) fn bfs_all_pairs(adj: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = adj.len();
    let mut table = vec![usize::MAX; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        let row = &mut table[s * n..(s + 1) * n];
        row[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if row[y] == usize::MAX {
                    row[y] = row[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if let Some(t) = row.iter().position(|&d| d == usize::MAX) {
            return Err(Error::DisconnectedGraph(s, t));
        }
    }
    Ok(table)
}

/// Disjoint union with growing gaps.
///
/// Block `i` (1-based) is placed at "height" `c_i = max(diam(X_i), s·i)`
/// and points of different blocks are at distance `c_i + c_j`, so
/// `d(X_i, X_j) ≥ s(i + j)`. Returns the union and the index range of each block.
pub fn disjoint_union<S: Scalar>(
    spaces: &[FiniteMetricSpace<S>],
    scale: &S,
) -> Result<(FiniteMetricSpace<S>, Vec<Range<usize>>)> {
    if spaces.is_empty() {
        return Err(Error::InvalidParameter("disjoint union of no spaces".into()));
    }
    if !(*scale >= S::one()) {
        return Err(Error::InvalidParameter(format!("scale {scale:?} must be at least 1")));
    }
    if spaces.len() == 1 {
        let n = spaces[0].len();
        return Ok((spaces[0].clone(), vec![0..n]));
    }
    let mut blocks = Vec::with_capacity(spaces.len());
    let mut offset = 0;
    for s in spaces {
        blocks.push(offset..offset + s.len());
        offset += s.len();
    }
    let n = offset;
    let heights: Vec<S> = spaces
        .iter()
        .enumerate()
        .map(|(i, s)| s.diameter_all().max_of(scale.clone() * from_usize::<S>(i + 1)))
        .collect();
    let mut block_of = Vec::with_capacity(n);
    for (b, r) in blocks.iter().enumerate() {
        block_of.extend(r.clone().map(|_| b));
    }
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        let bx = block_of[x];
        for y in 0..n {
            let by = block_of[y];
            let d = if bx == by {
                let o = blocks[bx].start;
                spaces[bx].dist(x - o, y - o)
            } else {
                heights[bx].clone() + heights[by].clone()
            };
            table.push(d);
        }
    }
    let integral = spaces.iter().all(|s| s.integral) && is_integer(scale);
    let mut out = FiniteMetricSpace::from_table(n, table, integral);
    if spaces.iter().all(|s| s.labels.is_some()) {
        out.labels = Some(spaces.iter().flat_map(|s| s.labels.clone().unwrap()).collect());
    }
    Ok((out, blocks))
}

fn is_integer<S: Scalar>(x: &S) -> bool {
    x.to_f64().is_some_and(|v| v.fract() == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_edges(n: usize) -> Vec<(usize, usize, u32)> {
        (0..n).map(|i| (i, (i + 1) % n, 1)).collect()
    }

    fn s(n: usize, v: &[usize]) -> Subset {
        Subset::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn graph_space_hop_counts() {
        let c4 = build_graph_space::<f64>(4, &cycle_edges(4)).unwrap();
        assert_eq!(c4.dist(0, 2), 2.0);
        assert!(c4.is_integral());
        c4.validate().unwrap();
        let p3 = build_graph_space::<f64>(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(p3.dist(0, 2), 2.0);
        assert!(p3.is_path_metric());
        assert_eq!(build_graph_space::<f64>(2, &[]), Err(Error::DisconnectedGraph(0, 1)));
        // multiplicity ignored, zero multiplicity dropped
        let g = build_graph_space::<f64>(3, &[(0, 1, 3), (1, 2, 1), (0, 2, 0)]).unwrap();
        assert_eq!(g.dist(0, 2), 2.0);
    }

    #[test]
    fn union_formula() {
        let c3 = build_graph_space::<f64>(3, &cycle_edges(3)).unwrap();
        let c4 = build_graph_space::<f64>(4, &cycle_edges(4)).unwrap();
        let (u, blocks) = disjoint_union(&[c3.clone(), c3.clone()], &2.0).unwrap();
        assert_eq!(blocks, vec![0..3, 3..6]);
        assert_eq!(u.dist(0, 4), 6.0);
        assert_eq!(u.dist(0, 1), 1.0);
        u.validate().unwrap();
        let (u, _) = disjoint_union(&[c3.clone(), c4], &1.0).unwrap();
        assert_eq!(u.dist(0, 3), 3.0);
        u.validate().unwrap();
        let (single, _) = disjoint_union(&[c3.clone()], &5.0).unwrap();
        assert_eq!(single, c3);
        assert!(disjoint_union(&[c3], &0.5).is_err());
    }

    #[test]
    fn neighborhoods() {
        let p = FiniteMetricSpace::<f64>::path(5).unwrap();
        assert_eq!(p.neighborhood(&s(5, &[2]), &1.0).unwrap().indices(), &[1, 2, 3]);
        let u = s(5, &[0, 3]);
        assert_eq!(p.neighborhood(&u, &0.0).unwrap(), u);
        let c4 = build_graph_space::<f64>(4, &cycle_edges(4)).unwrap();
        assert_eq!(c4.neighborhood(&s(4, &[0]), &2.0).unwrap().len(), 4);
        assert_eq!(p.neighborhood(&Subset::empty(5), &1.0), Err(Error::EmptySubset));
    }

    #[test]
    fn distances_and_diameters() {
        let p = FiniteMetricSpace::<f64>::path(10).unwrap();
        assert_eq!(p.set_distance(&s(10, &[0, 1]), &s(10, &[5])).unwrap(), 4.0);
        assert_eq!(p.set_distance(&s(10, &[0, 4]), &s(10, &[4, 7])).unwrap(), 0.0);
        assert_eq!(p.set_distance(&s(10, &[0]), &s(10, &[0])).unwrap(), 0.0);
        assert_eq!(p.diameter(&s(10, &[3])).unwrap(), 0.0);
        assert_eq!(p.diameter(&s(10, &[0, 9])).unwrap(), 9.0);
        let c4 = build_graph_space::<f64>(4, &cycle_edges(4)).unwrap();
        assert_eq!(c4.diameter(&c4.points()).unwrap(), 2.0);
        let g = FiniteMetricSpace::<f64>::grid(3, 4).unwrap();
        assert_eq!(g.diameter(&g.points()).unwrap(), 5.0);
        assert_eq!(g.diameter(&s(12, &[3, 8])).unwrap(), 5.0);
    }

    #[test]
    fn implicit_metrics_match_graph_metrics() {
        let grid = FiniteMetricSpace::<f64>::grid(3, 4).unwrap();
        let mut edges = Vec::new();
        for x in 0..3 {
            for y in 0..4 {
                let p = x * 4 + y;
                if y + 1 < 4 {
                    edges.push((p, p + 1, 1));
                }
                if x + 1 < 3 {
                    edges.push((p, p + 4, 1));
                }
            }
        }
        let dense = build_graph_space::<f64>(12, &edges).unwrap();
        assert_eq!(grid.distance_rows(), dense.distance_rows());
        let pts = s(12, &[0, 5, 11]);
        assert_eq!(grid.diameter(&pts), dense.diameter(&pts));
    }

    #[test]
    fn validation_rejects_bad_tables() {
        assert!(FiniteMetricSpace::from_distances(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_distances(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetricSpace::from_distances(bad).is_err());
        let ok = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        assert!(FiniteMetricSpace::from_distances(ok).is_ok());
    }
}
