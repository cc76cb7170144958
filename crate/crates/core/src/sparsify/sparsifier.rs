use super::combinators::{color_sparsify, extension_sparsify, union_sparsify};
use super::interval::interval_diameter_bound;
use super::{sparsify_interval, ClusterDecomposition};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};
use crate::space::{FiniteMetricSpace, Measure, Subset};

/// A sparsifier with a declared constant `c` and growth function `f`.
///
/// Every decomposition produced for separation parameter `m` is expected to
/// pass `verify_decomposition` with `(m, f(m), c)`.
pub trait Sparsifier<S: Scalar>: Sync {
    fn name(&self) -> String;
    fn constant(&self) -> S;
    fn diameter_bound(&self, m: usize) -> S;
    fn sparsify(&self, space: &FiniteMetricSpace<S>, mu: &Measure<S>, m: usize) -> Result<ClusterDecomposition<S>>;
}

/// Residue-class sparsifier for the integer interval; `c = 1 - 1/k`, `f(m) = km`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalSparsifier {
    pub k: usize,
}

impl<S: Scalar> Sparsifier<S> for IntervalSparsifier {
    fn name(&self) -> String {
        format!("interval(k={})", self.k)
    }

    fn constant(&self) -> S {
        S::one() - S::one() / from_usize::<S>(self.k)
    }

    fn diameter_bound(&self, m: usize) -> S {
        interval_diameter_bound(m, self.k)
    }

    fn sparsify(&self, space: &FiniteMetricSpace<S>, mu: &Measure<S>, m: usize) -> Result<ClusterDecomposition<S>> {
        if !space.is_path_metric() {
            return Err(Error::InvalidParameter("interval sparsifier needs a path metric".into()));
        }
        mu.check_len(space.len())?;
        let d = sparsify_interval(mu, m, self.k)?;
        ClusterDecomposition::new(space, d.clusters().to_vec())
    }
}

/// Two-step sparsifier for grids: base coordinate first, then fibers.
/// `c = (1 - 1/k)²`, `f(m) = 2km`.
#[derive(Debug, Clone, Copy)]
pub struct GridSparsifier {
    pub k: usize,
}

impl<S: Scalar> Sparsifier<S> for GridSparsifier {
    fn name(&self) -> String {
        format!("grid(k={})", self.k)
    }

    fn constant(&self) -> S {
        let c = S::one() - S::one() / from_usize::<S>(self.k);
        c.clone() * c
    }

    fn diameter_bound(&self, m: usize) -> S {
        from_usize(2 * self.k * m)
    }

    fn sparsify(&self, space: &FiniteMetricSpace<S>, mu: &Measure<S>, m: usize) -> Result<ClusterDecomposition<S>> {
        extension_sparsify(space, mu, m, self.k)
    }
}

/// Sparsifier for a space covered by an `m₀`-disjoint family of pieces,
/// each with its own sparsifier. Valid for `m ≤ m₀`.
pub struct UnionSparsifier<'a, S> {
    pub pieces: Vec<Subset>,
    pub parts: Vec<&'a dyn Sparsifier<S>>,
}

impl<S: Scalar> Sparsifier<S> for UnionSparsifier<'_, S> {
    fn name(&self) -> String {
        let names: Vec<String> = self.parts.iter().map(|p| p.name()).collect();
        format!("union[{}]", names.join(","))
    }

    fn constant(&self) -> S {
        self.parts
            .iter()
            .map(|p| p.constant())
            .reduce(S::min_of)
            .unwrap_or_else(S::one)
    }

    fn diameter_bound(&self, m: usize) -> S {
        self.parts
            .iter()
            .map(|p| p.diameter_bound(m))
            .fold(S::zero(), S::max_of)
    }

    fn sparsify(&self, space: &FiniteMetricSpace<S>, mu: &Measure<S>, m: usize) -> Result<ClusterDecomposition<S>> {
        union_sparsify(space, &self.pieces, &self.parts, mu, m)
    }
}

/// Heaviest color class of a colored cover; `c = 1/(number of colors)`,
/// `f` = largest member diameter.
#[derive(Debug, Clone)]
pub struct ColorSparsifier<S> {
    cover: Vec<(usize, Subset)>,
    member_diameter: S,
}

impl<S: Scalar> ColorSparsifier<S> {
    pub fn new(space: &FiniteMetricSpace<S>, cover: Vec<(usize, Subset)>) -> Result<Self> {
        let mut member_diameter = S::zero();
        for (_, s) in cover.iter().filter(|(_, s)| !s.is_empty()) {
            member_diameter = member_diameter.max_of(space.diameter(s)?);
        }
        Ok(Self { cover, member_diameter })
    }

    pub fn cover(&self) -> &[(usize, Subset)] {
        &self.cover
    }
}

impl<S: Scalar> Sparsifier<S> for ColorSparsifier<S> {
    fn name(&self) -> String {
        format!("color({} members)", self.cover.len())
    }

    fn constant(&self) -> S {
        let mut colors: Vec<usize> = self.cover.iter().map(|c| c.0).collect();
        colors.sort_unstable();
        colors.dedup();
        S::one() / from_usize::<S>(colors.len().max(1))
    }

    fn diameter_bound(&self, _m: usize) -> S {
        self.member_diameter.clone()
    }

    fn sparsify(&self, space: &FiniteMetricSpace<S>, mu: &Measure<S>, m: usize) -> Result<ClusterDecomposition<S>> {
        color_sparsify(space, &self.cover, mu, &from_usize(m))
    }
}
