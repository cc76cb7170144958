use serde::Serialize;

use crate::error::{Error, Result};

/// Sorted set of point indices of a space with `universe` points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Subset {
    #[serde(skip)]
    universe: usize,
    indices: Vec<usize>,
}

impl Subset {
    /// Builds a subset from arbitrary indices; duplicates are merged.
    pub fn new(universe: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= universe {
                return Err(Error::InvalidParameter(format!(
                    "point {last} out of range for a space of {universe} points"
                )));
            }
        }
        Ok(Self { universe, indices })
    }

    pub(crate) fn from_sorted(universe: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&x| x < universe));
        Self { universe, indices }
    }

    pub fn empty(universe: usize) -> Self {
        Self { universe, indices: Vec::new() }
    }

    pub fn full(universe: usize) -> Self {
        Self { universe, indices: (0..universe).collect() }
    }

    pub fn singleton(universe: usize, x: usize) -> Result<Self> {
        Self::new(universe, vec![x])
    }

    pub fn range(universe: usize, range: std::ops::Range<usize>) -> Result<Self> {
        Self::new(universe, range.collect())
    }

    pub fn from_mask(universe: usize, mask: u64) -> Self {
        let indices = (0..universe.min(64)).filter(|&i| mask >> i & 1 == 1).collect();
        Self { universe, indices }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }

    pub fn first(&self) -> Option<usize> {
        self.indices.first().copied()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        indices.sort_unstable();
        indices.dedup();
        Subset::from_sorted(self.universe, indices)
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let indices = self.iter().filter(|&x| other.contains(x)).collect();
        Subset::from_sorted(self.universe, indices)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let indices = self.iter().filter(|&x| !other.contains(x)).collect();
        Subset::from_sorted(self.universe, indices)
    }

    pub fn complement(&self) -> Subset {
        Subset::full(self.universe).difference(self)
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut flags = vec![false; self.universe];
        for x in self.iter() {
            flags[x] = true;
        }
        flags
    }

    pub(crate) fn check_universe(&self, n: usize) -> Result<()> {
        if self.universe != n {
            return Err(Error::SpaceMismatch { expected: n, found: self.universe });
        }
        Ok(())
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(())
    }
}
