use serde::{Serialize, Serializer};

use super::Subset;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, from_usize, to_f64, Scalar};

/// Nonnegative weight on each point of a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<S> {
    weights: Vec<S>,
    total: S,
}

impl<S: Scalar> Measure<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(*w >= S::zero())) {
            return Err(Error::InvalidParameter(format!(
                "measure weight at point {i} is negative or not a number"
            )));
        }
        let total = compensated_sum(&weights);
        Ok(Self { weights, total })
    }

    pub fn zero(n: usize) -> Self {
        Self { weights: vec![S::zero(); n], total: S::zero() }
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![S::one(); n], total: from_usize(n) }
    }

    pub fn point_mass(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(Error::InvalidParameter(format!("point {x} out of range")));
        }
        let mut weights = vec![S::zero(); n];
        weights[x] = S::one();
        Ok(Self { weights, total: S::one() })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> &S {
        &self.weights[x]
    }

    pub fn total(&self) -> &S {
        &self.total
    }

    pub fn is_zero(&self) -> bool {
        self.total <= S::zero()
    }

    pub fn mass_of(&self, subset: &Subset) -> S {
        let picked: Vec<S> = subset.iter().map(|x| self.weights[x].clone()).collect();
        compensated_sum(&picked)
    }

    /// Mass of a union of disjoint subsets.
    pub fn mass_of_all<'a, I: IntoIterator<Item = &'a Subset>>(&self, parts: I) -> S {
        let picked: Vec<S> = parts
            .into_iter()
            .flat_map(|p| p.iter().map(|x| self.weights[x].clone()))
            .collect();
        compensated_sum(&picked)
    }

    /// Restriction to `subset`: weights outside are set to zero.
    pub fn restrict(&self, subset: &Subset) -> Self {
        let mut weights = vec![S::zero(); self.weights.len()];
        for x in subset.iter() {
            weights[x] = self.weights[x].clone();
        }
        let total = compensated_sum(&weights);
        Self { weights, total }
    }

    /// Probability measure proportional to `self`.
    pub fn normalized(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroMass);
        }
        let weights: Vec<S> = self.weights.iter().map(|w| w.clone() / self.total.clone()).collect();
        Ok(Self { weights, total: S::one() })
    }

    pub fn support(&self) -> Subset {
        let idx = (0..self.len()).filter(|&x| self.weights[x] > S::zero()).collect();
        Subset::from_sorted(self.len(), idx)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.weights.len() != n {
            return Err(Error::SpaceMismatch { expected: n, found: self.weights.len() });
        }
        Ok(())
    }
}

impl<S: Scalar> Serialize for Measure<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.to_f64().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_weights() {
        assert!(Measure::new(vec![1.0, -0.5]).is_err());
        assert!(Measure::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn restriction_and_mass() {
        let mu = Measure::new(vec![1.0, 2.0, 3.0]).unwrap();
        let s = Subset::new(3, vec![0, 2]).unwrap();
        assert_eq!(mu.mass_of(&s), 4.0);
        assert_eq!(*mu.restrict(&s).total(), 4.0);
        assert_eq!(mu.normalized().unwrap().weights()[2], 0.5);
        assert_eq!(Measure::<f64>::zero(2).normalized(), Err(Error::ZeroMass));
    }
}
