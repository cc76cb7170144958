use std::cmp::Ordering;

use serde::Serialize;

use super::{FiniteMetricSpace, Measure, Subset};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Empirical distortion at one realized source distance `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlPoint<S> {
    pub t: S,
    /// `min d(F x, F y)` over pairs with `d(x, y) = t`.
    pub min: S,
    /// `max d(F x, F y)` over pairs with `d(x, y) = t`.
    pub max: S,
    /// Nondecreasing lower envelope: `min` over realized `t' ≥ t`.
    pub rho1: S,
    /// Nondecreasing upper envelope: `max` over realized `t' ≤ t`.
    pub rho2: S,
}

/// A total map between finite spaces with its measured control functions.
#[derive(Debug, Clone)]
pub struct CoarseMap<S> {
    source_len: usize,
    target_len: usize,
    values: Vec<usize>,
    control: Vec<ControlPoint<S>>,
}

impl<S: Scalar> CoarseMap<S> {
    pub fn new(source: &FiniteMetricSpace<S>, target: &FiniteMetricSpace<S>, values: Vec<usize>) -> Result<Self> {
        if values.len() != source.len() {
            return Err(Error::SpaceMismatch { expected: source.len(), found: values.len() });
        }
        if let Some(&y) = values.iter().find(|&&y| y >= target.len()) {
            return Err(Error::InvalidParameter(format!("map value {y} outside target")));
        }
        let n = source.len();
        let mut pairs: Vec<(S, S)> = Vec::with_capacity(n * (n + 1) / 2);
        for x in 0..n {
            for y in x..n {
                pairs.push((source.dist(x, y), target.dist(values[x], values[y])));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut control: Vec<ControlPoint<S>> = Vec::new();
        for (t, d) in pairs {
            match control.last_mut() {
                Some(c) if c.t == t => {
                    if d < c.min {
                        c.min = d.clone();
                    }
                    if d > c.max {
                        c.max = d;
                    }
                }
                _ => control.push(ControlPoint { t, min: d.clone(), max: d.clone(), rho1: d.clone(), rho2: d }),
            }
        }
        let mut run = S::zero();
        for c in control.iter_mut() {
            run = run.max_of(c.max.clone());
            c.rho2 = run.clone();
        }
        let mut run: Option<S> = None;
        for c in control.iter_mut().rev() {
            let v = match run {
                Some(r) => r.min_of(c.min.clone()),
                None => c.min.clone(),
            };
            c.rho1 = v.clone();
            run = Some(v);
        }
        Ok(Self { source_len: n, target_len: target.len(), values, control })
    }

    pub fn identity(space: &FiniteMetricSpace<S>) -> Self {
        Self::new(space, space, (0..space.len()).collect()).expect("identity map is total")
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn control(&self) -> &[ControlPoint<S>] {
        &self.control
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target_len];
        self.values.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// Upper control `ρ₂(t)`: largest image distance over source distances `≤ t`.
    pub fn rho2(&self, t: &S) -> S {
        self.control
            .iter()
            .take_while(|c| c.t <= *t)
            .last()
            .map_or_else(S::zero, |c| c.rho2.clone())
    }

    /// Largest image distance over source distances strictly below `m`.
    ///
    /// If target clusters are separated by more than this, preimages are
    /// separated by at least `m`.
    pub fn rho2_below(&self, m: &S) -> S {
        self.control
            .iter()
            .take_while(|c| c.t < *m)
            .last()
            .map_or_else(S::zero, |c| c.rho2.clone())
    }

    /// Lower control `ρ₁(t)`, `None` above the largest realized distance.
    pub fn rho1(&self, t: &S) -> Option<S> {
        self.control.iter().find(|c| c.t >= *t).map(|c| c.rho1.clone())
    }

    /// Generalized inverse `ρ₁⁻¹(D)`: largest realized `t` with `ρ₁(t) ≤ D`.
    pub fn rho1_inverse(&self, d: &S) -> S {
        self.control
            .iter()
            .filter(|c| c.rho1 <= *d)
            .last()
            .map_or_else(S::zero, |c| c.t.clone())
    }

    /// Pushforward `F(μ)(y) = Σ_{F(x) = y} μ(x)`.
    pub fn pushforward(&self, mu: &Measure<S>) -> Result<Measure<S>> {
        mu.check_len(self.source_len)?;
        let mut fibers: Vec<Vec<S>> = vec![Vec::new(); self.target_len];
        for (x, w) in mu.weights().iter().enumerate() {
            fibers[self.values[x]].push(w.clone());
        }
        Measure::new(fibers.iter().map(|f| compensated_sum(f)).collect())
    }

    /// Preimage `F⁻¹(V)`.
    pub fn preimage(&self, v: &Subset) -> Result<Subset> {
        v.check_universe(self.target_len)?;
        let flags = v.indicator();
        let idx = (0..self.source_len).filter(|&x| flags[self.values[x]]).collect();
        Ok(Subset::from_sorted(self.source_len, idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pushforward_sums_fibers() {
        let src = FiniteMetricSpace::<f64>::path(3).unwrap();
        let tgt = FiniteMetricSpace::<f64>::path(2).unwrap();
        let f = CoarseMap::new(&src, &tgt, vec![0, 0, 1]).unwrap();
        let mu = Measure::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.pushforward(&mu).unwrap().weights(), &[3.0, 3.0]);
        assert!(f.preimage(&Subset::empty(2)).unwrap().is_empty());
        assert_eq!(f.preimage(&Subset::new(2, vec![0]).unwrap()).unwrap().indices(), &[0, 1]);
        assert!(!f.is_injective());
    }

    #[test]
    fn identity_is_trivial() {
        let p = FiniteMetricSpace::<f64>::path(5).unwrap();
        let id = CoarseMap::identity(&p);
        let mu = Measure::new(vec![1.0, 0.0, 2.0, 0.5, 4.0]).unwrap();
        assert_eq!(id.pushforward(&mu).unwrap(), mu);
        let v = Subset::new(5, vec![1, 4]).unwrap();
        assert_eq!(id.preimage(&v).unwrap(), v);
        assert_eq!(id.rho2(&3.0), 3.0);
        assert_eq!(id.rho1(&3.0), Some(3.0));
        assert_eq!(id.rho1_inverse(&2.5), 2.0);
        assert_eq!(id.rho2_below(&3.0), 2.0);
    }

    #[test]
    fn envelopes_bound_every_pair() {
        // doubling map on a path folded into a shorter cycle-like target
        let src = FiniteMetricSpace::<f64>::path(6).unwrap();
        let tgt = FiniteMetricSpace::<f64>::path(4).unwrap();
        let f = CoarseMap::new(&src, &tgt, vec![0, 1, 1, 2, 3, 3]).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let t = src.dist(x, y);
                let d = tgt.dist(f.apply(x), f.apply(y));
                assert!(f.rho1(&t).unwrap() <= d && d <= f.rho2(&t));
            }
        }
        let c = f.control();
        assert!(c.windows(2).all(|w| w[0].rho1 <= w[1].rho1 && w[0].rho2 <= w[1].rho2));
        assert!(c.iter().all(|p| p.rho1 <= p.rho2));
    }
}
