//! Finite-propagation operators on `ℓ²(X) ⊗ Cʰ`.
//!
//! An operator is stored as a dense `nh × nh` matrix with point-major
//! layout: coordinate `a` of the fiber over point `x` lives at index
//! `x·h + a`. Propagation is always recomputed from the table.

mod localize;
mod norm;
mod random;

pub use localize::{
    localize_vector, localized_ratio, localized_ratio_with, opa_estimate, opa_estimate_family, LocalizationParams,
    LocalizationReport, OpaEstimate, ProofChain, ReportMode,
};
pub use norm::{full_norm, iterative_norm, operator_norm, top_singular_pair, FULL_DECOMPOSITION_LIMIT};
pub use random::random_band_operator;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{cast, compensated_sum, Real};
use crate::space::{FiniteMetricSpace, Subset};

pub const DEFAULT_TAU: f64 = 1e-12;
pub const MAX_FIBER_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberedOperator<T: Real> {
    n: usize,
    h: usize,
    matrix: DMatrix<T>,
    tau: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl<T: Real> FiberedOperator<T> {
    pub fn new(n: usize, h: usize, matrix: DMatrix<T>) -> Result<Self> {
        if h == 0 || h > MAX_FIBER_DIM {
            return Err(Error::InvalidParameter(format!("fiber dimension {h} outside 1..={MAX_FIBER_DIM}")));
        }
        if matrix.nrows() != n * h || matrix.ncols() != n * h {
            return Err(Error::SpaceMismatch { expected: n * h, found: matrix.nrows() });
        }
        Ok(Self { n, h, matrix, tau: cast(DEFAULT_TAU) })
    }

    pub fn identity(n: usize, h: usize) -> Result<Self> {
        Self::new(n, h, DMatrix::identity(n * h, n * h))
    }

    pub fn diagonal(values: &[T]) -> Result<Self> {
        Self::new(values.len(), 1, DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.h
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    /// Frobenius norm of the block `T[x][y]`.
    pub fn block_norm(&self, x: usize, y: usize) -> T {
        self.matrix.view((x * self.h, y * self.h), (self.h, self.h)).norm()
    }

    /// Largest distance between points joined by a block of norm above `τ`;
    /// `None` for the zero operator.
    pub fn propagation(&self, space: &FiniteMetricSpace<T>) -> Result<Option<T>> {
        self.check_space(space)?;
        let mut best: Option<T> = None;
        for x in 0..self.n {
            for y in 0..self.n {
                if self.block_norm(x, y) > self.tau {
                    let d = space.dist(x, y);
                    if best.is_none_or(|b| d > b) {
                        best = Some(d);
                    }
                }
            }
        }
        Ok(best)
    }

    /// `P_U T`, `T P_U` or `P_U T P_U`, zeroing excluded blocks exactly.
    pub fn project(&self, u: &Subset, side: Side) -> Result<Self> {
        u.check_universe(self.n)?;
        u.require_nonempty()?;
        let keep = u.indicator();
        let h = self.h;
        let mut m = self.matrix.clone();
        for i in 0..self.n * h {
            for j in 0..self.n * h {
                let drop_row = matches!(side, Side::Left | Side::Both) && !keep[i / h];
                let drop_col = matches!(side, Side::Right | Side::Both) && !keep[j / h];
                if drop_row || drop_col {
                    m[(i, j)] = T::zero();
                }
            }
        }
        Ok(Self { matrix: m, ..self.clone() })
    }

    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_vector(v)?;
        Ok(StateVector { n: self.n, h: self.h, data: &self.matrix * &v.data })
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.transpose(), ..self.clone() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.h != other.h {
            return Err(Error::SpaceMismatch { expected: self.n * self.h, found: other.n * other.h });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix, ..self.clone() })
    }

    pub(crate) fn check_space(&self, space: &FiniteMetricSpace<T>) -> Result<()> {
        if space.len() != self.n {
            return Err(Error::SpaceMismatch { expected: self.n, found: space.len() });
        }
        Ok(())
    }

    fn check_vector(&self, v: &StateVector<T>) -> Result<()> {
        if v.n != self.n || v.h != self.h {
            return Err(Error::SpaceMismatch { expected: self.n * self.h, found: v.n * v.h });
        }
        Ok(())
    }
}

/// A vector in `ℓ²(X) ⊗ Cʰ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n: usize,
    h: usize,
    data: DVector<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(n: usize, h: usize, data: DVector<T>) -> Result<Self> {
        if data.len() != n * h || h == 0 {
            return Err(Error::SpaceMismatch { expected: n * h, found: data.len() });
        }
        Ok(Self { n, h, data })
    }

    pub fn zeros(n: usize, h: usize) -> Self {
        Self { n, h, data: DVector::zeros(n * h) }
    }

    pub fn data(&self) -> &DVector<T> {
        &self.data
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.h
    }

    /// `‖v[x]‖²`.
    pub fn point_norm_sq(&self, x: usize) -> T {
        self.data.rows(x * self.h, self.h).norm_squared()
    }

    pub fn norm_sq(&self) -> T {
        let parts: Vec<T> = (0..self.n).map(|x| self.point_norm_sq(x)).collect();
        compensated_sum(&parts)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// `{x : ‖v[x]‖ > τ}`.
    pub fn support(&self, tau: T) -> Subset {
        let tau_sq = tau * tau;
        let idx = (0..self.n).filter(|&x| self.point_norm_sq(x) > tau_sq).collect();
        Subset::new(self.n, idx).expect("indices in range")
    }

    /// `P_U v`.
    pub fn restrict(&self, u: &Subset) -> Result<Self> {
        u.check_universe(self.n)?;
        let keep = u.indicator();
        let mut data = self.data.clone();
        for i in 0..data.len() {
            if !keep[i / self.h] {
                data[i] = T::zero();
            }
        }
        Ok(Self { data, ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.h != other.h {
            return Err(Error::SpaceMismatch { expected: self.n * self.h, found: other.n * other.h });
        }
        Ok(Self { data: &self.data + &other.data, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expanders::{laplacian, Multigraph};
    use crate::space::build_graph_space;

    #[test]
    fn propagation_examples() {
        let c4 = build_graph_space::<f64>(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        assert_eq!(FiberedOperator::<f64>::identity(4, 1).unwrap().propagation(&c4).unwrap(), Some(0.0));
        let g = Multigraph::cycle(4).unwrap();
        assert_eq!(laplacian::<f64>(&g).propagation(&c4).unwrap(), Some(1.0));
        let p = FiberedOperator::new(4, 1, DMatrix::from_element(4, 4, 0.25)).unwrap();
        assert_eq!(p.propagation(&c4).unwrap(), Some(2.0));
        let zero = FiberedOperator::new(4, 1, DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(zero.propagation(&c4).unwrap(), None);
    }

    #[test]
    fn projections() {
        let id = FiberedOperator::<f64>::identity(5, 2).unwrap();
        let u = Subset::new(5, vec![1, 3]).unwrap();
        let pu = id.project(&u, Side::Right).unwrap();
        for x in 0..5 {
            let expect = if u.contains(x) { 1.0 } else { 0.0 };
            assert_eq!(pu.matrix()[(2 * x, 2 * x)], expect);
            assert_eq!(pu.matrix()[(2 * x + 1, 2 * x + 1)], expect);
        }
        let t = FiberedOperator::new(3, 1, DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64)).unwrap();
        assert_eq!(t.project(&Subset::full(3), Side::Both).unwrap(), t);
        assert!(t.project(&Subset::empty(3), Side::Left).is_err());
    }

    #[test]
    fn state_vector_support_and_norm() {
        let v = StateVector::new(3, 2, DVector::from_vec(vec![3.0, 4.0, 0.0, 0.0, 1e-13, 0.0])).unwrap();
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.support(1e-12).indices(), &[0]);
        let r = v.restrict(&Subset::new(3, vec![1, 2]).unwrap()).unwrap();
        assert!(r.norm() < 1e-12);
    }
}
