use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;

use super::Multigraph;
use crate::error::{Error, Result};
use crate::operators::FiberedOperator;
use crate::scalar::{cast, Real};
use crate::space::Subset;

/// Largest vertex count for the exhaustive Cheeger constant.
pub const CHEEGER_CAP: usize = 20;
const ZERO_EIGENVALUE: f64 = 1e-9;

/// `Δ = D − δ`.
pub fn laplacian<T: Real>(g: &Multigraph) -> FiberedOperator<T> {
    let n = g.len();
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        m[(x, x)] = cast(g.degree(x) as f64);
        for &(y, k) in g.neighbors(x) {
            m[(x, y)] = -cast::<T>(f64::from(k));
        }
    }
    FiberedOperator::new(n, 1, m).expect("square table")
}

/// `Δ · M` using the adjacency lists; exact zeros stay exact.
pub(crate) fn laplacian_mul<T: Real>(g: &Multigraph, m: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        let col = m.column(j);
        let mut dst = out.column_mut(j);
        for x in 0..g.len() {
            let mut acc = cast::<T>(g.degree(x) as f64) * col[x];
            for &(y, k) in g.neighbors(x) {
                acc -= cast::<T>(f64::from(k)) * col[y];
            }
            dst[x] = acc;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    pub lambda1: T,
    pub zero_multiplicity: usize,
    pub eigenvectors: Option<DMatrix<T>>,
}

impl<T: Real> SpectralData<T> {
    pub fn lambda_max(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

/// Full Laplacian spectrum. `λ₁` is the smallest eigenvalue above `1e-9`.
pub fn spectrum<T: Real>(g: &Multigraph, vectors: bool) -> Result<SpectralData<T>> {
    let m = laplacian::<T>(g).into_matrix();
    let (values, vecs): (Vec<T>, Option<DMatrix<T>>) = if vectors {
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let cols: Vec<_> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        (vals, Some(DMatrix::from_columns(&cols)))
    } else {
        let mut vals: Vec<T> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        (vals, None)
    };
    let zero: T = cast(ZERO_EIGENVALUE);
    let zero_multiplicity = values.iter().filter(|v| **v <= zero).count();
    let lambda1 = values.iter().copied().find(|v| *v > zero).ok_or(Error::AllZero)?;
    Ok(SpectralData { eigenvalues: values, lambda1, zero_multiplicity, eigenvectors: vecs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cheeger {
    /// `|E(A, B)| / min(|A|, |B|)`, exact; zero when disconnected.
    pub value: Ratio<u64>,
    pub disconnected: bool,
    /// The side `A` of a minimizing bipartition (lowest mask on ties).
    pub witness: Subset,
}

/// Exact Cheeger constant over all `2^(n−1) − 1` bipartitions.
pub fn cheeger(g: &Multigraph, cap: usize) -> Result<Cheeger> {
    let n = g.len();
    if n < 2 {
        return Err(Error::InvalidParameter("Cheeger constant needs at least two vertices".into()));
    }
    if n > cap.min(63) {
        return Err(Error::TooLarge { what: "Cheeger bipartitions", size: n, cap: cap.min(63) });
    }
    let edges = g.edges();
    let mut best: Option<(Ratio<u64>, u64)> = None;
    // The last vertex always sits in B, so each bipartition is seen once.
    for mask in 1u64..(1 << (n - 1)) {
        let a = u64::from(mask.count_ones());
        let cut: u64 = edges
            .iter()
            .filter(|&&(u, v, _)| (mask >> u & 1) != (mask >> v & 1))
            .map(|e| u64::from(e.2))
            .sum();
        let r = Ratio::new(cut, a.min(n as u64 - a));
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, mask));
        }
    }
    let (value, mask) = best.expect("at least one bipartition");
    Ok(Cheeger { disconnected: !g.is_connected(), value, witness: Subset::from_mask(n, mask) })
}
