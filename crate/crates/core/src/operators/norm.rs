//! Operator norms: a full singular value decomposition for small matrices
//! and a restarted Lanczos iteration on `TᵀT` otherwise.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FiberedOperator, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Matrices with at most this many rows use the full decomposition.
pub const FULL_DECOMPOSITION_LIMIT: usize = 512;
const NORM_SEED: u64 = 0x6e6f_726d;
const KRYLOV_DIM: usize = 80;
const MAX_RESTARTS: usize = 40;
const STARTS: u64 = 2;

pub fn operator_norm<T: Real>(op: &FiberedOperator<T>) -> Result<T> {
    if op.matrix().nrows() <= FULL_DECOMPOSITION_LIMIT {
        Ok(full_norm(op.matrix()))
    } else {
        iterative_norm(op.matrix(), NORM_SEED)
    }
}

pub fn full_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn iterative_norm<T: Real>(m: &DMatrix<T>, seed: u64) -> Result<T> {
    lanczos_top(m, seed).map(|(s, _)| s)
}

/// Largest singular value with a unit right singular vector, sign-normalized
/// so that its largest-magnitude entry is positive.
pub fn top_singular_pair<T: Real>(op: &FiberedOperator<T>) -> Result<(T, StateVector<T>)> {
    let m = op.matrix();
    let (sigma, mut v) = if m.nrows() <= FULL_DECOMPOSITION_LIMIT {
        let svd = m.clone().svd(false, true);
        let best = svd.singular_values.imax();
        let vt = svd.v_t.expect("requested right singular vectors");
        (svd.singular_values[best], vt.row(best).transpose())
    } else {
        lanczos_top(m, NORM_SEED)?
    };
    let lead = v.iter().copied().fold(T::zero(), |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if lead < T::zero() {
        v.neg_mut();
    }
    Ok((sigma, StateVector::new(op.points(), op.fiber_dim(), v)?))
}

fn lanczos_top<T: Real>(m: &DMatrix<T>, seed: u64) -> Result<(T, DVector<T>)> {
    let dim = m.ncols();
    if dim == 0 {
        return Ok((T::zero(), DVector::zeros(0)));
    }
    let mut best: Option<(T, DVector<T>)> = None;
    for s in 0..STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
        let start = DVector::from_fn(dim, |_, _| cast::<T>(StandardNormal.sample(&mut rng)));
        let (sigma, v) = restarted_lanczos(m, start)?;
        if best.as_ref().is_none_or(|(b, _)| sigma > *b) {
            best = Some((sigma, v));
        }
    }
    Ok(best.expect("at least one start"))
}

fn restarted_lanczos<T: Real>(m: &DMatrix<T>, mut start: DVector<T>) -> Result<(T, DVector<T>)> {
    let dim = m.ncols();
    let eps = T::default_epsilon();
    let tol = cast::<T>(1e-10).max(eps * cast(100.0));
    let steps = KRYLOV_DIM.min(dim);
    let gram = |v: &DVector<T>| m.tr_mul(&(m * v));

    for _ in 0..MAX_RESTARTS {
        let norm = start.norm();
        if norm <= eps {
            // Start vector collapsed into the kernel; A is effectively zero.
            return Ok((T::zero(), DVector::from_fn(dim, |i, _| if i == 0 { T::one() } else { T::zero() })));
        }
        let mut basis: Vec<DVector<T>> = vec![start / norm];
        let mut alpha: Vec<T> = Vec::with_capacity(steps);
        let mut beta: Vec<T> = Vec::with_capacity(steps);
        let mut ritz = basis[0].clone();
        for j in 0..steps {
            let mut w = gram(&basis[j]);
            let a = basis[j].dot(&w);
            alpha.push(a);
            w.axpy(-a, &basis[j], T::one());
            if j > 0 {
                w.axpy(-beta[j - 1], &basis[j - 1], T::one());
            }
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&w);
                    w.axpy(-c, q, T::one());
                }
            }
            let b = w.norm();
            beta.push(b);

            let (theta, y) = tridiagonal_top(&alpha, &beta[..j]);
            ritz = combine(&basis, &y);
            let residual = b * y[j].abs();
            let scale = theta.max(eps);
            if residual <= tol * scale || b <= eps * scale || j + 1 == dim {
                let rn = ritz.norm();
                ritz /= rn;
                return Ok(((m * &ritz).norm(), ritz));
            }
            basis.push(w / b);
        }
        start = ritz;
    }
    let lower = (m * &start.normalize()).norm();
    let upper = (m.row_iter().map(|r| r.abs().sum()).fold(T::zero(), T::max)
        * m.column_iter().map(|c| c.abs().sum()).fold(T::zero(), T::max))
    .sqrt();
    Err(Error::NoConvergence { lower: crate::scalar::to_f64(&lower), upper: crate::scalar::to_f64(&upper) })
}

fn tridiagonal_top<T: Real>(alpha: &[T], beta: &[T]) -> (T, DVector<T>) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let top = eig.eigenvalues.imax();
    (eig.eigenvalues[top], eig.eigenvectors.column(top).into_owned())
}

fn combine<T: Real>(basis: &[DVector<T>], y: &DVector<T>) -> DVector<T> {
    let mut out = DVector::zeros(basis[0].len());
    for (q, &c) in basis.iter().zip(y.iter()) {
        out.axpy(c, q, T::one());
    }
    out
}
