use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::FiberedOperator;
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};
use crate::space::FiniteMetricSpace;

/// Samples an operator of propagation at most `r`.
///
/// Blocks are filled in row-major block order, entries row-major within a
/// block; pairs farther than `r` consume no randomness and stay exactly zero.
pub fn random_band_operator<T: Real>(
    space: &FiniteMetricSpace<T>,
    r: &T,
    h: usize,
    seed: u64,
    scale: T,
) -> Result<FiberedOperator<T>> {
    if *r < T::zero() {
        return Err(Error::InvalidParameter("band radius must be nonnegative".into()));
    }
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(n * h, n * h);
    for x in 0..n {
        for y in 0..n {
            if space.dist(x, y) > *r {
                continue;
            }
            for a in 0..h {
                for b in 0..h {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    m[(x * h + a, y * h + b)] = scale * cast::<T>(z);
                }
            }
        }
    }
    FiberedOperator::new(n, h, m)
}
