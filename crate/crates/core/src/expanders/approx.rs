//! Polynomial approximants `q(Δ)` of the projection onto constants.
//!
//! Any `q` with `q(0) = 1` gives `‖q(Δ) − p‖ = max |q(λ)|` over the positive
//! Laplacian eigenvalues, so the certificate is read off the spectrum.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spectral::{laplacian_mul, spectrum};
use super::Multigraph;
use crate::error::{Error, Result};
use crate::operators::FiberedOperator;
use crate::scalar::{cast, Real};

const MAX_TAYLOR_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Chebyshev,
    Heat,
}

#[derive(Debug, Clone, PartialEq)]
enum Poly<T> {
    One,
    /// `1 − λ/λ₁`.
    Linear { lambda1: T },
    /// `T_d(σ − aλ) / T_d(σ)`.
    Chebyshev { degree: usize, sigma: T, a: T },
    /// `p_M(−hλ)^(2^s)`, `p_M` the order-`M` Taylor polynomial of `exp`.
    Heat { order: usize, h: T, squarings: u32 },
}

impl<T: Real> Poly<T> {
    fn eval(&self, lambda: T) -> T {
        match self {
            Poly::One => T::one(),
            Poly::Linear { lambda1 } => T::one() - lambda / *lambda1,
            Poly::Chebyshev { degree, sigma, a } => chebyshev(*degree, *sigma - *a * lambda) / chebyshev(*degree, *sigma),
            Poly::Heat { order, h, squarings } => {
                let mut v = taylor_exp(*order, -*h * lambda);
                for _ in 0..*squarings {
                    v = v * v;
                }
                v
            }
        }
    }

    fn degree(&self) -> usize {
        match self {
            Poly::One => 0,
            Poly::Linear { .. } => 1,
            Poly::Chebyshev { degree, .. } => *degree,
            Poly::Heat { order, squarings, .. } => order << squarings,
        }
    }
}

fn chebyshev<T: Real>(d: usize, z: T) -> T {
    let (mut prev, mut cur) = (T::one(), z);
    if d == 0 {
        return prev;
    }
    let two: T = cast(2.0);
    for _ in 1..d {
        (prev, cur) = (cur, two * z * cur - prev);
    }
    cur
}

fn taylor_exp<T: Real>(order: usize, x: T) -> T {
    let mut acc = T::one();
    for j in (1..=order).rev() {
        acc = T::one() + x * acc / cast(j as f64);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximant<T: Real> {
    pub operator: FiberedOperator<T>,
    pub method: Method,
    /// Degree of `q`; bounds the propagation of `q(Δ)`.
    pub degree: usize,
    /// `‖q(Δ) − p‖ = max |q(λ)|` over positive eigenvalues.
    pub certificate: T,
    pub lambda1: Option<T>,
    pub lambda_max: Option<T>,
    poly: Poly<T>,
}

impl<T: Real> Approximant<T> {
    pub fn eval(&self, lambda: T) -> T {
        self.poly.eval(lambda)
    }
}

/// Finite-propagation `T = q(Δ)` with `‖T − p‖ ≤ ε`, `p` the projection
/// onto constants.
///
/// Chebyshev picks the minimal degree `d` with `1/T_d(σ) ≤ ε` on
/// `[λ₁, λ_max]`. Heat uses `exp(−tΔ)` with `t = ln(2/ε)/λ₁`, evaluated by
/// Taylor order `M` after scaling by `2^s`, raising `M` until the spectral
/// certificate is within `ε`.
pub fn projection_approximant<T: Real>(g: &Multigraph, eps: T, method: Method) -> Result<Approximant<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidParameter("approximation error must lie in (0, 1)".into()));
    }
    if g.is_empty() {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.len();
    if n == 1 {
        return Ok(Approximant {
            operator: FiberedOperator::identity(1, 1)?,
            method,
            degree: 0,
            certificate: T::zero(),
            lambda1: None,
            lambda_max: None,
            poly: Poly::One,
        });
    }
    let spec = spectrum::<T>(g, false)?;
    let (l1, lmax) = (spec.lambda1, spec.lambda_max());
    let positive: Vec<T> = spec.eigenvalues[spec.zero_multiplicity..].to_vec();
    let certify = |q: &Poly<T>| positive.iter().map(|&l| q.eval(l).abs()).fold(T::zero(), T::max);

    let (poly, certificate) = match method {
        Method::Chebyshev if lmax - l1 <= cast::<T>(1e-9) * lmax => {
            let q = Poly::Linear { lambda1: l1 };
            let c = certify(&q);
            (q, c)
        }
        Method::Chebyshev => {
            let sigma = (lmax + l1) / (lmax - l1);
            let a = cast::<T>(2.0) / (lmax - l1);
            let guess = ((T::one() / eps).acosh() / sigma.acosh()).ceil();
            let mut d = crate::scalar::to_f64(&guess).max(1.0) as usize;
            while d > 1 && chebyshev(d - 1, sigma).recip() <= eps {
                d -= 1;
            }
            loop {
                let q = Poly::Chebyshev { degree: d, sigma, a };
                let c = certify(&q);
                if c <= eps {
                    break (q, c);
                }
                d += 1;
            }
        }
        Method::Heat => {
            let t = (cast::<T>(2.0) / eps).ln() / l1;
            let mut squarings = 0u32;
            while t * lmax > cast(2f64.powi(squarings as i32)) {
                squarings += 1;
            }
            let h = t / cast(2f64.powi(squarings as i32));
            let mut found = None;
            for order in 1..=MAX_TAYLOR_ORDER {
                let q = Poly::Heat { order, h, squarings };
                let c = certify(&q);
                if c <= eps {
                    found = Some((q, c));
                    break;
                }
            }
            found.ok_or(Error::NoConvergence { lower: 0.0, upper: crate::scalar::to_f64(&eps) })?
        }
    };
    let operator = FiberedOperator::new(n, 1, apply_poly(g, &poly))?;
    Ok(Approximant {
        operator,
        method,
        degree: poly.degree(),
        certificate,
        lambda1: Some(l1),
        lambda_max: Some(lmax),
        poly,
    })
}

fn apply_poly<T: Real>(g: &Multigraph, poly: &Poly<T>) -> DMatrix<T> {
    let n = g.len();
    let id = DMatrix::<T>::identity(n, n);
    match poly {
        Poly::One => id,
        Poly::Linear { lambda1 } => &id - laplacian_mul(g, &id) / *lambda1,
        Poly::Chebyshev { degree, sigma, a } => {
            // Z = σI − aΔ; T_{k+1}(Z) = 2 Z T_k(Z) − T_{k−1}(Z).
            let z_mul = |m: &DMatrix<T>| m * *sigma - laplacian_mul(g, m) * *a;
            let mut prev = id.clone();
            let mut cur = z_mul(&id);
            for _ in 1..*degree {
                let next = z_mul(&cur) * cast::<T>(2.0) - &prev;
                prev = cur;
                cur = next;
            }
            cur / chebyshev(*degree, *sigma)
        }
        Poly::Heat { order, h, squarings } => {
            let mut acc = id.clone();
            for j in (1..=*order).rev() {
                acc = &id - laplacian_mul(g, &acc) * (*h / cast(j as f64));
            }
            for _ in 0..*squarings {
                acc = &acc * &acc;
            }
            acc
        }
    }
}
