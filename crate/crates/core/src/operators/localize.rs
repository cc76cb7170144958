//! Localized norms: exhaustive over bounded supports, and the constructive
//! procedure that turns a sparsifier into a localized vector.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::{operator_norm, random_band_operator, top_singular_pair, FiberedOperator, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{cast, from_usize, to_f64, Real};
use crate::space::{ball_family, maximal_bounded_subsets, FiniteMetricSpace, Measure, Subset, SupportMode};
use crate::sparsify::Sparsifier;

/// Slack on the singular-vector start and on each link of the proof chain.
pub const DELTA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    Clique,
    Ball,
    Sparsifier,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalizationParams<T> {
    Support { radius: T },
    Sparsifier { m: usize, name: String, constant: T, diameter_bound: T },
}

/// The measured links `‖A P_Ω′ φ‖² ≥ ‖P_Ω A φ‖² = μ(Ω) ≥ c μ(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofChain<T> {
    pub enlarged: T,
    pub projected: T,
    pub cluster_mass: T,
    pub constant: T,
    pub total_mass: T,
    /// `‖Aφ‖ / (‖A‖ ‖φ‖)` for the starting vector.
    pub start_ratio: T,
}

impl<T: Real> ProofChain<T> {
    pub fn holds(&self) -> bool {
        let slack = cast::<T>(DELTA) * self.total_mass;
        self.enlarged >= self.projected - slack
            && (self.projected - self.cluster_mass).abs() <= slack
            && self.cluster_mass >= self.constant * self.total_mass - slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport<T: Real> {
    pub witness: StateVector<T>,
    pub support: Subset,
    pub support_diameter: T,
    /// `‖Tξ‖ / (‖T‖ ‖ξ‖)`.
    pub ratio: T,
    pub norm: T,
    pub fiber_dim: usize,
    pub mode: ReportMode,
    pub params: LocalizationParams<T>,
    pub chain: Option<ProofChain<T>>,
}

/// Best ratio over inclusion-maximal supports of diameter ≤ `radius`.
pub fn localized_ratio<T: Real>(
    space: &FiniteMetricSpace<T>,
    op: &FiberedOperator<T>,
    radius: &T,
) -> Result<LocalizationReport<T>> {
    localized_ratio_with(space, op, radius, SupportMode::Cliques, crate::space::DEFAULT_CLIQUE_CAP)
}

/// As [`localized_ratio`], with an explicit support family. Ball mode, or
/// clique overflow past `cap`, uses `B(x, R)` and is flagged in the report.
pub fn localized_ratio_with<T: Real>(
    space: &FiniteMetricSpace<T>,
    op: &FiberedOperator<T>,
    radius: &T,
    mode: SupportMode,
    cap: usize,
) -> Result<LocalizationReport<T>> {
    op.check_space(space)?;
    let norm = operator_norm(op)?;
    if norm <= op.tau() {
        return Err(Error::ZeroOperator);
    }
    let family = match mode {
        SupportMode::Cliques => maximal_bounded_subsets(space, radius, cap),
        SupportMode::Balls => ball_family(space, radius),
    };
    let h = op.fiber_dim();
    let scored: Vec<(T, DVector<T>)> = family.sets.par_iter().map(|u| restricted_top(op.matrix(), u, h)).collect();
    let mut best = 0;
    for (i, (s, _)) in scored.iter().enumerate() {
        if *s > scored[best].0 {
            best = i;
        }
    }
    let (sigma, y) = &scored[best];
    let mut data = DVector::zeros(op.points() * h);
    for (k, x) in family.sets[best].iter().enumerate() {
        data.rows_mut(x * h, h).copy_from(&y.rows(k * h, h));
    }
    let witness = StateVector::new(op.points(), h, sign_normalized(data))?;
    let support = witness.support(op.tau());
    Ok(LocalizationReport {
        support_diameter: space.diameter(&support)?,
        support,
        witness,
        ratio: *sigma / norm,
        norm,
        fiber_dim: h,
        mode: match family.mode {
            SupportMode::Cliques => ReportMode::Clique,
            SupportMode::Balls => ReportMode::Ball,
        },
        params: LocalizationParams::Support { radius: *radius },
        chain: None,
    })
}

/// `‖T P_U‖` and the top right singular vector of `T P_U` restricted to `U`.
fn restricted_top<T: Real>(m: &DMatrix<T>, u: &Subset, h: usize) -> (T, DVector<T>) {
    let cols: Vec<usize> = u.iter().flat_map(|x| x * h..x * h + h).collect();
    let sub = m.select_columns(&cols);
    let eig = SymmetricEigen::new(sub.tr_mul(&sub));
    let top = eig.eigenvalues.imax();
    (eig.eigenvalues[top].max(T::zero()).sqrt(), eig.eigenvectors.column(top).into_owned())
}

fn sign_normalized<T: Real>(mut v: DVector<T>) -> DVector<T> {
    let lead = v.iter().copied().fold(T::zero(), |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if lead < T::zero() {
        v.neg_mut();
    }
    v
}

/// Sparsifies `μ = ‖(Tφ)(·)‖²` at separation `3m`, enlarges each cluster by
/// `m`, and returns the restriction of `φ` to the best enlarged cluster.
///
/// With `φ` omitted the top singular vector is used. The report carries the
/// measured proof chain and the diameter budget `f(3m) + 2m`.
pub fn localize_vector<T: Real>(
    space: &FiniteMetricSpace<T>,
    op: &FiberedOperator<T>,
    m: usize,
    sparsifier: &dyn Sparsifier<T>,
    phi: Option<&StateVector<T>>,
) -> Result<LocalizationReport<T>> {
    op.check_space(space)?;
    let prop = op.propagation(space)?.ok_or(Error::ZeroOperator)?;
    let mt: T = from_usize(m);
    if mt <= prop + prop {
        return Err(Error::SeparationTooSmall { m: m as f64, propagation: to_f64(&prop) });
    }
    let norm = operator_norm(op)?;
    if norm <= op.tau() {
        return Err(Error::ZeroOperator);
    }
    let phi = match phi {
        Some(p) if p.points() != op.points() || p.fiber_dim() != op.fiber_dim() => {
            return Err(Error::SpaceMismatch { expected: op.points() * op.fiber_dim(), found: p.data().len() })
        }
        Some(p) => p.clone(),
        None => top_singular_pair(op)?.1,
    };
    let phi_norm = phi.norm();
    if phi_norm <= T::zero() {
        return Err(Error::InvalidParameter("starting vector is zero".into()));
    }
    let psi = op.apply(&phi)?;
    let mu = Measure::new((0..op.points()).map(|x| psi.point_norm_sq(x)).collect())?;
    let omega = sparsifier.sparsify(space, &mu, 3 * m)?;
    let enlarged: Vec<Subset> = omega.clusters().iter().map(|c| space.neighborhood(c, &mt)).collect::<Result<_>>()?;

    let mut best: Option<(T, StateVector<T>)> = None;
    for u in &enlarged {
        let part = phi.restrict(u)?;
        let pn = part.norm();
        if pn <= T::zero() {
            continue;
        }
        let r = op.apply(&part)?.norm() / pn;
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, part));
        }
    }
    let (ratio, witness) = best.ok_or(Error::ZeroMass)?;

    let omega_prime = enlarged.iter().fold(Subset::empty(op.points()), |acc, u| acc.union(u));
    let chain = ProofChain {
        enlarged: op.apply(&phi.restrict(&omega_prime)?)?.norm_sq(),
        projected: psi.restrict(&omega.support())?.norm_sq(),
        cluster_mass: omega.mass(&mu),
        constant: sparsifier.constant(),
        total_mass: mu.total().clone(),
        start_ratio: psi.norm() / (norm * phi_norm),
    };
    let support = witness.support(op.tau());
    Ok(LocalizationReport {
        support_diameter: space.diameter(&support)?,
        support,
        witness,
        ratio: ratio / norm,
        norm,
        fiber_dim: op.fiber_dim(),
        mode: ReportMode::Sparsifier,
        params: LocalizationParams::Sparsifier {
            m,
            name: sparsifier.name(),
            constant: sparsifier.constant(),
            diameter_bound: sparsifier.diameter_bound(3 * m) + mt + mt,
        },
        chain: Some(chain),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpaEstimate<T> {
    /// Smallest localized ratio over the sample.
    pub value: T,
    pub worst_index: usize,
    pub worst_seed: Option<u64>,
    pub ratios: Vec<T>,
}

/// Minimum localized ratio over `trials` random band operators with seeds
/// `seed, seed+1, …`. An upper bound on the achievable constant.
pub fn opa_estimate<T: Real>(
    space: &FiniteMetricSpace<T>,
    r: &T,
    radius: &T,
    trials: usize,
    seed: u64,
    h: usize,
) -> Result<OpaEstimate<T>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let ratios = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let op = random_band_operator(space, r, h, seed.wrapping_add(t), T::one())?;
            localized_ratio(space, &op, radius).map(|rep| rep.ratio)
        })
        .collect::<Result<Vec<T>>>()?;
    let mut est = minimum(ratios);
    est.worst_seed = Some(seed.wrapping_add(est.worst_index as u64));
    Ok(est)
}

/// Minimum localized ratio over an explicit family.
pub fn opa_estimate_family<T: Real>(
    space: &FiniteMetricSpace<T>,
    ops: &[FiberedOperator<T>],
    radius: &T,
) -> Result<OpaEstimate<T>> {
    if ops.is_empty() {
        return Err(Error::InvalidParameter("operator family is empty".into()));
    }
    let ratios = ops
        .par_iter()
        .map(|op| localized_ratio(space, op, radius).map(|rep| rep.ratio))
        .collect::<Result<Vec<T>>>()?;
    Ok(minimum(ratios))
}

fn minimum<T: Real>(ratios: Vec<T>) -> OpaEstimate<T> {
    let mut worst = 0;
    for (i, r) in ratios.iter().enumerate() {
        if *r < ratios[worst] {
            worst = i;
        }
    }
    OpaEstimate { value: ratios[worst], worst_index: worst, worst_seed: None, ratios }
}
