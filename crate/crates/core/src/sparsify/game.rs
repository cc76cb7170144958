//! The sparsification game at fixed `(m, R)`:
//! `c*(X, m, R) = min_μ max_Ω μ(Ω)` over probability measures `μ` and
//! admissible sets `Ω`.
//!
//! Small spaces are solved exactly as a zero-sum game over the
//! inclusion-maximal admissible sets (mass is monotone in `Ω`, so the other
//! sets are dominated). Larger spaces use a double-oracle iteration: the
//! restricted game is solved exactly and grown by a branch-and-bound best
//! response until the certified lower and upper bounds meet.

use serde::Serialize;

use super::oracle::{best_response, maximal_admissible_sets};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::scalar::{cast, from_usize, to_f64, Scalar};
use crate::space::{FiniteMetricSpace, Measure, Subset};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum GameMode {
    Exact,
    Iterative { lower: f64, upper: f64, rounds: usize },
}

/// An admissible set with its mass under `μ*` and its weight in the
/// maximizing mixed strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet<S> {
    pub set: Subset,
    pub mass: S,
    pub weight: S,
}

#[derive(Debug, Clone)]
pub struct GameResult<S> {
    /// `c*`; in iterative mode the certified upper bound.
    pub value: S,
    /// Certified lower bound (equal to `value` in exact mode).
    pub lower: S,
    pub mu_star: Measure<S>,
    pub sets: Vec<WeightedSet<S>>,
    pub mode: GameMode,
    pub tolerance: f64,
}

/// Default point cap for the exact linear-programming solve.
pub const EXACT_GAME_CAP: usize = 14;
pub const ITERATIVE_TOLERANCE: f64 = 1e-4;
const MAX_ROUNDS: usize = 5_000;

/// Solves the sparsification game.
///
/// Spaces with at most `exact_cap` points are solved exactly. Among the
/// optimal adversarial measures the one maximizing its smallest weight is
/// returned, which makes `μ*` canonical on symmetric spaces.
pub fn game_value<S: Scalar>(space: &FiniteMetricSpace<S>, m: &S, radius: &S, exact_cap: usize) -> Result<GameResult<S>> {
    let n = space.len();
    if n <= exact_cap.min(20) {
        let sets = maximal_admissible_sets(space, m, radius, exact_cap)?;
        let (value, _): (S, _) = minimize_max_mass(n, &sets)?;
        let mu_star = match spread_optimal_measure(n, &sets, &value, S::zero()) {
            Err(Error::Infeasible) if !S::EXACT => spread_optimal_measure(n, &sets, &value, S::pivot_tolerance())?,
            other => other?,
        };
        let (lower, weights) = maximize_min_coverage(n, &sets)?;
        let sets = weigh(&sets, &mu_star, weights);
        let value = sets.iter().map(|s| s.mass.clone()).fold(S::zero(), S::max_of);
        return Ok(GameResult { value, lower, mu_star, sets, mode: GameMode::Exact, tolerance: to_f64(&S::tolerance()) });
    }
    double_oracle(space, m, radius)
}

fn incidence<S: Scalar>(n: usize, set: &Subset) -> Vec<S> {
    let mut row = vec![S::zero(); n];
    for x in set.iter() {
        row[x] = S::one();
    }
    row
}

/// `min_μ max_j μ(Ω_j)`; returns the value and an optimal `μ`.
fn minimize_max_mass<S: Scalar>(n: usize, sets: &[Subset]) -> Result<(S, Vec<S>)> {
    // variables: μ_0..μ_{n-1}, v
    let mut objective = vec![S::zero(); n + 1];
    objective[n] = -S::one();
    let mut lp = LinearProgram::maximize(objective);
    for set in sets {
        let mut row = incidence::<S>(n, set);
        row.push(-S::one());
        lp.constraint(row, Relation::Le, S::zero());
    }
    let mut sum = vec![S::one(); n];
    sum.push(S::zero());
    lp.constraint(sum, Relation::Eq, S::one());
    let sol = lp.solve()?;
    let value = sol.x[n].clone();
    Ok((value, sol.x[..n].to_vec()))
}

/// Among measures with `max_j μ(Ω_j) ≤ value + slack`, maximize `min_x μ(x)`.
fn spread_optimal_measure<S: Scalar>(n: usize, sets: &[Subset], value: &S, slack: S) -> Result<Measure<S>> {
    // variables: μ_0..μ_{n-1}, t
    let mut objective = vec![S::zero(); n + 1];
    objective[n] = S::one();
    let mut lp = LinearProgram::maximize(objective);
    let cap = value.clone() + slack;
    for set in sets {
        let mut row = incidence::<S>(n, set);
        row.push(S::zero());
        lp.constraint(row, Relation::Le, cap.clone());
    }
    let mut sum = vec![S::one(); n];
    sum.push(S::zero());
    lp.constraint(sum, Relation::Eq, S::one());
    for x in 0..n {
        let mut row = vec![S::zero(); n + 1];
        row[x] = -S::one();
        row[n] = S::one();
        lp.constraint(row, Relation::Le, S::zero());
    }
    let sol = lp.solve()?;
    Measure::new(sol.x[..n].iter().map(|w| w.clone().max_of(S::zero())).collect())
}

/// `max_q min_x Σ_{j ∋ x} q_j`; returns the value and the mixed strategy `q`.
fn maximize_min_coverage<S: Scalar>(n: usize, sets: &[Subset]) -> Result<(S, Vec<S>)> {
    let k = sets.len();
    // variables: q_0..q_{k-1}, w
    let mut objective = vec![S::zero(); k + 1];
    objective[k] = S::one();
    let mut lp = LinearProgram::maximize(objective);
    let flags: Vec<Vec<bool>> = sets.iter().map(Subset::indicator).collect();
    for x in 0..n {
        let mut row: Vec<S> = flags.iter().map(|f| if f[x] { -S::one() } else { S::zero() }).collect();
        row.push(S::one());
        lp.constraint(row, Relation::Le, S::zero());
    }
    let mut sum = vec![S::one(); k];
    sum.push(S::zero());
    lp.constraint(sum, Relation::Eq, S::one());
    let sol = lp.solve()?;
    Ok((sol.x[k].clone(), sol.x[..k].to_vec()))
}

fn weigh<S: Scalar>(sets: &[Subset], mu: &Measure<S>, weights: Vec<S>) -> Vec<WeightedSet<S>> {
    sets.iter()
        .zip(weights)
        .map(|(set, weight)| WeightedSet { set: set.clone(), mass: mu.mass_of(set), weight })
        .collect()
}

fn double_oracle<S: Scalar>(space: &FiniteMetricSpace<S>, m: &S, radius: &S) -> Result<GameResult<S>> {
    let n = space.len();
    let tol: S = if S::EXACT { S::zero() } else { cast(ITERATIVE_TOLERANCE) };
    let uniform = vec![S::one() / from_usize::<S>(n); n];
    let (first, _) = best_response(space, &uniform, m, radius)?;
    let mut sets = vec![first];
    let mut best: Option<(S, Vec<S>)> = None;
    let mut lower = S::zero();
    for round in 1..=MAX_ROUNDS {
        let (restricted_value, mu) = minimize_max_mass(n, &sets)?;
        lower = lower.max_of(restricted_value);
        let (response, upper) = best_response(space, &mu, m, radius)?;
        if best.as_ref().is_none_or(|(u, _)| upper < *u) {
            best = Some((upper.clone(), mu));
        }
        let (upper, mu) = best.clone().unwrap();
        let known = sets.contains(&response);
        if upper.clone() - lower.clone() <= tol || known {
            let mu_star = Measure::new(mu.into_iter().map(|w| w.max_of(S::zero())).collect())?;
            let (_, weights) = maximize_min_coverage(n, &sets)?;
            let sets = weigh(&sets, &mu_star, weights);
            let mode = GameMode::Iterative { lower: to_f64(&lower), upper: to_f64(&upper), rounds: round };
            return Ok(GameResult { value: upper, lower, mu_star, sets, mode, tolerance: ITERATIVE_TOLERANCE });
        }
        sets.push(response);
    }
    let upper = best.map_or(f64::NAN, |(u, _)| to_f64(&u));
    Err(Error::NoConvergence { lower: to_f64(&lower), upper })
}
