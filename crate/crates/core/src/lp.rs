//! Dense two-phase simplex over any [`Scalar`].
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems. With exact scalars the
//! optimum is exact.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `maximize c·x` subject to linear rows and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    num_vars: usize,
    objective: Vec<S>,
    rows: Vec<(Vec<S>, Relation, S)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub value: S,
}

const MAX_PIVOTS: usize = 200_000;

impl<S: Scalar> LinearProgram<S> {
    pub fn maximize(objective: Vec<S>) -> Self {
        Self { num_vars: objective.len(), objective, rows: Vec::new() }
    }

    pub fn constraint(&mut self, coeffs: Vec<S>, rel: Relation, rhs: S) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.rows.push((coeffs, rel, rhs));
        self
    }

    pub fn solve(&self) -> Result<LpSolution<S>> {
        let nv = self.num_vars;
        let m = self.rows.len();
        let mut rows: Vec<(Vec<S>, Relation, S)> = self.rows.clone();
        for (a, rel, b) in rows.iter_mut() {
            if *b < S::zero() {
                a.iter_mut().for_each(|v| *v = -v.clone());
                *b = -b.clone();
                *rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let width = nv + n_slack + n_art;
        let art_start = nv + n_slack;

        let mut t = Tableau {
            a: Vec::with_capacity(m),
            obj: vec![S::zero(); width + 1],
            basis: Vec::with_capacity(m),
            banned: vec![false; width],
            width,
        };
        let (mut si, mut ai) = (nv, art_start);
        for (coeffs, rel, rhs) in &rows {
            let mut row = coeffs.clone();
            row.resize(width + 1, S::zero());
            row[width] = rhs.clone();
            match rel {
                Relation::Le => {
                    row[si] = S::one();
                    t.basis.push(si);
                    si += 1;
                }
                Relation::Ge => {
                    row[si] = -S::one();
                    row[ai] = S::one();
                    t.basis.push(ai);
                    si += 1;
                    ai += 1;
                }
                Relation::Eq => {
                    row[ai] = S::one();
                    t.basis.push(ai);
                    ai += 1;
                }
            }
            t.a.push(row);
        }

        if n_art > 0 {
            for j in art_start..width {
                t.obj[j] = S::one();
            }
            t.canonicalize();
            t.run()?;
            if t.obj[width] < -S::pivot_tolerance() {
                return Err(Error::Infeasible);
            }
            t.drive_out_artificials(art_start);
            for j in art_start..width {
                t.banned[j] = true;
            }
        }

        t.obj = vec![S::zero(); width + 1];
        for (j, c) in self.objective.iter().enumerate() {
            t.obj[j] = -c.clone();
        }
        t.canonicalize();
        t.run()?;

        let mut x = vec![S::zero(); nv];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < nv {
                x[b] = t.a[i][width].clone();
            }
        }
        let value = x
            .iter()
            .zip(&self.objective)
            .fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        Ok(LpSolution { x, value })
    }
}

struct Tableau<S> {
    a: Vec<Vec<S>>,
    /// Row `z + Σ d_j x_j = v`; the last entry is `v`.
    obj: Vec<S>,
    basis: Vec<usize>,
    banned: Vec<bool>,
    width: usize,
}

impl<S: Scalar> Tableau<S> {
    fn canonicalize(&mut self) {
        for i in 0..self.a.len() {
            let d = self.obj[self.basis[i]].clone();
            if d != S::zero() {
                for j in 0..=self.width {
                    let v = self.obj[j].clone() - d.clone() * self.a[i][j].clone();
                    self.obj[j] = v;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c] == S::zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                if *pr != S::zero() {
                    *v = v.clone() - f.clone() * pr.clone();
                }
            }
        }
        let f = self.obj[c].clone();
        if f != S::zero() {
            for (v, pr) in self.obj.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pr.clone();
            }
        }
        self.basis[r] = c;
    }

    fn run(&mut self) -> Result<()> {
        let tol = S::pivot_tolerance();
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.width).find(|&j| !self.banned[j] && self.obj[j] < -tol.clone()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.a.len() {
                let aic = &self.a[i][c];
                if *aic > tol {
                    let ratio = self.a[i][self.width].clone() / aic.clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(Error::NoConvergence { lower: f64::NAN, upper: f64::NAN })
    }

    fn drive_out_artificials(&mut self, art_start: usize) {
        let tol = S::pivot_tolerance();
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= art_start {
                match (0..art_start).find(|&j| self.a[i][j].abs_val() > tol) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
