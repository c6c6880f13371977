//! Dense two-phase tableau simplex over any [`LpScalar`].
//!
//! Entering variables are chosen by largest reduced cost (lowest index on
//! ties). After a run of degenerate pivots the solver switches to Bland's
//! lowest-index rule until the objective moves again, which rules out
//! cycling. Ratio-test ties always go to the lowest basic variable index.

use crate::error::{Error, Result};
use crate::scalar::LpScalar;

/// Consecutive degenerate pivots tolerated before Bland's rule takes over.
pub const DEGENERATE_LIMIT: usize = 50;
const MAX_PIVOTS: usize = 1_000_000;
/// Inexact tableaux are rebuilt from the original rows this often.
const REINVERT_EVERY: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Le,
}

#[derive(Clone, Debug)]
pub struct LpRow<S> {
    pub coeffs: Vec<S>,
    pub kind: RowKind,
    pub rhs: S,
}

/// `max c·x` subject to the rows and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem<S> {
    pub objective: Vec<S>,
    pub rows: Vec<LpRow<S>>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub value: S,
    pub x: Vec<S>,
    /// Row prices `π` with `c_j - π·A_j <= 0` at optimality; `π_i >= 0` on
    /// `Le` rows.
    pub duals: Vec<S>,
    pub pivots: usize,
    pub bland_pivots: usize,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    rows0: Vec<Vec<S>>,
    rhs0: Vec<S>,
    objective: Vec<S>,
    basis: Vec<usize>,
    /// Reduced costs `d_j`.
    cost: Vec<S>,
    value: S,
    /// Columns `first_art..` are artificial.
    first_art: usize,
    pivots: usize,
    bland_pivots: usize,
}

impl<S: LpScalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let mut prow = std::mem::take(&mut self.rows[r]);
        for v in prow.iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        prow[c] = S::one();
        let prhs = self.rhs[r].clone() / p;
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * prow[j].clone();
                row[j].snap();
            }
            row[c] = S::zero();
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
            self.rhs[i].snap();
        }
        let f = self.cost[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.cost[j] = self.cost[j].clone() - f.clone() * prow[j].clone();
                self.cost[j].snap();
            }
            self.cost[c] = S::zero();
            self.value = self.value.clone() + f * prhs.clone();
        }
        self.rows[r] = prow;
        self.rhs[r] = prhs;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Recomputes the tableau for the current basis from the original rows
    /// by Gauss-Jordan elimination with partial pivoting.
    fn reinvert(&mut self) -> Result<()> {
        let (pivots, basis) = (self.pivots, self.basis.clone());
        self.rows = self.rows0.clone();
        self.rhs = self.rhs0.clone();
        let mut assigned = vec![false; self.rows.len()];
        let mut placed = vec![];
        for &b in &basis {
            let r = (0..self.rows.len())
                .filter(|&i| !assigned[i])
                .max_by(|&i, &j| self.rows[i][b].abs_val().partial_cmp(&self.rows[j][b].abs_val()).unwrap_or(std::cmp::Ordering::Equal))
                .filter(|&i| !self.rows[i][b].is_zero_tol())
                .ok_or_else(|| Error::Solver("basis became singular".into()))?;
            assigned[r] = true;
            placed.push((r, b));
            self.pivot(r, b);
        }
        for (r, b) in placed {
            self.basis[r] = b;
        }
        self.pivots = pivots;
        let c = self.objective.clone();
        self.set_costs(&c);
        Ok(())
    }

    /// Minimum ratio, ties to the lowest basic variable index.
    fn ratio_test_exact(&self, c: usize) -> Option<(usize, S)> {
        let mut leave: Option<(usize, S)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if a.is_positive_tol() {
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        leave
    }

    /// Two-pass ratio test: among rows whose ratio is within the feasibility
    /// tolerance of the minimum, the largest pivot element wins.
    fn ratio_test_harris(&self, c: usize) -> Option<(usize, S)> {
        let tol = S::tolerance();
        let mut bound: Option<S> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if a.is_positive_tol() {
                let r = (self.rhs[i].clone() + tol.clone()) / a.clone();
                if bound.as_ref().is_none_or(|b| r < *b) {
                    bound = Some(r);
                }
            }
        }
        let bound = bound?;
        let mut leave: Option<(usize, S)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][c];
            if a.is_positive_tol() {
                let ratio = self.rhs[i].clone() / a.clone();
                if ratio <= bound && leave.as_ref().is_none_or(|(li, _)| *a > self.rows[*li][c]) {
                    leave = Some((i, ratio));
                }
            }
        }
        leave
    }

    /// Runs pivots to optimality. `Err` on unboundedness.
    fn optimize(&mut self) -> Result<()> {
        let mut degenerate_run = 0usize;
        let mut since_reinvert = 0usize;
        let mut fresh = S::is_exact();
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver("simplex pivot limit reached".into()));
            }
            if !S::is_exact() && since_reinvert >= REINVERT_EVERY {
                self.reinvert()?;
                since_reinvert = 0;
                fresh = true;
            }
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let mut enter = None;
            let mut best = S::zero();
            for j in 0..self.first_art {
                let d = &self.cost[j];
                if d.is_positive_tol() {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if enter.is_none() || *d > best {
                        best = d.clone();
                        enter = Some(j);
                    }
                }
            }
            let Some(c) = enter else {
                if fresh {
                    return Ok(());
                }
                since_reinvert = REINVERT_EVERY;
                continue;
            };
            let leave = if S::is_exact() { self.ratio_test_exact(c) } else { self.ratio_test_harris(c) };
            let Some((r, ratio)) = leave else {
                if fresh {
                    return Err(Error::Solver("linear program is unbounded".into()));
                }
                since_reinvert = REINVERT_EVERY;
                continue;
            };
            if ratio.is_zero_tol() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if bland {
                self.bland_pivots += 1;
            }
            self.pivot(r, c);
            since_reinvert += 1;
            fresh = S::is_exact();
        }
    }

    fn set_costs(&mut self, c: &[S]) {
        self.objective = c.to_vec();
        let ncol = self.cost.len();
        self.cost = (0..ncol).map(|j| c[j].clone()).collect();
        self.value = S::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..ncol {
                self.cost[j] = self.cost[j].clone() - cb.clone() * self.rows[i][j].clone();
            }
            self.value = self.value.clone() + cb * self.rhs[i].clone();
        }
    }
}

pub fn solve_lp<S: LpScalar>(p: &LpProblem<S>) -> Result<LpSolution<S>> {
    let n = p.objective.len();
    let m = p.rows.len();
    let n_slack = p.rows.iter().filter(|r| r.kind == RowKind::Le).count();
    let first_art = n + n_slack;
    let ncol = first_art + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    let mut slack = n;
    for (i, r) in p.rows.iter().enumerate() {
        if r.coeffs.len() != n {
            return Err(Error::Shape(format!("row {i} has {} coefficients, expected {n}", r.coeffs.len())));
        }
        let neg = r.rhs.is_negative_tol();
        let flip = |v: S| if neg { -v } else { v };
        let mut row: Vec<S> = r.coeffs.iter().cloned().map(flip).collect();
        row.resize(ncol, S::zero());
        if r.kind == RowKind::Le {
            row[slack] = flip(S::one());
            slack += 1;
        }
        row[first_art + i] = S::one();
        rows.push(row);
        rhs.push(flip(r.rhs.clone()));
        signs.push(neg);
    }
    let mut t = Tableau {
        rows0: rows.clone(),
        rhs0: rhs.clone(),
        objective: vec![],
        rows,
        rhs,
        basis: (first_art..ncol).collect(),
        cost: vec![S::zero(); ncol],
        value: S::zero(),
        first_art,
        pivots: 0,
        bland_pivots: 0,
    };

    // Phase 1: maximize -Σ artificials.
    let mut c1 = vec![S::zero(); ncol];
    for c in c1.iter_mut().skip(first_art) {
        *c = -S::one();
    }
    t.set_costs(&c1);
    t.optimize()?;
    if t.value.is_negative_tol() {
        return Err(Error::Solver("linear program is infeasible".into()));
    }
    for i in 0..m {
        if t.basis[i] >= first_art {
            if let Some(j) = (0..first_art).find(|&j| !t.rows[i][j].is_zero_tol()) {
                t.pivot(i, j);
            }
        }
    }

    // Phase 2.
    let mut c2 = vec![S::zero(); ncol];
    c2[..n].clone_from_slice(&p.objective);
    t.set_costs(&c2);
    t.optimize()?;

    let mut x = vec![S::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    let duals = (0..m)
        .map(|i| {
            let pi = -t.cost[first_art + i].clone();
            if signs[i] {
                -pi
            } else {
                pi
            }
        })
        .collect();
    Ok(LpSolution { value: t.value.clone(), x, duals, pivots: t.pivots, bland_pivots: t.bland_pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn row<S: LpScalar>(c: &[i64], kind: RowKind, rhs: i64) -> LpRow<S> {
        LpRow { coeffs: c.iter().map(|&v| S::from_i64(v)).collect(), kind, rhs: S::from_i64(rhs) }
    }

    fn textbook<S: LpScalar>() -> LpProblem<S> {
        // max 3x + 5y: x <= 4, 2y <= 12, 3x + 2y <= 18
        LpProblem {
            objective: vec![S::from_i64(3), S::from_i64(5)],
            rows: vec![row(&[1, 0], RowKind::Le, 4), row(&[0, 2], RowKind::Le, 12), row(&[3, 2], RowKind::Le, 18)],
        }
    }

    #[test]
    fn textbook_exact_and_float() {
        let s = solve_lp(&textbook::<BigRational>()).unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
        assert_eq!(s.duals, vec![q(0, 1), q(3, 2), q(1, 1)]);
        let f = solve_lp(&textbook::<f64>()).unwrap();
        assert!((f.value - 36.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // max -x - y: x + y = 2, x - y <= -1  → x = 1/2, y = 3/2
        let p = LpProblem::<BigRational> {
            objective: vec![BigRational::from_i64(-1), BigRational::from_i64(-1)],
            rows: vec![row(&[1, 1], RowKind::Eq, 2), row(&[1, -1], RowKind::Le, -1)],
        };
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.value, q(-2, 1));
        // duals satisfy π·A_j >= c_j
        for j in 0..2 {
            let lhs = s.duals[0].clone() * BigRational::from_i64(1)
                + s.duals[1].clone() * BigRational::from_i64(if j == 0 { 1 } else { -1 });
            assert!(lhs >= p.objective[j]);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem::<f64> { objective: vec![1.0], rows: vec![row(&[1], RowKind::Eq, -1)] };
        assert!(solve_lp(&p).is_err());
        let p = LpProblem::<f64> { objective: vec![1.0, 0.0], rows: vec![row(&[0, 1], RowKind::Le, 1)] };
        assert!(solve_lp(&p).is_err());
    }

    /// Beale's cycling example terminates.
    #[test]
    fn beale_does_not_cycle() {
        let p = LpProblem::<BigRational> {
            objective: vec![q(3, 4), q(-20, 1), q(1, 2), q(-6, 1)],
            rows: vec![
                LpRow { coeffs: vec![q(1, 4), q(-8, 1), q(-1, 1), q(9, 1)], kind: RowKind::Le, rhs: q(0, 1) },
                LpRow { coeffs: vec![q(1, 2), q(-12, 1), q(-1, 2), q(3, 1)], kind: RowKind::Le, rhs: q(0, 1) },
                LpRow { coeffs: vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)], kind: RowKind::Le, rhs: q(1, 1) },
            ],
        };
        assert_eq!(solve_lp(&p).unwrap().value, q(5, 4));
    }
}
