//! Dense infeasible primal-dual interior-point method for one semidefinite
//! block plus a nonnegative orthant.
//!
//! Primal: `min <C,X> + c·x` subject to `<A_i,X> + a_i·x = b_i`, `X ⪰ 0`,
//! `x >= 0`. Dual: `max b·y` subject to `S = C - Σ y_i A_i ⪰ 0`,
//! `s = c - Σ y_i a_i >= 0`. Search directions are HKM with Mehrotra
//! predictor-corrector steps.

use nalgebra::{Cholesky, DMatrix, DVector, LU};

use crate::error::{Error, Result};
use crate::linalg::{frob, max_psd_step, symmetrize};
use crate::scalar::{lit, Real};

/// Sparse symmetric matrix as `(row, col, value)` with `row <= col`; an
/// off-diagonal entry stands for both `(row, col)` and `(col, row)`.
#[derive(Clone, Debug, Default)]
pub struct SymSparse<T> {
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Real> SymSparse<T> {
    pub fn new() -> Self {
        SymSparse { entries: Vec::new() }
    }

    pub fn push(&mut self, r: usize, c: usize, v: T) {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        self.entries.push((r, c, v));
    }

    /// Directed entries `(a, b, v)` of the full matrix.
    fn directed(&self) -> Vec<(usize, usize, T)> {
        let mut d = Vec::with_capacity(2 * self.entries.len());
        for &(r, c, v) in &self.entries {
            d.push((r, c, v));
            if r != c {
                d.push((c, r, v));
            }
        }
        d
    }

    pub fn inner(&self, x: &DMatrix<T>) -> T {
        self.entries.iter().fold(T::zero(), |s, &(r, c, v)| {
            if r == c {
                s + v * x[(r, c)]
            } else {
                s + v * (x[(r, c)] + x[(c, r)])
            }
        })
    }

    pub fn add_to(&self, m: &mut DMatrix<T>, scale: T) {
        for &(r, c, v) in &self.entries {
            m[(r, c)] += scale * v;
            if r != c {
                m[(c, r)] += scale * v;
            }
        }
    }

    fn frob_sq(&self) -> T {
        self.entries.iter().fold(T::zero(), |s, &(r, c, v)| s + v * v * if r == c { T::one() } else { lit(2.0) })
    }
}

/// One equality constraint.
#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub mat: SymSparse<T>,
    /// Coefficients on the orthant variables.
    pub lin: Vec<(usize, T)>,
    pub rhs: T,
}

#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    pub n: usize,
    pub c: DMatrix<T>,
    pub n_lin: usize,
    pub c_lin: DVector<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SdpOptions<T> {
    fn default() -> Self {
        SdpOptions { tol: lit(1e-7), max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Converged,
    MaxIterations,
    /// A factorization failed; the last iterate is returned.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub x: DMatrix<T>,
    pub x_lin: DVector<T>,
    pub y: DVector<T>,
    pub s: DMatrix<T>,
    pub s_lin: DVector<T>,
    pub primal: T,
    pub dual: T,
    pub rel_gap: T,
    pub primal_infeas: T,
    pub dual_infeas: T,
    pub iterations: usize,
    pub status: SdpStatus,
}

struct Direction<T> {
    dx: DMatrix<T>,
    dy: DVector<T>,
    ds: DMatrix<T>,
    dxl: DVector<T>,
    dsl: DVector<T>,
}

impl<T: Real> SdpProblem<T> {
    fn a_op(&self, x: &DMatrix<T>, xl: &DVector<T>) -> DVector<T> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints.iter().map(|c| c.mat.inner(x) + c.lin.iter().fold(T::zero(), |s, &(j, v)| s + v * xl[j])),
        )
    }

    fn at_op(&self, y: &DVector<T>) -> (DMatrix<T>, DVector<T>) {
        let mut m = DMatrix::zeros(self.n, self.n);
        let mut l = DVector::zeros(self.n_lin);
        for (c, &yi) in self.constraints.iter().zip(y.iter()) {
            c.mat.add_to(&mut m, yi);
            for &(j, v) in &c.lin {
                l[j] += yi * v;
            }
        }
        (m, l)
    }

    fn rhs(&self) -> DVector<T> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|c| c.rhs))
    }
}

/// Solves `p` from the standard infeasible starting point.
pub fn solve_sdp<T: Real>(p: &SdpProblem<T>, opts: SdpOptions<T>) -> Result<SdpSolution<T>> {
    let n = p.n;
    let m = p.constraints.len();
    let nl = p.n_lin;
    if p.c.nrows() != n || p.c.ncols() != n || p.c_lin.len() != nl {
        return Err(Error::Shape("objective dimensions".into()));
    }
    let nt: T = lit((n + nl) as f64);
    let b = p.rhs();
    let b_norm = b.norm();
    let c_norm = (p.c.norm_squared() + p.c_lin.norm_squared()).sqrt();

    let sqrt_n = lit::<T>((n.max(1)) as f64).sqrt();
    let mut zeta = lit::<T>(10.0).max(sqrt_n);
    let mut eta = lit::<T>(10.0).max(sqrt_n).max(c_norm);
    for c in &p.constraints {
        let an = (c.mat.frob_sq() + c.lin.iter().fold(T::zero(), |s, &(_, v)| s + v * v)).sqrt();
        zeta = zeta.max(lit::<T>(n.max(1) as f64) * (T::one() + c.rhs.abs()) / (T::one() + an));
        eta = eta.max(an);
    }
    let mut x = DMatrix::<T>::identity(n, n) * zeta;
    let mut s = DMatrix::<T>::identity(n, n) * eta;
    let mut xl = DVector::<T>::from_element(nl, zeta);
    let mut sl = DVector::<T>::from_element(nl, eta);
    let mut y = DVector::<T>::zeros(m);

    let dir_a: Vec<Vec<(usize, usize, T)>> = p.constraints.iter().map(|c| c.mat.directed()).collect();
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;

    let (mut pinf, mut dinf, mut gap, mut pobj, mut dobj);
    loop {
        let ax = p.a_op(&x, &xl);
        let rp = &b - &ax;
        let (aty, atyl) = p.at_op(&y);
        let rd = &p.c - &aty - &s;
        let rdl = &p.c_lin - &atyl - &sl;
        pobj = frob(&p.c, &x) + p.c_lin.dot(&xl);
        dobj = b.dot(&y);
        pinf = rp.norm() / (T::one() + b_norm);
        dinf = (rd.norm_squared() + rdl.norm_squared()).sqrt() / (T::one() + c_norm);
        gap = (pobj - dobj).abs() / (T::one() + pobj.abs() + dobj.abs());
        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
            status = SdpStatus::Converged;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let Some(chol_s) = Cholesky::new(symmetrize(&s)) else {
            status = SdpStatus::Stalled;
            break;
        };
        let w = symmetrize(&chol_s.inverse());
        let Some(chol_x) = Cholesky::new(symmetrize(&x)) else {
            status = SdpStatus::Stalled;
            break;
        };
        let mu = (frob(&x, &s) + xl.dot(&sl)) / nt;
        let ratio_l: DVector<T> = xl.component_div(&sl);

        // Schur complement M_ij = <A_i, X A_j W> + Σ a_i a_j x/s.
        let mut schur = DMatrix::<T>::zeros(m, m);
        let mut g = DMatrix::<T>::zeros(n, n);
        for j in 0..m {
            g.fill(T::zero());
            for &(c, d, v) in &dir_a[j] {
                // X e_c e_d^T W = X[:,c] W[d,:]
                for col in 0..n {
                    let wdc = v * w[(d, col)];
                    if wdc == T::zero() {
                        continue;
                    }
                    for row in 0..n {
                        g[(row, col)] += x[(row, c)] * wdc;
                    }
                }
            }
            for i in 0..m {
                let mut acc = T::zero();
                for &(a, bb, v) in &dir_a[i] {
                    acc += v * g[(a, bb)];
                }
                schur[(i, j)] = acc;
            }
        }
        schur = symmetrize(&schur);
        if nl > 0 {
            for i in 0..m {
                for &(k, vi) in &p.constraints[i].lin {
                    for j in 0..m {
                        for &(k2, vj) in &p.constraints[j].lin {
                            if k == k2 {
                                schur[(i, j)] += vi * vj * ratio_l[k];
                            }
                        }
                    }
                }
            }
        }
        let chol_m = Cholesky::new(schur.clone());
        let lu_m = if chol_m.is_none() { Some(LU::new(schur.clone())) } else { None };
        let solve_m = |r: &DVector<T>| -> Option<DVector<T>> {
            match (&chol_m, &lu_m) {
                (Some(c), _) => Some(c.solve(r)),
                (None, Some(lu)) => lu.solve(r),
                _ => None,
            }
        };

        let direction = |sigma_mu: T, corr: Option<&Direction<T>>| -> Option<Direction<T>> {
            // Rc' = (σμ I - dXa dSa) W - X, linear part analogous.
            let mut target = DMatrix::<T>::identity(n, n) * sigma_mu;
            if let Some(d) = corr {
                target -= &d.dx * &d.ds;
            }
            let rc = &target * &w - &x;
            let mut rcl = DVector::<T>::from_element(nl, sigma_mu);
            if let Some(d) = corr {
                rcl -= d.dxl.component_mul(&d.dsl);
            }
            let rcl = rcl.component_div(&sl) - &xl;
            let xrdw = &x * &rd * &w;
            let inner = &rc - &xrdw;
            let inner_l = &rcl - ratio_l.component_mul(&rdl);
            let rhs = &rp - p.a_op(&inner, &inner_l);
            let dy = solve_m(&rhs)?;
            let (atdy, atdyl) = p.at_op(&dy);
            let ds = &rd - &atdy;
            let dsl = &rdl - &atdyl;
            let dx = symmetrize(&(&rc - &x * &ds * &w));
            let dxl = &rcl - ratio_l.component_mul(&dsl);
            Some(Direction { dx, dy, ds, dxl, dsl })
        };

        let steps = |d: &Direction<T>| -> Option<(T, T)> {
            let mut ap = max_psd_step(&chol_x, &d.dx).unwrap_or(T::max_value()?);
            let mut ad = max_psd_step(&chol_s, &d.ds).unwrap_or(T::max_value()?);
            for k in 0..nl {
                if d.dxl[k] < T::zero() {
                    ap = ap.min(-xl[k] / d.dxl[k]);
                }
                if d.dsl[k] < T::zero() {
                    ad = ad.min(-sl[k] / d.dsl[k]);
                }
            }
            Some((ap, ad))
        };

        let Some(pred) = direction(T::zero(), None) else {
            status = SdpStatus::Stalled;
            break;
        };
        let Some((ap, ad)) = steps(&pred) else {
            status = SdpStatus::Stalled;
            break;
        };
        let (ap, ad) = (ap.min(T::one()), ad.min(T::one()));
        let xa = &x + &pred.dx * ap;
        let sa = &s + &pred.ds * ad;
        let mu_aff = (frob(&xa, &sa) + (&xl + &pred.dxl * ap).dot(&(&sl + &pred.dsl * ad))) / nt;
        let sigma = (mu_aff / mu).max(T::zero()).min(T::one()).powi(3);

        let Some(corr) = direction(sigma * mu, Some(&pred)) else {
            status = SdpStatus::Stalled;
            break;
        };
        let Some((ap, ad)) = steps(&corr) else {
            status = SdpStatus::Stalled;
            break;
        };
        let gamma: T = lit(0.95);
        let ap = (gamma * ap).min(T::one());
        let ad = (gamma * ad).min(T::one());
        x = symmetrize(&(&x + &corr.dx * ap));
        xl += &corr.dxl * ap;
        y += &corr.dy * ad;
        s = symmetrize(&(&s + &corr.ds * ad));
        sl += &corr.dsl * ad;
    }
    Ok(SdpSolution {
        x,
        x_lin: xl,
        y,
        s,
        s_lin: sl,
        primal: pobj,
        dual: dobj,
        rel_gap: gap,
        primal_infeas: pinf,
        dual_infeas: dinf,
        iterations,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min <C,X> s.t. tr X = 1 gives the least eigenvalue of C.
    #[test]
    fn least_eigenvalue_problem() {
        let c = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0]);
        let mut tr = SymSparse::new();
        for i in 0..3 {
            tr.push(i, i, 1.0);
        }
        let p = SdpProblem {
            n: 3,
            c,
            n_lin: 0,
            c_lin: DVector::zeros(0),
            constraints: vec![Constraint { mat: tr, lin: vec![], rhs: 1.0 }],
        };
        let sol = solve_sdp(&p, SdpOptions::<f64>::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Converged);
        assert!((sol.primal - 1.0).abs() < 1e-6, "{}", sol.primal);
    }

    /// Linear block only: min x0 + 2 x1 s.t. x0 + x1 = 1.
    #[test]
    fn orthant_block() {
        let p = SdpProblem {
            n: 1,
            c: DMatrix::zeros(1, 1),
            n_lin: 2,
            c_lin: DVector::from_vec(vec![1.0, 2.0]),
            constraints: vec![
                Constraint { mat: SymSparse::new(), lin: vec![(0, 1.0), (1, 1.0)], rhs: 1.0 },
                Constraint { mat: { let mut a = SymSparse::new(); a.push(0, 0, 1.0); a }, lin: vec![], rhs: 0.5 },
            ],
        };
        let sol = solve_sdp(&p, SdpOptions::<f64>::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Converged);
        assert!((sol.primal - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_precision() {
        let mut tr = SymSparse::new();
        tr.push(0, 0, 1.0f32);
        tr.push(1, 1, 1.0f32);
        let p = SdpProblem {
            n: 2,
            c: DMatrix::from_row_slice(2, 2, &[1.0f32, 0.0, 0.0, 3.0]),
            n_lin: 0,
            c_lin: DVector::zeros(0),
            constraints: vec![Constraint { mat: tr, lin: vec![], rhs: 1.0 }],
        };
        let sol = solve_sdp(&p, SdpOptions { tol: 1e-4, max_iter: 100 }).unwrap();
        assert!((sol.primal - 1.0).abs() < 1e-3);
    }
}
