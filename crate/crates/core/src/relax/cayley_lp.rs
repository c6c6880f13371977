//! `θ`/`θ+` of a Cayley graph over `Z_2^m` as a linear program.
//!
//! Averaging a feasible `Z` over XOR translations keeps it feasible, so one
//! may assume `Z(u, v) = z(u ⊕ v)`. Such a matrix is PSD exactly when its
//! Walsh spectrum `ẑ(χ) = Σ_s (-1)^{χ·s} z(s)` is nonnegative. Writing
//! `z(s) = -1 + w(s)` off the identity, with `w` supported on the connection
//! set `S`, the program becomes
//!
//! `min z(0) + 1` s.t. `z(0) + Σ_{s∈S} (-1)^{χ·s} w(s) >= 2^m [χ=0] - 1`,
//!
//! with `w` free for `θ` and `w >= 0` for `θ+`. The simplex runs on its dual
//! `max Σ_χ (2^m [χ=0] - 1) y_χ` over `y >= 0`, `Σ y = 1`,
//! `Σ_χ (-1)^{χ·s} y_χ = 0` (`<= 0` for `θ+`), and `(z(0), w)` are read off
//! the row prices.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::simplex::{solve_lp, LpProblem, LpRow, RowKind};
use super::walsh::{character, fwht};
use super::{CertMethod, InvariantZ, Residuals, ThetaCertificate, ThetaVariant};
use crate::error::{Error, Result};
use crate::graphs::{even_weight, make_hk, CayleyZ2};
use crate::linalg::min_eigenvalue;
use crate::scalar::LpScalar;

/// Largest group exponent accepted by the LP.
pub const MAX_LP_EXPONENT: u32 = 20;
/// Dense `Z` is attached to certificates up to this many vertices.
pub const DENSE_Z_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug)]
pub struct CayleyLpOptions {
    pub tol: f64,
    /// Solve over exact rationals when `m` is at most this value.
    pub exact_up_to: u32,
}

impl Default for CayleyLpOptions {
    fn default() -> Self {
        CayleyLpOptions { tol: 1e-7, exact_up_to: 6 }
    }
}

/// LP data and solution for one Cayley graph.
#[derive(Clone, Debug)]
pub struct CayleyThetaLp {
    pub m: u32,
    pub conn: Vec<u64>,
    pub variant: ThetaVariant,
    /// Optimal `y` of the spectral program (a lower-bound witness).
    pub y: Vec<f64>,
    pub pivots: usize,
    pub bland_pivots: usize,
    pub exact: bool,
    pub certificate: ThetaCertificate,
}

fn build<S: LpScalar>(c: &CayleyZ2, variant: ThetaVariant) -> LpProblem<S> {
    let n = c.order();
    let mut objective = vec![S::from_i64(-1); n];
    objective[0] = S::from_i64(n as i64 - 1);
    let mut rows = Vec::with_capacity(c.degree() + 1);
    rows.push(LpRow { coeffs: vec![S::one(); n], kind: RowKind::Eq, rhs: S::one() });
    let kind = match variant {
        ThetaVariant::Theta => RowKind::Eq,
        ThetaVariant::ThetaPlus => RowKind::Le,
    };
    for &s in c.conn() {
        let coeffs = (0..n as u64).map(|chi| S::from_i64(character(chi, s))).collect();
        rows.push(LpRow { coeffs, kind, rhs: S::zero() });
    }
    LpProblem { objective, rows }
}

/// Full invariant vector from the row prices: `z(0) = π_0`,
/// `z(s) = π_s - 1` on the connection set and `-1` elsewhere.
fn z_from_duals<S: LpScalar>(c: &CayleyZ2, duals: &[S], variant: ThetaVariant) -> Vec<S> {
    let mut z = vec![S::from_i64(-1); c.order()];
    z[0] = duals[0].clone();
    for (k, &s) in c.conn().iter().enumerate() {
        let mut w = duals[k + 1].clone();
        if variant == ThetaVariant::ThetaPlus && w < S::zero() {
            w = S::zero();
        }
        z[s as usize] = w - S::one();
    }
    z
}

fn rational_string(q: &BigRational) -> String {
    if q.denom() == &1.into() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

type Solved = (Vec<f64>, Vec<f64>, f64, Option<BigRational>, Option<Vec<String>>);

/// Raises `z(0)` by the spectral deficit and converts the exact solution.
fn finish_exact(mut z: Vec<BigRational>, y: &[BigRational], value: &BigRational) -> Solved {
    let mut spec = z.clone();
    fwht(&mut spec);
    let deficit = spec.iter().filter(|v| v.is_negative()).map(|v| -v.clone()).max();
    if let Some(d) = deficit {
        z[0] = z[0].clone() + d;
    }
    let lambda = z[0].clone() + BigRational::from_i64(1);
    let primal = ToPrimitive::to_f64(&(value.clone() + BigRational::from_i64(1))).unwrap_or(f64::NAN);
    let zf: Vec<f64> = z.iter().map(|v| ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect();
    let y = y.iter().map(|v| ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect();
    (zf, y, primal, Some(lambda), Some(z.iter().map(rational_string).collect()))
}

fn finish_float(mut z: Vec<f64>, y: Vec<f64>, value: f64) -> Solved {
    let mut spec = z.clone();
    fwht(&mut spec);
    let deficit = spec.iter().copied().fold(0.0f64, |a, v| a.max(-v));
    z[0] += deficit;
    (z, y, value + 1.0, None, None)
}

pub fn theta_cayley_lp(c: &CayleyZ2, variant: ThetaVariant, opts: CayleyLpOptions) -> Result<CayleyThetaLp> {
    if c.m() > MAX_LP_EXPONENT {
        return Err(Error::TooLarge(format!("Z_2^{} exceeds the LP limit", c.m())));
    }
    let exact = c.m() <= opts.exact_up_to;
    let (solved, pivots, bland) = if exact {
        let sol = solve_lp(&build::<BigRational>(c, variant))?;
        let z = z_from_duals(c, &sol.duals, variant);
        (finish_exact(z, &sol.x, &sol.value), sol.pivots, sol.bland_pivots)
    } else {
        let sol = solve_lp(&build::<f64>(c, variant))?;
        let z = z_from_duals(c, &sol.duals, variant);
        (finish_float(z, sol.x, sol.value), sol.pivots, sol.bland_pivots)
    };
    package(c, variant, opts, solved, exact, pivots, bland)
}

/// Partition of `Z_2^m` into classes on which `z` is held constant, and of
/// the characters into classes on which the spectral weights are.
///
/// The reduction is sound when `Σ_{χ∈D} χ(s)` is constant over `s` in each
/// class and `Σ_{s∈C} χ(s)` is constant over `χ` in each character class;
/// [`theta_cayley_lp_reduced`] checks both. The orbits of any group of
/// linear automorphisms preserving the connection set qualify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub m: u32,
    pub classes: Vec<usize>,
    pub dual: Vec<usize>,
}

impl OrbitPartition {
    /// Orbits of coordinate permutations on `H_k`: vertices by the weight of
    /// their even-weight completion, characters by `min(w, k − w)` for the
    /// weight `w` of the character read as a `k`-bit string ending in `0`.
    pub fn hk(k: usize) -> Result<OrbitPartition> {
        let c = make_hk(k)?;
        let classes = (0..c.order() as u64).map(|x| even_weight(x) / 2).collect();
        let dual = (0..c.order() as u64)
            .map(|x| {
                let w = x.count_ones() as usize;
                w.min(k - w)
            })
            .collect();
        Ok(OrbitPartition { m: c.m(), classes, dual })
    }

    /// Product partition for the strong product, the first factor in the
    /// high bits.
    pub fn product(&self, other: &OrbitPartition) -> OrbitPartition {
        let kc = other.classes.iter().max().map_or(1, |&x| x + 1);
        let kd = other.dual.iter().max().map_or(1, |&x| x + 1);
        let lo = 1usize << other.m;
        let n = (1usize << self.m) * lo;
        OrbitPartition {
            m: self.m + other.m,
            classes: (0..n).map(|x| self.classes[x / lo] * kc + other.classes[x % lo]).collect(),
            dual: (0..n).map(|x| self.dual[x / lo] * kd + other.dual[x % lo]).collect(),
        }
    }

    pub fn power(&self, p: usize) -> OrbitPartition {
        (1..p.max(1)).fold(self.clone(), |acc, _| acc.product(self))
    }
}

fn groups(ids: &[usize]) -> Vec<Vec<usize>> {
    let mut map = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for (x, &id) in ids.iter().enumerate() {
        map.entry(id).or_default().push(x);
    }
    map.into_values().collect()
}

/// Class sums `Σ_{x∈C} (-1)^{x·y}` for every `y`, checked to be constant on
/// each class of `other`.
fn class_sums(cls: &[Vec<usize>], other: &[Vec<usize>], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut out = vec![];
    for c in cls {
        let mut v = vec![0i64; n];
        for &x in c {
            v[x] = 1;
        }
        fwht(&mut v);
        let mut row = vec![];
        for d in other {
            let val = v[d[0]];
            if d.iter().any(|&y| v[y] != val) {
                return Err(Error::Precondition("partition is not compatible with the characters".into()));
            }
            row.push(val);
        }
        out.push(row);
    }
    Ok(out)
}

/// The Cayley LP over the classes of `part`, solved in exact rationals. The
/// certificate is expanded to the whole group and verified there.
pub fn theta_cayley_lp_reduced(c: &CayleyZ2, variant: ThetaVariant, part: &OrbitPartition, opts: CayleyLpOptions) -> Result<CayleyThetaLp> {
    let n = c.order();
    if part.m != c.m() || part.classes.len() != n || part.dual.len() != n {
        return Err(Error::Shape("partition does not match the group".into()));
    }
    let vc = groups(&part.classes);
    let dc = groups(&part.dual);
    if !vc.iter().any(|g| g == &[0]) || !dc.iter().any(|g| g == &[0]) {
        return Err(Error::Precondition("the identity must form its own class".into()));
    }
    let mask = c.conn_mask();
    let mut conn_classes = vec![];
    for g in &vc {
        let inside = g.iter().filter(|&&x| mask.contains(x)).count();
        if inside != 0 && inside != g.len() {
            return Err(Error::Precondition("connection set is not a union of classes".into()));
        }
        if inside != 0 {
            conn_classes.push(g.clone());
        }
    }
    // a[c][d] = Σ_{s∈C} χ(s) for χ ∈ D; b[d][c] = Σ_{χ∈D} χ(s) for s ∈ C
    let a = class_sums(&conn_classes, &dc, n)?;
    class_sums(&dc, &conn_classes, n)?;
    let q = |num: i64, den: usize| BigRational::new(num.into(), (den as i64).into());
    let zero_class = dc.iter().position(|g| g == &[0]).expect("checked above");
    let objective = (0..dc.len()).map(|d| BigRational::from_i64(if d == zero_class { n as i64 - 1 } else { -1 })).collect();
    let mut rows = vec![LpRow { coeffs: vec![BigRational::from_i64(1); dc.len()], kind: RowKind::Eq, rhs: BigRational::from_i64(1) }];
    let kind = if variant == ThetaVariant::Theta { RowKind::Eq } else { RowKind::Le };
    for (ci, cls) in conn_classes.iter().enumerate() {
        // average over the class of Σ_{χ∈D} χ(s) / |D|
        let coeffs = (0..dc.len()).map(|d| q(a[ci][d], cls.len())).collect();
        rows.push(LpRow { coeffs, kind, rhs: BigRational::zero() });
    }
    let sol = solve_lp(&LpProblem { objective, rows })?;
    let mut z = vec![BigRational::from_i64(-1); n];
    z[0] = sol.duals[0].clone();
    for (ci, cls) in conn_classes.iter().enumerate() {
        let mut w = sol.duals[ci + 1].clone();
        if variant == ThetaVariant::ThetaPlus && w.is_negative() {
            w = BigRational::zero();
        }
        let per = w / BigRational::from_i64(cls.len() as i64) - BigRational::from_i64(1);
        for &s in cls {
            z[s] = per.clone();
        }
    }
    let mut y = vec![BigRational::zero(); n];
    for (d, g) in dc.iter().enumerate() {
        for &chi in g {
            y[chi] = sol.x[d].clone() / BigRational::from_i64(g.len() as i64);
        }
    }
    let solved = finish_exact(z, &y, &sol.value);
    package(c, variant, opts, solved, true, sol.pivots, sol.bland_pivots)
}

fn package(
    c: &CayleyZ2,
    variant: ThetaVariant,
    opts: CayleyLpOptions,
    solved: Solved,
    exact: bool,
    pivots: usize,
    bland: usize,
) -> Result<CayleyThetaLp> {
    let n = c.order();
    let (z, y, primal, lambda_exact, exact_z) = solved;
    let lambda = match &lambda_exact {
        Some(q) => ToPrimitive::to_f64(q).unwrap_or(f64::NAN),
        None => z[0] + 1.0,
    };
    let inv = InvariantZ { m: c.m(), z: z.clone(), exact: exact_z };
    let residuals = invariant_residuals(c, variant, lambda, &inv)?;
    let dense = (n <= DENSE_Z_LIMIT).then(|| (0..n).map(|u| (0..n).map(|v| z[u ^ v]).collect()).collect());
    let certificate = ThetaCertificate {
        variant,
        method: CertMethod::CayleyLp,
        lambda,
        lambda_exact: lambda_exact.as_ref().map(rational_string),
        primal: Some(primal),
        dual: lambda,
        gap: lambda - primal,
        residuals,
        graph_hash: c.hash(),
        z: dense,
        z_invariant: Some(inv),
    };
    if !certificate.residuals.within(opts.tol) {
        return Err(Error::Solver(format!("LP certificate residuals {:?}", certificate.residuals)));
    }
    Ok(CayleyThetaLp {
        m: c.m(),
        conn: c.conn().to_vec(),
        variant,
        y,
        pivots,
        bland_pivots: bland,
        exact,
        certificate,
    })
}

/// Residuals of an invariant `z` recomputed from scratch. When exact values
/// are present they are checked in rational arithmetic and must agree with
/// the float copy.
pub(crate) fn invariant_residuals(c: &CayleyZ2, variant: ThetaVariant, lambda: f64, inv: &InvariantZ) -> Result<Residuals> {
    let n = c.order();
    if inv.m != c.m() || inv.z.len() != n {
        return Err(Error::Shape("invariant vector does not match the group".into()));
    }
    let mask = c.conn_mask();
    let mut eq = (inv.z[0] - (lambda - 1.0)).abs();
    let mut ineq = 0f64;
    for s in 1..n {
        if mask.contains(s) {
            if variant == ThetaVariant::ThetaPlus {
                ineq = ineq.max(-1.0 - inv.z[s]);
            }
        } else {
            eq = eq.max((inv.z[s] + 1.0).abs());
        }
    }
    let mut spec = inv.z.clone();
    fwht(&mut spec);
    let mut mineig = spec.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(ex) = &inv.exact {
        let q: Vec<BigRational> = ex.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
        for (a, b) in q.iter().zip(&inv.z) {
            eq = eq.max((ToPrimitive::to_f64(a).unwrap_or(f64::NAN) - b).abs());
        }
        let mut qs = q.clone();
        fwht(&mut qs);
        if qs.iter().any(|v| v.is_negative()) {
            mineig = mineig.min(qs.iter().min().and_then(ToPrimitive::to_f64).unwrap_or(f64::NAN));
        } else {
            mineig = mineig.max(0.0);
        }
        for s in 1..n {
            let bad = if mask.contains(s) {
                variant == ThetaVariant::ThetaPlus && q[s] < BigRational::from_i64(-1)
            } else {
                q[s] != BigRational::from_i64(-1)
            };
            if bad {
                eq = eq.max(1.0);
            }
        }
    }
    if n <= 64 {
        let dense = DMatrix::from_fn(n, n, |u, v| inv.z[u ^ v]);
        mineig = mineig.min(min_eigenvalue(&dense).max(mineig.min(0.0)));
    }
    Ok(Residuals { eq, ineq, mineig: if mineig.is_zero() { 0.0 } else { mineig } })
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse { line: 0, msg: format!("bad rational {s:?}") };
    match s.split_once('/') {
        Some((a, b)) => Ok(BigRational::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
