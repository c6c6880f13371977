use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{sorted_eigen, CMatrix, CVector};

pub type C64 = Complex<f64>;

/// Relative cut for the numerical rank of a PSD matrix.
pub const RANK_CUT: f64 = 1e-8;

/// Which tensor factor [`partial_trace`] removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    A,
    B,
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `e^{2πi k / d}`.
pub fn root_of_unity(k: usize, d: usize) -> C64 {
    Complex::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

/// Traces out factor `side` of an operator on `C^da ⊗ C^db`; index `(a, b)`
/// is `a * db + b`.
pub fn partial_trace(rho: &CMatrix, da: usize, db: usize, side: Side) -> Result<CMatrix> {
    if rho.nrows() != da * db || rho.ncols() != da * db {
        return Err(Error::Shape(format!("{}x{} operator does not act on {da}x{db}", rho.nrows(), rho.ncols())));
    }
    Ok(match side {
        Side::A => CMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| rho[(a * db + b, a * db + b2)]).sum()),
        Side::B => CMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| rho[(a * db + b, a2 * db + b)]).sum()),
    })
}

/// Unitary DFT `F_{l,m} = e^{2πi lm/d} / √d` (zero-based indices).
pub fn dft_matrix(d: usize) -> CMatrix {
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |l, m| root_of_unity(l * m, d) * s)
}

/// `(1/√d) Σ e_l ⊗ e_l`.
pub fn max_entangled_vector(d: usize) -> CVector {
    let s = 1.0 / (d as f64).sqrt();
    CVector::from_fn(d * d, |i, _| if i / d == i % d { c(s, 0.0) } else { c(0.0, 0.0) })
}

/// Density matrix of the maximally entangled state on `C^d ⊗ C^d`.
pub fn max_entangled(d: usize) -> CMatrix {
    let v = max_entangled_vector(d);
    &v * v.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Largest entry modulus of `A - A*`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eig(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    *sorted_eigen(a).values.last().expect("nonempty")
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `½ Σ |eig(ρ - σ)|`.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    0.5 * sorted_eigen(&(rho - sigma)).values.iter().map(|x| x.abs()).sum::<f64>()
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue at
/// least `RANK_CUT` times the largest; also returns the rank.
pub fn support_projector(rho: &CMatrix) -> (CMatrix, usize) {
    let n = rho.nrows();
    let e = sorted_eigen(rho);
    let top = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut p = CMatrix::zeros(n, n);
    let mut rank = 0;
    if top <= 0.0 {
        return (p, 0);
    }
    for (k, &lam) in e.values.iter().enumerate() {
        if lam >= RANK_CUT * top {
            let v = e.vectors.column(k);
            p += &v * v.adjoint();
            rank += 1;
        }
    }
    (p, rank)
}

/// `f(ρ) = V diag(f(λ)) V*` for a Hermitian `ρ`.
pub fn spectral_map(rho: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let e = sorted_eigen(rho);
    let d = DMatrix::from_diagonal(&CVector::from_iterator(e.values.len(), e.values.iter().map(|&l| c(f(l), 0.0))));
    &e.vectors * d * e.vectors.adjoint()
}

/// Checks that `rho` is Hermitian, PSD and of unit trace within `tol`.
pub fn check_state(rho: &CMatrix, tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::Shape(format!("state is {}x{}", rho.nrows(), rho.ncols())));
    }
    let h = hermitian_residual(rho);
    if h > tol {
        return Err(invalid(format!("state is not Hermitian (residual {h:.3e})")));
    }
    let t = rho.trace();
    if (t.re - 1.0).abs() > tol || t.im.abs() > tol {
        return Err(invalid(format!("state has trace {t}")));
    }
    let m = min_eig(rho);
    if m < -tol {
        return Err(invalid(format!("state has eigenvalue {m:.3e}")));
    }
    Ok(())
}

/// JSON form `{re, im}` of a complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for CMatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        CMatrixJson { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<&CMatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: &CMatrixJson) -> Result<CMatrix> {
        let r = j.re.len();
        let cols = j.re.first().map_or(0, Vec::len);
        if j.im.len() != r || j.re.iter().chain(&j.im).any(|row| row.len() != cols) {
            return Err(Error::Shape("ragged complex matrix".into()));
        }
        let m = CMatrix::from_fn(r, cols, |i, k| c(j.re[i][k], j.im[i][k]));
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite matrix entry"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let p = &g * g.adjoint();
        let t = p.trace();
        p / t
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_state(3, &mut rng);
        let b = random_state(2, &mut rng);
        let ab = kron(&a, &b);
        assert!(frobenius(&(partial_trace(&ab, 3, 2, Side::B).unwrap() - &a)) < 1e-12);
        assert!(frobenius(&(partial_trace(&ab, 3, 2, Side::A).unwrap() - &b)) < 1e-12);
        assert!(partial_trace(&ab, 2, 2, Side::A).is_err());
    }

    #[test]
    fn max_entangled_marginal() {
        for d in 1..6 {
            let m = partial_trace(&max_entangled(d), d, d, Side::A).unwrap();
            let want = CMatrix::identity(d, d) / c(d as f64, 0.0);
            assert!(frobenius(&(m - want)) < 1e-12);
        }
    }

    #[test]
    fn dft_is_unitary() {
        let f = dft_matrix(4);
        let g = f.adjoint() * &f;
        assert!(frobenius(&(g - CMatrix::identity(4, 4))) < 1e-12);
        // independent check of one column pair
        let inner: C64 = (0..4).map(|m| f[(m, 1)].conj() * f[(m, 3)]).sum();
        assert!(inner.norm() < 1e-12);
    }

    #[test]
    fn projector_and_distance() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let (p, r) = support_projector(&outer(&v));
        assert_eq!(r, 1);
        assert!(frobenius(&(p - outer(&v))) < 1e-12);
        let w = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((trace_distance(&outer(&v), &outer(&w)) - 1.0).abs() < 1e-12);
        assert!(check_state(&outer(&v), 1e-12).is_ok());
        assert!(check_state(&(outer(&v) * c(2.0, 0.0)), 1e-12).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64 - 0.5));
        let j = CMatrixJson::from(&m);
        assert_eq!(CMatrix::try_from(&j).unwrap(), m);
    }
}
