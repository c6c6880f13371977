//! Small dense linear-algebra helpers shared by the relaxations and the
//! state simulator.

use nalgebra::{Cholesky, ComplexField, DMatrix, DVector, RealField, SymmetricEigen};
use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Complex double-precision matrix.
pub type CMatrix = DMatrix<Complex<f64>>;
pub type CVector = DVector<Complex<f64>>;

/// Eigen-decomposition ordered by descending eigenvalue, each eigenvector
/// scaled so that its first component above `1e-12` in modulus is real and
/// positive.
pub struct SortedEigen<F: ComplexField> {
    pub values: Vec<F::RealField>,
    pub vectors: DMatrix<F>,
}

/// Hermitian (or real symmetric) eigen-decomposition with a deterministic
/// order and phase convention.
pub fn sorted_eigen<F: ComplexField>(m: &DMatrix<F>) -> SortedEigen<F>
where
    F::RealField: Copy + PartialOrd,
{
    let sym = (m + m.adjoint()) * F::from_f64(0.5).expect("literal");
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let thresh: F::RealField = nalgebra::convert(1e-12);
    let mut vectors = DMatrix::<F>::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &i) in idx.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        if let Some(p) = col.iter().find(|c| (*c).clone().modulus() > thresh) {
            let phase = p.clone().signum();
            col /= phase;
        }
        vectors.set_column(k, &col);
        values.push(eig.eigenvalues[i]);
    }
    SortedEigen { values, vectors }
}

/// Smallest eigenvalue of a symmetric real matrix.
pub fn min_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::zero();
    }
    let sym = (m + m.transpose()) * lit::<T>(0.5);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(T::max_value().expect("bounded"), |a, b| a.min(b))
}

/// Largest step `α` with `X + α dX ⪰ 0`, given the Cholesky factor of `X`;
/// `None` when the step is unbounded.
pub fn max_psd_step<T: Real>(chol: &Cholesky<T, nalgebra::Dyn>, dx: &DMatrix<T>) -> Option<T> {
    let l = chol.l();
    let linv = l.clone().solve_lower_triangular(&DMatrix::identity(l.nrows(), l.ncols()))?;
    let t = &linv * dx * linv.transpose();
    let lam = min_eigenvalue(&t);
    if lam >= T::zero() {
        None
    } else {
        Some(-T::one() / lam)
    }
}

/// `(A + A^T) / 2`.
pub fn symmetrize<T: RealField + Copy>(a: &DMatrix<T>) -> DMatrix<T> {
    let half = T::one() / (T::one() + T::one());
    (a + a.transpose()) * half
}

/// Frobenius inner product.
pub fn frob<T: RealField + Copy>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |s, (&x, &y)| s + x * y)
}
