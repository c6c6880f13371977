use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{dense_residuals, CertMethod, ThetaCertificate, ThetaVariant};
use crate::error::{invalid, Error, Result};
use crate::graphs::Graph;
use crate::linalg::{min_eigenvalue, CMatrix};
use crate::qsim::{verify_chrom_witness, ChromWitness};

/// Largest `t · size` for which the block matrix is also assembled.
pub const EXPLICIT_BLOCK_LIMIT: usize = 512;

/// Result of testing the `t x t` block matrix with `A` on the diagonal and
/// `B` elsewhere for positive semidefiniteness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BlockPsdReport {
    pub psd: bool,
    /// Least eigenvalue of `A − B`.
    pub min_eig_difference: f64,
    /// Least eigenvalue of `A + (t−1) B`.
    pub min_eig_sum: f64,
    /// Least eigenvalue of the assembled matrix, when small enough.
    pub explicit_min_eig: Option<f64>,
    /// Whether the assembled check reached the same verdict.
    pub agree: Option<bool>,
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Checks `A − B ⪰ 0` and `A + (t−1)B ⪰ 0`, and cross-checks against the
/// eigenvalues of the assembled matrix when `t · size ≤ EXPLICIT_BLOCK_LIMIT`.
pub fn block_psd_check(a: &DMatrix<f64>, b: &DMatrix<f64>, t: usize) -> Result<BlockPsdReport> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::Shape("A and B must be square of one size".into()));
    }
    if t < 2 {
        return Err(invalid("block count t must be at least 2"));
    }
    let scale = a.amax().max(b.amax()).max(1.0);
    let tol = 1e-9 * scale * t as f64;
    if asymmetry(a) > tol || asymmetry(b) > tol {
        return Err(invalid("A and B must be symmetric"));
    }
    let diff = min_eigenvalue(&(a - b));
    let sum = min_eigenvalue(&(a + b * (t as f64 - 1.0)));
    let psd = diff >= -tol && sum >= -tol;
    let (explicit_min_eig, agree) = if t * n <= EXPLICIT_BLOCK_LIMIT {
        let x = DMatrix::from_fn(t * n, t * n, |r, c| if r / n == c / n { a[(r % n, c % n)] } else { b[(r % n, c % n)] });
        let m = min_eigenvalue(&x);
        (Some(m), Some((m >= -tol) == psd))
    } else {
        (None, None)
    };
    Ok(BlockPsdReport { psd, min_eig_difference: diff, min_eig_sum: sum, explicit_min_eig, agree })
}

fn inner(p: &CMatrix, q: &CMatrix) -> f64 {
    // Re tr(P Q) for Hermitian P, Q
    let d = p.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += (p[(i, j)] * q[(j, i)]).re;
        }
    }
    s
}

/// Turns a `χ*` witness with `t` messages on `g` into a feasible point of the
/// `θ+` program of the complement at `λ = t`.
///
/// After scaling so that `⟨ρ, ρ⟩ = 1`, the Gram matrix of the family is
/// averaged over relabellings of the messages, giving diagonal blocks `A`
/// and off-diagonal blocks `B`. Then `Z = t(t−1)(A − B)` has `Z(u,v) = −1`
/// on edges of `g`, and `Z' = Z + Diag(t − 1 − Z(u,u))` is the certificate.
pub fn witness_to_theta_plus_certificate(w: &ChromWitness, g: &Graph, tol: f64) -> Result<ThetaCertificate> {
    let report = verify_chrom_witness(w, g, tol)?;
    if !report.pass {
        return Err(Error::Verification(format!("witness fails {:?}", report.violated)));
    }
    let n = g.n();
    let t = w.t;
    let tf = t as f64;
    let norm = inner(&w.rho, &w.rho).sqrt();
    let scale = 1.0 / norm;
    let sums: Vec<CMatrix> = (0..n).map(|u| (0..t).fold(CMatrix::zeros(w.d, w.d), |s, i| s + w.get(u, i))).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            let diag: f64 = (0..t).map(|i| inner(w.get(u, i), w.get(v, i))).sum::<f64>() * scale * scale;
            let total = inner(&sums[u], &sums[v]) * scale * scale;
            let auv = diag / tf;
            let buv = if t > 1 { (total - diag) / (tf * (tf - 1.0)) } else { 0.0 };
            a[(u, v)] = auv;
            a[(v, u)] = auv;
            b[(u, v)] = buv;
            b[(v, u)] = buv;
        }
    }
    if t >= 2 {
        let blocks = block_psd_check(&a, &b, t)?;
        if !blocks.psd || blocks.agree == Some(false) {
            return Err(Error::Verification(format!("averaged Gram matrix is not PSD: {blocks:?}")));
        }
    }
    if n * t <= EXPLICIT_BLOCK_LIMIT {
        let idx = |k: usize| w.get(k / t, k % t);
        let x = DMatrix::from_fn(n * t, n * t, |r, c| inner(idx(r), idx(c)) * scale * scale);
        let m = min_eigenvalue(&x);
        if m < -1e-8 {
            return Err(Error::Verification(format!("Gram matrix of the family has eigenvalue {m:.3e}")));
        }
    }
    let mut z = (&a - &b) * (tf * (tf - 1.0));
    for u in 0..n {
        let c = tf - 1.0 - z[(u, u)];
        if c < -1e-6 {
            return Err(Error::Verification(format!("padding for vertex {u} is negative ({c:.3e})")));
        }
        z[(u, u)] += c;
    }
    let gbar = g.complement();
    let residuals = dense_residuals(&gbar, ThetaVariant::ThetaPlus, tf, &z)?;
    if !residuals.within(1e-6) {
        return Err(Error::Verification(format!("certificate residuals {residuals:?}")));
    }
    Ok(ThetaCertificate {
        variant: ThetaVariant::ThetaPlus,
        method: CertMethod::Witness,
        lambda: tf,
        lambda_exact: Some(t.to_string()),
        primal: None,
        dual: tf,
        gap: 0.0,
        residuals,
        graph_hash: gbar.hash(),
        z: Some((0..n).map(|i| (0..n).map(|j| z[(i, j)]).collect()).collect()),
        z_invariant: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{edgeless_graph, hk_graph};
    use crate::qsim::{chrom_witness_from_coloring, chrom_witness_from_flat_rep, orth_rep_hk};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_by_one_blocks() {
        let one = |x: f64| DMatrix::from_element(1, 1, x);
        let r = block_psd_check(&one(1.0), &one(-1.0), 2).unwrap();
        assert!(r.psd && r.agree == Some(true));
        assert!(r.explicit_min_eig.unwrap().abs() < 1e-12);
        let r = block_psd_check(&one(1.0), &one(2.0), 2).unwrap();
        assert!(!r.psd && r.agree == Some(true));
        assert!(block_psd_check(&one(1.0), &one(1.0), 1).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(block_psd_check(&asym, &DMatrix::zeros(2, 2), 2).is_err());
    }

    #[test]
    fn random_pairs_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let g1 = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let g2 = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let a = &g1 * g1.transpose();
            let b = (&g2 * g2.transpose()) * rng.random_range(-0.6..0.6);
            let r = block_psd_check(&a, &b, 3).unwrap();
            assert_eq!(r.agree, Some(true), "{r:?}");
        }
    }

    #[test]
    fn h7_flat_witness_certificate() {
        let g = hk_graph(7).unwrap();
        let w = chrom_witness_from_flat_rep(&orth_rep_hk(7).unwrap(), &g).unwrap();
        let cert = witness_to_theta_plus_certificate(&w, &g, 1e-9).unwrap();
        assert_eq!(cert.lambda, 8.0);
        assert!(cert.residuals.within(1e-8), "{:?}", cert.residuals);
        assert!(cert.verify(&g.complement(), 1e-8).is_ok());
    }

    #[test]
    fn c5_coloring_certificate() {
        let g = Graph::cycle(5).unwrap();
        let w = chrom_witness_from_coloring(&g, &[0, 1, 0, 1, 2]).unwrap();
        let cert = witness_to_theta_plus_certificate(&w, &g, 1e-9).unwrap();
        assert_eq!(cert.lambda, 3.0);
        assert!(cert.verify(&g.complement(), 1e-9).is_ok());
    }

    #[test]
    fn single_message_on_edgeless() {
        let g = edgeless_graph(4).unwrap();
        let w = chrom_witness_from_coloring(&g, &[0, 0, 0, 0]).unwrap();
        let cert = witness_to_theta_plus_certificate(&w, &g, 1e-9).unwrap();
        assert_eq!(cert.lambda, 1.0);
        assert!(cert.z.unwrap().iter().flatten().all(|&x| x == 0.0));
    }
}
