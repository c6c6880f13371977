use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ops::{
    c, C64, check_state, dft_matrix, frobenius, max_entangled_vector, partial_trace, root_of_unity, spectral_map, support_projector, trace_distance,
    Side, RANK_CUT,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Projective measurement `{P^1, …, P^ℓ, P^⊥}` separating pairwise
/// orthogonal PSD operators.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthMeasurement {
    pub projectors: Vec<CMatrix>,
    pub perp: CMatrix,
    /// `‖Σ P^i + P^⊥ − I‖`.
    pub completeness: f64,
    /// Largest `|Tr(P^i ρ_j) − δ_ij Tr ρ_j|`.
    pub trace_residual: f64,
}

/// Builds the separating measurement: `P^i` projects onto the
/// column space of `ρ_i`. Fails with the 1-based offending pair when some
/// `‖ρ_i ρ_j‖` exceeds `tol`.
pub fn orthogonality_measurement(states: &[CMatrix], tol: f64) -> Result<OrthMeasurement> {
    let d = states.first().map_or(0, |s| s.nrows());
    if d == 0 || states.iter().any(|s| s.nrows() != d || s.ncols() != d) {
        return Err(Error::Shape("operators must be square of one size".into()));
    }
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let r = frobenius(&(&states[i] * &states[j]));
            if r > tol {
                return Err(Error::NonOrthogonal(i + 1, j + 1, r));
            }
        }
    }
    let projectors: Vec<CMatrix> = states.iter().map(|s| support_projector(s).0).collect();
    let total = projectors.iter().fold(CMatrix::zeros(d, d), |a, p| a + p);
    let perp = CMatrix::identity(d, d) - &total;
    let completeness = frobenius(&(&total + &perp - CMatrix::identity(d, d)));
    let mut trace_residual = 0f64;
    for (i, p) in projectors.iter().enumerate() {
        for (j, s) in states.iter().enumerate() {
            let want = if i == j { s.trace() } else { c(0.0, 0.0) };
            trace_residual = trace_residual.max(((p * s).trace() - want).norm());
        }
    }
    // P^⊥ must be a projector too, which fails if supports overlap
    let idem = frobenius(&(&perp * &perp - &perp));
    if idem > 1e-6 {
        return Err(Error::Verification(format!("supports overlap (P^⊥ idempotence residual {idem:.3e})")));
    }
    Ok(OrthMeasurement { projectors, perp, completeness, trace_residual })
}

/// State `σ` and measurement realizing an ensemble by steering.
#[derive(Clone, Debug, PartialEq)]
pub struct Hjw {
    pub d: usize,
    /// Purification `ψ[a d + b] = (√ρ̄)_{ba}`.
    pub psi: CVector,
    pub sigma: CMatrix,
    /// `A^i`, one per ensemble element.
    pub measurements: Vec<CMatrix>,
    /// Kernel outcome `(I − Π)^T`.
    pub discard: CMatrix,
    /// `‖Σ A^i + discard − I‖`.
    pub completeness: f64,
    /// Largest `‖Tr_A((A^i ⊗ I) σ) − p_i ρ_i‖`.
    pub steering: f64,
}

/// Purification of the average `ρ̄` and measurement operators
/// `A^i = ((√ρ̄)^+ p_i ρ_i (√ρ̄)^+)^T`, so that `Tr_A((A^i ⊗ I) σ) = p_i ρ_i`.
pub fn hjw_state_and_measurements(ensemble: &[(f64, CMatrix)], tol: f64) -> Result<Hjw> {
    if ensemble.is_empty() {
        return Err(invalid("empty ensemble"));
    }
    let d = ensemble[0].1.nrows();
    let psum: f64 = ensemble.iter().map(|e| e.0).sum();
    if ensemble.iter().any(|e| !(e.0 >= 0.0)) || (psum - 1.0).abs() > tol {
        return Err(invalid(format!("weights must be nonnegative and sum to 1 (sum {psum})")));
    }
    for (_, r) in ensemble {
        if r.nrows() != d {
            return Err(Error::Shape("ensemble states differ in dimension".into()));
        }
        check_state(r, tol).map_err(|e| invalid(format!("ensemble state: {e}")))?;
    }
    let avg = ensemble.iter().fold(CMatrix::zeros(d, d), |a, (p, r)| a + r * c(*p, 0.0));
    let top = crate::linalg::sorted_eigen(&avg).values[0].max(0.0);
    let cut = RANK_CUT * top;
    let sqrt = spectral_map(&avg, |l| if l > cut { l.sqrt() } else { 0.0 });
    let pinv = spectral_map(&avg, |l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
    let (proj, _) = support_projector(&avg);

    let psi = CVector::from_fn(d * d, |k, _| sqrt[(k % d, k / d)]);
    let sigma = &psi * psi.adjoint();
    let measurements: Vec<CMatrix> = ensemble.iter().map(|(p, r)| (&pinv * r * c(*p, 0.0) * &pinv).transpose()).collect();
    let discard = (CMatrix::identity(d, d) - proj).transpose();

    let total = measurements.iter().fold(discard.clone(), |a, m| a + m);
    let completeness = frobenius(&(total - CMatrix::identity(d, d)));
    let mut steering = 0f64;
    for (m, (p, r)) in measurements.iter().zip(ensemble) {
        let b = partial_trace(&(m.kronecker(&CMatrix::identity(d, d)) * &sigma), d, d, Side::A)?;
        steering = steering.max(frobenius(&(b - r * c(*p, 0.0))));
    }
    Ok(Hjw { d, psi, sigma, measurements, discard, completeness, steering })
}

/// One outcome of remote state preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct RspOutcome {
    pub outcome: usize,
    pub probability: f64,
    /// Bob's normalized state before his phase correction.
    pub received: CMatrix,
    /// Bob's state after the correction for this outcome.
    pub state: CMatrix,
    pub trace_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RspReport {
    pub d: usize,
    pub outcomes: Vec<RspOutcome>,
    pub max_trace_distance: f64,
    /// Largest `|p_ℓ − 1/d|`.
    pub max_probability_error: f64,
}

/// Serializable summary of an [`RspReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RspSummary {
    pub d: usize,
    pub probabilities: Vec<f64>,
    pub max_trace_distance: f64,
    pub max_probability_error: f64,
}

impl RspReport {
    pub fn summary(&self) -> RspSummary {
        RspSummary {
            d: self.d,
            probabilities: self.outcomes.iter().map(|o| o.probability).collect(),
            max_trace_distance: self.max_trace_distance,
            max_probability_error: self.max_probability_error,
        }
    }
}

/// Bob's phase correction `diag(e^{-2πi ℓ m / d})` for outcome `ℓ`.
pub fn rsp_correction(d: usize, outcome: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |a, b| if a == b { root_of_unity(d - (outcome * a) % d, d) } else { c(0.0, 0.0) })
}

/// Remote preparation of `u u*` for a flat unit vector `u`: Alice applies
/// `F U` with `U = √d diag(u)` to her half of the maximally entangled state,
/// measures in the canonical basis and Bob undoes the phase of the outcome.
pub fn rsp_protocol(u: &CVector) -> Result<RspReport> {
    let d = u.len();
    if d == 0 {
        return Err(Error::Precondition("empty vector".into()));
    }
    let m = 1.0 / (d as f64).sqrt();
    if let Some((j, z)) = u.iter().enumerate().find(|(_, z)| (z.norm() - m).abs() > 1e-9) {
        return Err(Error::Precondition(format!("entry {j} has modulus {:.6}, need {m:.6}", z.norm())));
    }
    let target = u * u.adjoint();
    let ud = CMatrix::from_fn(d, d, |a, b| if a == b { u[a] * c((d as f64).sqrt(), 0.0) } else { c(0.0, 0.0) });
    let alice = (dft_matrix(d) * ud).kronecker(&CMatrix::identity(d, d));
    let psi = alice * max_entangled_vector(d);
    let sigma = &psi * psi.adjoint();

    let mut outcomes = Vec::with_capacity(d);
    let (mut worst_td, mut worst_p) = (0f64, 0f64);
    for l in 0..d {
        // (e_l e_l* ⊗ I) σ (e_l e_l* ⊗ I)
        let block = |i: usize| i / d == l;
        let post = CMatrix::from_fn(d * d, d * d, |i, j| if block(i) && block(j) { sigma[(i, j)] } else { c(0.0, 0.0) });
        let bob = partial_trace(&post, d, d, Side::A)?;
        let probability = bob.trace().re;
        let received = bob / c(probability, 0.0);
        let corr = rsp_correction(d, l);
        let state = &corr * &received * corr.adjoint();
        let td = trace_distance(&state, &target);
        worst_td = worst_td.max(td);
        worst_p = worst_p.max((probability - 1.0 / d as f64).abs());
        outcomes.push(RspOutcome { outcome: l, probability, received, state, trace_distance: td });
    }
    Ok(RspReport { d, outcomes, max_trace_distance: worst_td, max_probability_error: worst_p })
}

/// Flat unit vector with phases drawn uniformly from `rng`.
pub fn random_flat_vector(d: usize, rng: &mut ChaCha8Rng) -> CVector {
    let m = 1.0 / (d as f64).sqrt();
    CVector::from_fn(d, |_, _| C64::from_polar(m, rng.random_range(0.0..std::f64::consts::TAU)))
}

/// Worst case over `trials` seeded random flat vectors of dimension `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RspBatch {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_trace_distance: f64,
    pub max_probability_error: f64,
}

pub fn rsp_batch(d: usize, trials: usize, seed: u64) -> Result<RspBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut td, mut pe) = (0f64, 0f64);
    for _ in 0..trials {
        let r = rsp_protocol(&random_flat_vector(d, &mut rng))?;
        td = td.max(r.max_trace_distance);
        pe = pe.max(r.max_probability_error);
    }
    Ok(RspBatch { d, trials, seed, max_trace_distance: td, max_probability_error: pe })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::ops::outer;

    fn e(d: usize, i: usize) -> CVector {
        CVector::from_fn(d, |k, _| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn two_orthogonal_pure_states() {
        let s = [outer(&e(3, 0)), outer(&e(3, 1))];
        let m = orthogonality_measurement(&s, 1e-9).unwrap();
        assert!(frobenius(&(&m.projectors[0] - &s[0])) < 1e-12);
        assert!(frobenius(&(&m.perp - outer(&e(3, 2)))) < 1e-12);
        assert!(m.trace_residual < 1e-12 && m.completeness < 1e-12);
    }

    #[test]
    fn overlapping_pair_reported() {
        let v = CVector::from_vec(vec![c(0.1, 0.0), c((1.0f64 - 0.01).sqrt(), 0.0)]);
        let s = [outer(&e(2, 0)), outer(&v)];
        match orthogonality_measurement(&s, 1e-9) {
            Err(Error::NonOrthogonal(1, 2, r)) => assert!(r > 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hjw_two_element_ensemble() {
        let plus = CVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
        let ens = vec![(0.5, outer(&e(2, 0))), (0.5, outer(&plus))];
        let h = hjw_state_and_measurements(&ens, 1e-9).unwrap();
        assert!(h.steering <= 1e-10 && h.completeness <= 1e-10);
        // marginal of σ on B is the average
        let avg = (outer(&e(2, 0)) + outer(&plus)) * c(0.5, 0.0);
        assert!(frobenius(&(partial_trace(&h.sigma, 2, 2, Side::A).unwrap() - avg)) < 1e-12);
    }

    #[test]
    fn hjw_single_element_is_support_projector() {
        let rho = outer(&e(3, 0)) * c(0.25, 0.0) + outer(&e(3, 1)) * c(0.75, 0.0);
        let h = hjw_state_and_measurements(&[(1.0, rho)], 1e-9).unwrap();
        let mut p = CMatrix::zeros(3, 3);
        p[(0, 0)] = c(1.0, 0.0);
        p[(1, 1)] = c(1.0, 0.0);
        assert!(frobenius(&(&h.measurements[0] - &p)) < 1e-12);
        assert!(frobenius(&(&h.discard - outer(&e(3, 2)))) < 1e-12);
        assert!(hjw_state_and_measurements(&[(0.7, outer(&e(2, 0)))], 1e-9).is_err());
    }

    #[test]
    fn rsp_qubit() {
        let u = CVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
        let r = rsp_protocol(&u).unwrap();
        assert_eq!(r.outcomes.len(), 2);
        for o in &r.outcomes {
            assert!((o.probability - 0.5).abs() < 1e-12);
        }
        assert!(r.max_trace_distance < 1e-12);
        assert!(matches!(rsp_protocol(&e(2, 0)), Err(Error::Precondition(_))));
    }
}
