use nalgebra::{DMatrix, DVector};

use super::sdp::{solve_sdp, Constraint, SdpOptions, SdpProblem, SdpStatus, SymSparse};
use super::{dense_residuals, CertMethod, ThetaCertificate, ThetaVariant};
use crate::error::{invalid, Error, Result};
use crate::graphs::Graph;
use crate::linalg::min_eigenvalue;
use crate::scalar::{lit, to_f64, Real};

/// Default vertex cap for the dense SDP.
pub const SDP_VERTEX_CAP: usize = 150;

/// `θ`/`θ+` of `g` by the dense SDP in `f64`.
pub fn theta_sdp(g: &Graph, variant: ThetaVariant, opts: SdpOptions<f64>) -> Result<ThetaCertificate> {
    theta_sdp_with(g, variant, opts)
}

/// `θ`/`θ+` of `g` with the solver running in scalar type `T`.
///
/// The solver works on `max <J,X>` over `tr X = 1`, `X ⪰ 0`, with `X(u,v) = 0`
/// on edges (`X(u,v) <= 0` for `θ+`). Its dual slack is the matrix
/// `Z = tI - J - Σ y_e E_e`, which is turned into the certificate after
/// moving its diagonal so that the least eigenvalue is zero.
pub fn theta_sdp_with<T: Real>(g: &Graph, variant: ThetaVariant, opts: SdpOptions<T>) -> Result<ThetaCertificate> {
    let n = g.n();
    if n == 0 {
        return Err(invalid("graph has no vertices"));
    }
    if n > SDP_VERTEX_CAP {
        return Err(Error::TooLarge(format!("{n} vertices exceed the SDP cap of {SDP_VERTEX_CAP}")));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let plus = variant == ThetaVariant::ThetaPlus;
    let mut constraints = Vec::with_capacity(edges.len() + 1);
    let mut trace = SymSparse::new();
    for u in 0..n {
        trace.push(u, u, T::one());
    }
    constraints.push(Constraint { mat: trace, lin: vec![], rhs: T::one() });
    for (k, &(u, v)) in edges.iter().enumerate() {
        let mut a = SymSparse::new();
        a.push(u, v, lit(0.5));
        let lin = if plus { vec![(k, T::one())] } else { vec![] };
        constraints.push(Constraint { mat: a, lin, rhs: T::zero() });
    }
    let n_lin = if plus { edges.len() } else { 0 };
    let p = SdpProblem {
        n,
        c: DMatrix::from_element(n, n, -T::one()),
        n_lin,
        c_lin: DVector::zeros(n_lin),
        constraints,
    };
    let sol = solve_sdp(&p, opts)?;
    if sol.status != SdpStatus::Converged {
        return Err(Error::Solver(format!(
            "SDP did not converge ({:?} after {} iterations): bracket [{:.8}, {:.8}]",
            sol.status,
            sol.iterations,
            to_f64(-sol.primal),
            to_f64(-sol.dual)
        )));
    }

    // Dual slack in f64 with the sign constraints enforced exactly.
    let y: Vec<f64> = sol.y.iter().map(|&v| to_f64(v)).collect();
    let t = -y[0];
    let mut z = DMatrix::<f64>::from_element(n, n, -1.0);
    for u in 0..n {
        z[(u, u)] = t - 1.0;
    }
    for (k, &(u, v)) in edges.iter().enumerate() {
        let ye = if plus { y[k + 1].min(0.0) } else { y[k + 1] };
        z[(u, v)] = -1.0 - ye / 2.0;
        z[(v, u)] = z[(u, v)];
    }
    // best λ for these multipliers: move the diagonal until Z is singular
    let shift = -min_eigenvalue(&z);
    for u in 0..n {
        z[(u, u)] += shift;
    }
    let lambda = t + shift;
    let primal = -to_f64(sol.primal);
    let residuals = dense_residuals(g, variant, lambda, &z)?;
    Ok(ThetaCertificate {
        variant,
        method: CertMethod::Sdp,
        lambda,
        lambda_exact: None,
        primal: Some(primal),
        dual: t,
        gap: lambda - primal,
        residuals,
        graph_hash: g.hash(),
        z: Some((0..n).map(|i| z.row(i).iter().copied().collect()).collect()),
        z_invariant: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete_graph, edgeless_graph};

    #[test]
    fn named_graphs() {
        let opts = SdpOptions::default();
        for t in 1..=5 {
            let k = theta_sdp(&complete_graph(t).unwrap(), ThetaVariant::Theta, opts).unwrap();
            assert!((k.lambda - 1.0).abs() < 1e-7, "K_{t}: {}", k.lambda);
            let e = theta_sdp(&edgeless_graph(t).unwrap(), ThetaVariant::Theta, opts).unwrap();
            assert!((e.lambda - t as f64).abs() < 1e-7, "edgeless {t}: {}", e.lambda);
        }
    }

    #[test]
    fn pentagon() {
        let c5 = Graph::cycle(5).unwrap();
        let c = theta_sdp(&c5, ThetaVariant::Theta, SdpOptions::default()).unwrap();
        assert!((c.lambda - 5f64.sqrt()).abs() < 1e-5, "{}", c.lambda);
        assert!(c.verify(&c5, 1e-6).is_ok());
        let cp = theta_sdp(&c5, ThetaVariant::ThetaPlus, SdpOptions::default()).unwrap();
        assert!(cp.lambda + 1e-6 >= c.lambda);
        assert!(cp.verify(&c5, 1e-6).is_ok());
        let single = theta_sdp_with(&c5, ThetaVariant::Theta, SdpOptions { tol: 1e-4f32, max_iter: 100 }).unwrap();
        assert!((single.lambda - 5f64.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn tampered_certificate_rejected() {
        let c5 = Graph::cycle(5).unwrap();
        let mut c = theta_sdp(&c5, ThetaVariant::Theta, SdpOptions::default()).unwrap();
        c.lambda -= 0.1;
        assert!(c.verify(&c5, 1e-6).is_err());
    }
}
