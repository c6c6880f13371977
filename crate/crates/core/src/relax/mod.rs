//! Lovász `θ` and Szegedy `θ+`: a dense SDP for general graphs, a
//! Walsh-reduced LP for Cayley graphs over `Z_2^m`, and certificates that
//! re-verify from their serialized form.
//!
//! Both parameters are the least `λ` admitting a symmetric `Z ⪰ 0` with
//! `Z(u,u) = λ - 1` and `Z(u,v) = -1` on non-edges; `θ+` additionally asks
//! `Z(u,v) >= -1` on edges.

mod cayley_lp;
mod certificate;
mod sdp;
mod simplex;
mod theta_sdp;
pub mod walsh;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{CayleyZ2, Graph};
use crate::linalg::min_eigenvalue;

pub use cayley_lp::{theta_cayley_lp, theta_cayley_lp_reduced, CayleyLpOptions, CayleyThetaLp, OrbitPartition, DENSE_Z_LIMIT, MAX_LP_EXPONENT};
pub use certificate::{block_psd_check, witness_to_theta_plus_certificate, BlockPsdReport, EXPLICIT_BLOCK_LIMIT};
pub use sdp::{solve_sdp, Constraint, SdpOptions, SdpProblem, SdpSolution, SdpStatus, SymSparse};
pub use simplex::{solve_lp, LpProblem, LpRow, LpSolution, RowKind, DEGENERATE_LIMIT};
pub use theta_sdp::{theta_sdp, theta_sdp_with, SDP_VERTEX_CAP};

/// Simplex over exact rationals.
pub type ExactLp = LpProblem<num_rational::BigRational>;
/// Simplex over `f64`.
pub type FloatLp = LpProblem<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaVariant {
    Theta,
    ThetaPlus,
}

/// Which computation produced the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    Sdp,
    CayleyLp,
    Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Largest violation of the equality constraints.
    pub eq: f64,
    /// Largest violation of the edge inequalities (`θ+` only).
    pub ineq: f64,
    /// Smallest eigenvalue of `Z`.
    pub mineig: f64,
}

impl Residuals {
    pub fn within(&self, tol: f64) -> bool {
        self.eq <= tol && self.ineq <= tol && self.mineig >= -tol
    }
}

/// Group-invariant form `Z(u, v) = z(u ⊕ v)` of a Cayley certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantZ {
    pub m: u32,
    pub z: Vec<f64>,
    /// Exact values as `p/q` strings when the LP was solved over rationals.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<Vec<String>>,
}

/// Feasible `Z` for the `θ`/`θ+` program at value `lambda`.
///
/// `lambda` is an upper bound on the parameter (it is the value of a feasible
/// point, shifted by the eigenvalue deficit when needed); `primal`, when
/// present, is a lower bound from the other side of the duality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThetaCertificate {
    pub variant: ThetaVariant,
    pub method: CertMethod,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_exact: Option<String>,
    pub primal: Option<f64>,
    pub dual: f64,
    pub gap: f64,
    pub residuals: Residuals,
    pub graph_hash: String,
    #[serde(rename = "Z", skip_serializing_if = "Option::is_none", default)]
    pub z: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_invariant: Option<InvariantZ>,
}

/// Recomputes residuals of a dense `Z` against `g`.
pub fn dense_residuals(g: &Graph, variant: ThetaVariant, lambda: f64, z: &DMatrix<f64>) -> Result<Residuals> {
    let n = g.n();
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::Shape(format!("Z is {}x{}, graph has {n} vertices", z.nrows(), z.ncols())));
    }
    let mut eq = 0f64;
    let mut ineq = 0f64;
    for u in 0..n {
        eq = eq.max((z[(u, u)] - (lambda - 1.0)).abs());
        for v in 0..n {
            if u == v {
                continue;
            }
            eq = eq.max((z[(u, v)] - z[(v, u)]).abs());
            if g.has_edge(u, v) {
                if variant == ThetaVariant::ThetaPlus {
                    ineq = ineq.max(-1.0 - z[(u, v)]);
                }
            } else {
                eq = eq.max((z[(u, v)] + 1.0).abs());
            }
        }
    }
    Ok(Residuals { eq, ineq, mineig: min_eigenvalue(z) })
}

impl ThetaCertificate {
    pub fn dense_z(&self) -> Option<DMatrix<f64>> {
        let rows = self.z.as_ref()?;
        let n = rows.len();
        Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Re-verifies a dense certificate against `g` from the stored data only.
    pub fn verify(&self, g: &Graph, tol: f64) -> Result<Residuals> {
        if self.graph_hash != g.hash() {
            return Err(Error::Verification("graph hash does not match".into()));
        }
        let z = self.dense_z().ok_or_else(|| Error::Verification("certificate has no dense Z".into()))?;
        let r = dense_residuals(g, self.variant, self.lambda, &z)?;
        if !r.within(tol) {
            return Err(Error::Verification(format!("residuals {r:?} exceed {tol:e}")));
        }
        Ok(r)
    }

    /// Re-verifies an invariant certificate against `c` through its Walsh
    /// spectrum, and the dense form too when present.
    pub fn verify_cayley(&self, c: &CayleyZ2, tol: f64) -> Result<Residuals> {
        if self.graph_hash != c.hash() {
            return Err(Error::Verification("graph hash does not match".into()));
        }
        let inv = self.z_invariant.as_ref().ok_or_else(|| Error::Verification("no invariant Z".into()))?;
        let r = cayley_lp::invariant_residuals(c, self.variant, self.lambda, inv)?;
        if !r.within(tol) {
            return Err(Error::Verification(format!("residuals {r:?} exceed {tol:e}")));
        }
        if let Some(z) = self.dense_z() {
            let g = c.to_graph()?;
            let rd = dense_residuals(&g, self.variant, self.lambda, &z)?;
            if !rd.within(tol) {
                return Err(Error::Verification(format!("dense residuals {rd:?} exceed {tol:e}")));
            }
        }
        Ok(r)
    }
}

/// Values of the chain `α ≤ θ ≤ θ+ ≤ χ(Ḡ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SandwichReport {
    pub alpha: usize,
    pub alpha_exact: bool,
    pub theta: f64,
    pub theta_plus: f64,
    /// Upper end of the chromatic bracket of the complement.
    pub chi_complement: usize,
    pub chi_complement_exact: bool,
    pub holds: bool,
}

fn sandwich(g: &Graph, theta: f64, theta_plus: f64, budget: u64, tol: f64) -> SandwichReport {
    let a = crate::combinat::independence_number(g, budget);
    let chi = crate::combinat::chromatic_number(&g.complement(), budget);
    let holds = a.lower as f64 <= theta + tol && theta <= theta_plus + tol && theta_plus <= chi.upper as f64 + tol;
    SandwichReport {
        alpha: a.lower,
        alpha_exact: a.is_exact(),
        theta,
        theta_plus,
        chi_complement: chi.upper,
        chi_complement_exact: chi.is_exact(),
        holds,
    }
}

/// Computes the four parameters of `g` (θ values by the SDP) and checks the chain.
pub fn sandwich_check(g: &Graph, budget: u64, tol: f64) -> Result<SandwichReport> {
    let opts = SdpOptions::default();
    let t = theta_sdp(g, ThetaVariant::Theta, opts)?;
    let tp = theta_sdp(g, ThetaVariant::ThetaPlus, opts)?;
    Ok(sandwich(g, t.lambda, tp.lambda, budget, tol))
}

/// As [`sandwich_check`] with the θ values from the Cayley LP.
pub fn sandwich_check_cayley(c: &CayleyZ2, budget: u64, tol: f64) -> Result<SandwichReport> {
    let opts = CayleyLpOptions::default();
    let t = theta_cayley_lp(c, ThetaVariant::Theta, opts)?;
    let tp = theta_cayley_lp(c, ThetaVariant::ThetaPlus, opts)?;
    Ok(sandwich(&c.to_graph()?, t.certificate.lambda, tp.certificate.lambda, budget, tol))
}
