//! Laboratory for zero-error source and channel coding on
//! quarter-orthogonality graphs.
//!
//! Modules:
//! - [`graphs`]: simple graphs, Cayley graphs over `Z_2^m`, strong products, homomorphism search.
//! - [`combinat`]: exact `α`, `ω`, `χ` and explicit independent sets and cliques.
//! - [`hadamard`]: Sylvester, Paley and Kronecker Hadamard matrices.
//! - [`relax`]: Lovász `θ` and `θ+` via a dense SDP and a Walsh-reduced LP, with certificates.
//! - [`polybound`]: multilinear polynomials over `Z_p` and rank bounds on independence numbers.
//! - [`qsim`]: dense state simulation of witnesses, measurements and protocols.
//! - [`lab`]: bound formulas, reproducibility reports and audits.

pub mod error;
pub mod graphs;
pub mod hash;
pub mod scalar;

pub use error::{Error, Result};
pub use graphs::{CayleyZ2, Graph};
pub mod combinat;
pub mod hadamard;
pub mod lab;
pub mod linalg;
pub mod polybound;
pub mod qsim;
pub mod relax;
