//! Multilinear polynomials over `Z_p`, the mod-`p^l` weight indicator, the
//! polynomial representation of `H_k`, and rank bounds on `α`.

mod poly;
mod rank;

pub use poly::{bbr_polynomial, elementary_symmetric, MultilinearPolyZp, PolyJson, TermJson, MAX_VARS};
pub use rank::{
    alon_bound_smoke, binary_entropy, binomial_sum, dimension_bound, rank_certificate, rank_mod_p, representation_for_hk, AlonSmoke,
    DimensionBound, ProbeResult, RankBoundCertificate, Representation, EXHAUSTIVE_PAIRS,
};
