//! Dense simulation of witnesses, measurements and zero-error protocols.
//!
//! Operators are `nalgebra` complex matrices in double precision. Indices of
//! a bipartite operator on `C^da ⊗ C^db` follow `a * db + b`.

mod measure;
mod ops;
mod protocol;
mod witness;

pub use measure::{
    hjw_state_and_measurements, orthogonality_measurement, random_flat_vector, rsp_batch, rsp_correction, rsp_protocol, Hjw, OrthMeasurement,
    RspBatch, RspOutcome, RspReport, RspSummary,
};
pub use ops::{
    c, check_state, dft_matrix, frobenius, hermitian_residual, kron, max_entangled, max_entangled_vector, min_eig, outer, partial_trace,
    root_of_unity, spectral_map, support_projector, trace_distance, CMatrixJson, Side, C64, RANK_CUT,
};
pub use protocol::{
    hk_clique_lists, random_maximal_clique, simulate_channel_protocol, simulate_channel_protocol_hk, simulate_source_protocol, Adversary,
    ChannelReport, ChannelSetup, CliqueLists, Permutations, SimFailure, SourceReport, MAX_MESSAGES, ZERO_ERROR_SLACK,
};
pub use witness::{
    chrom_witness_from_coloring, chrom_witness_from_flat_rep, eta_witness_from_map, indep_witness_from_set, orth_rep_hk,
    verify_chrom_witness, verify_eta_witness, verify_indep_witness, ChromJson, ChromWitness, ConstraintClass, EtaJson, EtaWitness,
    FamilyEntry, IndepJson, IndepWitness, OrthRep, WitnessReport,
};
pub use crate::linalg::{CMatrix, CVector};
