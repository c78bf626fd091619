//! Reconstructions of the classical examples with their quantitative
//! signatures. Every headline number can be re-derived from the stored
//! witnesses by direct norm evaluation.

mod garling;
mod hilbert;
mod kt;
mod lplq;
mod teta;
mod vp;

pub use garling::{garling_blocks_pow, garling_l1_escape, garling_l1_escape_from, Blocks, EscapeStage, GarlingEscapeReport, EPSILON, TUPLE_CAP};
pub use hilbert::{hilbert_block_report, HilbertBlockBasis, HilbertBlockReport, PartialSumBound, MAX_BLOCK};
pub use kt::{
    c_sr, c_sr_with_terms, kt_greedy_space, kt_not_qg_sequence, kt_not_qg_witness, kt_qg_bound_check, kt_qg_samples,
    kt_witness_space, partial_sum_norm, power_sum, weak_lorentz_norm, CsrEstimate, KtQgReport, KtQgViolation,
    KtWitness, Run, CSR_RANGE, MATERIALIZE_CAP, R_SCAN,
};
pub use lplq::{lplq_succ_not_lucc_report, LpLqBasis, LpLqReport, LpLqRow};
pub use teta::{dyadic_schedule, lorentz_1q, t_eta, t_eta_check, t_eta_samples, t_eta_witness_search, TEtaReport, TEtaWitness, WITNESS_SUPPORT};
pub use vp::{alternating_norm, vp_alternating_report, VpAlternatingReport, VpRow};

/// Example names understood by the command-line front end.
pub const EXAMPLE_NAMES: [&str; 7] = ["vp-alternating", "lplq", "hilbert", "kt-not-qg", "kt-qg-bound", "garling-escape", "t-eta"];
