//! Verifiers and oracles: oscillation estimation, strong/separate
//! continuity checks, the finite-coordinate continuity criterion,
//! nearly-open trace checking, and brute-force grid oracles.

pub mod checks;
pub mod oracle;
pub mod oscillation;
pub mod trace;

pub use checks::{
    escape_witness, continuity_box_check, continuity_neighborhood, finite_criterion_check, interior_rho,
    s_continuity_check, separate_continuity_check, ssc_check, FiniteCriterionResult, NetSpec,
    SContVerdict, SepReport, SscReport,
};
pub use oracle::{
    brute_force_oscillation, brute_force_set_distance, brute_force_set_distance_seq, GridSpec,
};
pub use oscillation::{oscillation_estimate, OscVerdict, OscillationEstimate, WitnessPair};
pub use trace::{
    nearly_open_trace_check, radii_extension, CoordRegion, ProductRegion, TraceDescription,
    TraceFamily, TraceMode, TraceStatus, TraceVerdict,
};
