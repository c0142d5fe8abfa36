//! Exhaustive oracles and desk-scale experiments.

pub mod anticonc;
pub mod edges;
pub mod prob;
pub mod seeds;
pub mod soft;
pub mod suite;

pub use anticonc::{
    binomial_prefix, lo_bound, lo_boundary_fraction, lo_lowerbound_search, lo_surface_fraction, lower_bound_k,
    semi_thin_check, semi_thin_fraction, BoundaryReport, LowerBoundResult, SemiThinReport,
};
pub use edges::{
    average_sensitivity, boundary_edge_census, cap_edge_census, cap_edge_census_sets, halfspace_orientation,
    infer_orientation, kane_bound, kane_u, CapCounts, EdgeCensus, NuFractions, SensitivityReport, EDGE_CAP,
};
pub use prob::{
    discrepancy, exact_orthant_prob, generator_orthant_prob, Estimate, GeneratorEstimate, LabRecord, LabReport,
    SeedMode, SEED_BUDGET,
};
pub use seeds::SeedTables;
pub use soft::{
    mollifier_discrepancy, soft_to_hard, standardization_disagreement, Disagreement, Family, MollifierReport,
    SoftToHardReport,
};
