//! The Meka–Zuckerman generator, its extension with per-bucket CNF foolers
//! and a global `2k`-wise XOR, parameter derivation and seed layout.

pub mod cnf;
pub mod generate;
pub mod layout;
pub mod params;

pub use cnf::{cnf_fooler_draw, CnfFoolerKind, CnfFoolerSpec};
pub use generate::{mz_generate, our_generate, our_generate_without_global, Generator};
pub use layout::{mz_layout, seed_layout, seed_length, SeedLayout, Segment, SegmentKind};
pub use params::{default_r_cnf, derive_params, Constants, GeneratorParams, LabSettings, ParamSource};
