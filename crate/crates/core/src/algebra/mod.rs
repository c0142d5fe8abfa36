//! Finite-field arithmetic and the limited-independence primitives built on
//! it: `k`-wise uniform sign strings and `r`-wise uniform hashes.

pub mod gf;
pub mod hash;
pub mod kwise;
pub mod seed;

pub use gf::{degree_for, gf_inv, gf_mul, Field, FieldElement};
pub use hash::{hash_eval, HashFunction, HashSpec};
pub use kwise::{kwise_bits, KWiseSpec, KWiseString};
pub use seed::SeedStream;
