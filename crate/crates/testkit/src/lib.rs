//! Test-only helpers shared across the workspace: seeded random instance
//! generators and naive reference oracles.
//!
//! Everything in here is deliberately slow and literal. The oracles apply
//! one rule at a time until nothing changes and never share code with the
//! production paths they are used to check.

pub mod gen;
pub mod oracle;

pub use gen::{eval_cq_ground, random_abox, random_cq, random_ontology, OntoGenConfig};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The workspace-standard deterministic RNG.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
