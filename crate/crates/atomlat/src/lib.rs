//! Discrete, parameter-free learning over atomized semilattices.
//!
//! The library embeds sets of order relations (training examples, game
//! rules) into a growing semilattice model. Learning alternates trace
//! enforcement, Sparse Crossing of positive relations and trace-preserving
//! reduction; knowledge survives across batches as pinning terms. On top of
//! the engine sit problem encoders (bar images, Queens completion, IDX
//! data), memorizing baselines, multi-atomization voting, and the
//! compression-vs-error metrics, plus brute-force oracles for verification
//! at desk scale.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability and `src/cli.rs` for the command-line surface.

pub mod algebra;
pub mod bitset;
pub mod cli;
pub mod crossing;
pub mod error;
pub mod inference;
pub mod metrics;
pub mod oracle;
pub mod problems;
pub mod reduction;
pub mod trace;
pub mod trainer;

pub use algebra::{AlgebraState, AtomId, ConstantId, ElementRef, Relation, Sign, TermId};
pub use error::{Error, Result};
