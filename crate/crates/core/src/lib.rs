//! Laboratory for k-monotonicity of Boolean functions on the hypercube.
//!
//! A function `f: {0,1}^n -> {0,1}` is k-monotone when no ascending sequence
//! `x_1 < x_2 < ... < x_{k+1}` has `f(x_1) = 1` and alternating values. This
//! crate provides the hypercube primitives, function oracles, the balanced
//! blocks and hidden-block constructions, alternation analysis with certified
//! distance bounds, chain testers, and exact/Monte Carlo rejection estimates.
//!
//! Bit conventions used throughout:
//!
//! * coordinate 1 is the least significant bit of a point's integer encoding;
//! * bit strings are written most significant first, so `"01"` (n = 2) is the
//!   point whose coordinate 1 is set;
//! * truth tables are indexed by that integer encoding.

pub mod analysis;
pub mod boolfn;
pub mod error;
pub mod exec;
pub mod generators;
pub mod hypercube;
pub mod kmono;
pub mod numeric;
pub mod testers;

pub use boolfn::{FunctionSpec, LevelProfile, Permutation, QueryLedger, TruthTable, TwoPart};
pub use error::{KmError, Result};
pub use exec::{Execution, KmRng};
pub use generators::{BlockPartition, HardFunctionParams};
pub use hypercube::{Chain, ChainDecomposition, Comparison, Point};
pub use kmono::{MatchingCertificate, ViolationTuple};
pub use numeric::DyadicFraction;

/// Version string embedded in every generated artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest dimension for which the whole cube is ever materialized.
pub const MAX_MATERIALIZED_DIM: usize = 24;

/// Largest dimension accepted by oracle-only operations.
pub const MAX_ORACLE_DIM: usize = 1 << 20;
