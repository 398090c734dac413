//! Quantitative checks: hypergeometric tails, the overlap bracket, the
//! exposure statistic `V(Z)`, exact lattice-path rejection probabilities and
//! Monte Carlo estimates.

pub mod facts;
pub mod hypergeom;
pub mod lattice;
pub mod montecarlo;
pub mod overlap;

pub use facts::{max_level_mass, middle_mass, middle_mass_exact};
pub use hypergeom::{chernoff_check, hypergeom_pmf, hypergeom_tail, ChernoffCheck, Hypergeometric};
pub use lattice::{
    exact_chain_rejection_prob, exact_table_rejection_prob, exact_two_part_rejection, sample_lattice_path, v_of_chain,
    ExactRejection, LatticePath, VEntry, VStat,
};
pub use montecarlo::{mc_rejection_estimate, wilson_interval, RejectionEstimate};
pub use overlap::{expected_overlap, overlap_at, Overlap};
