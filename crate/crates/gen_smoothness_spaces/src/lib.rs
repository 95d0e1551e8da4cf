//! Generalized smoothness spaces on the periodic lattice.
//!
//! Smoothness is measured against a scaling function kappa rather than a
//! fixed power: the Besov scale weights Littlewood-Paley blocks by
//! kappa(N^{-j})^{-s}, the Triebel scale aggregates the same blocks
//! pointwise before taking L_p, and the generator-adapted variants replace
//! the weights with powers of the Bessel-type multiplier (1 - psi)^s built
//! from a reference Levy symbol.  A fourth route avoids the frequency side
//! entirely and integrates m-th order differences against dt / (t kappa(t)^qs).
//!
//! All four definitions describe the same space when kappa is a scaling
//! function; [`audit`] measures the equivalence constants empirically on a
//! reproducible corpus and checks they are stable under grid refinement and
//! a change of block base N.
//!
//! Layout:
//! - [`partition`]: smooth dyadic-type partitions of unity on the lattice,
//!   exact to a rounding by construction.
//! - [`norms`]: the four norm families over a shared [`NormContext`].
//! - [`audit`]: equivalence-ratio intervals, embedding constants, and
//!   weight-sum geometry checks.

pub mod audit;
pub mod error;
pub mod norms;
pub mod partition;

pub use audit::{
    besov_ratio_interval, corpus_fields, difference_ratio_interval, embedding_monotonicity,
    interval_drift, partition_reports, triebel_ratio_interval, weight_sum_geometric,
    RatioInterval,
};
pub use error::SpaceError;
pub use norms::{
    besov_norm, difference_norm, space_time_norm, triebel_norm, BesovVariant, DifferenceVariant,
    NormContext, NormReport, TriebelVariant,
};
pub use partition::{build_partition, LPPartition};
