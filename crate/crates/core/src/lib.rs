//! Epistemic coarse-graining of classical dynamical systems.
//!
//! Observables induce partitions of a (sampled) state space. Dynamic
//! refinement of a partition under a map decides whether the partition is
//! generating; pairs of partitions are classified as compatible,
//! incompatible or complementary; partition algebras paste into
//! orthomodular propositional lattices; entropy diagnostics measure what a
//! non-generating partition misses.
//!
//! ```
//! use std::sync::Arc;
//! use coarsegrain::{partition::{Binning, Partition}, system::*};
//!
//! let space = Arc::new(SampleSpace::grid(1 << 12, vec![Topology::Circle]).unwrap());
//! let half = Partition::induce(&Observable::indicator(0, 0.5), &space, Binning::ExactValues).unwrap();
//! let r = coarsegrain::partition::dynamic_refinement(&half, &DynamicalMap::doubling(), 3).unwrap();
//! assert_eq!(r.cell_count_series, vec![2, 4, 8, 16]);
//! ```

pub mod entropy;
pub mod epistemic;
mod error;
pub mod lattice;
pub mod partition;
pub mod system;

pub use error::{Error, Result};
