//! State spaces, ontic states, dynamics and observables.

mod index;
mod map;
mod observable;
mod sample;
mod space;

pub use map::{Domain, DynamicalMap, Evaluator, BUILTIN_MAPS};
pub use observable::{EpistemicState, Observable};
pub use sample::{build_sample, SampleKind};
pub use space::{Point, SampleSpace, Topology, EPS_SPACE};

pub(crate) use space::stable_sum;
