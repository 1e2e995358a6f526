use std::fmt;
use std::sync::Arc;

use super::space::SampleSpace;
use crate::error::{Error, Result};

/// Real-valued function on the state space.
#[derive(Clone)]
pub struct Observable {
    name: String,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).finish()
    }
}

impl Observable {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// Projection onto coordinate `c`.
    pub fn coordinate(c: usize) -> Self {
        Self::new(format!("x{c}"), move |x| x[c])
    }

    /// `1` where `x[c] >= threshold`, else `0`.
    pub fn indicator(c: usize, threshold: f64) -> Self {
        Self::new(format!("[x{c}>={threshold}]"), move |x| {
            if x[c] >= threshold {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn constant(value: f64) -> Self {
        Self::new(format!("const({value})"), move |_| value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Values on every sample point, rejecting non-finite results.
    pub fn values(&self, space: &SampleSpace) -> Result<Vec<f64>> {
        space
            .points()
            .enumerate()
            .map(|(i, x)| {
                let v = self.eval(x);
                if v.is_finite() {
                    // -0.0 and 0.0 are the same measurement
                    Ok(if v == 0.0 { 0.0 } else { v })
                } else {
                    Err(Error::NonFinite { index: i })
                }
            })
            .collect()
    }
}

/// A subset of the sample space, as sorted point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpistemicState {
    members: Vec<usize>,
}

impl EpistemicState {
    pub fn new(space_len: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= space_len {
                return Err(Error::InvalidState(format!(
                    "index {last} out of range for {space_len} points"
                )));
            }
        }
        Ok(EpistemicState { members })
    }

    pub fn empty() -> Self {
        EpistemicState {
            members: Vec::new(),
        }
    }

    pub fn full(space_len: usize) -> Self {
        EpistemicState {
            members: (0..space_len).collect(),
        }
    }

    pub fn singleton(i: usize) -> Self {
        EpistemicState { members: vec![i] }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}
