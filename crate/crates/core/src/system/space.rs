use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{self, NearestIndex};
use crate::error::{Error, Result};

/// Absolute per-coordinate tolerance for point identity and inverse round trips.
pub const EPS_SPACE: f64 = 1e-12;

/// Coordinate topology. Circle coordinates live in `[0, 1)` and wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    Circle,
}

/// An ontic state: a point of the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

/// Finite sample standing in for a continuous state space, with an
/// empirical measure given by the weights.
///
/// `resolution` is the per-coordinate extent represented by a single sample
/// point; it pads cell diameters and sets the default generating tolerance.
/// `snap_tolerance` bounds how far a mapped point may sit from its nearest
/// sample point before it counts as having left the sampled region.
#[derive(Clone)]
pub struct SampleSpace {
    dimension: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    topology: Vec<Topology>,
    resolution: Vec<f64>,
    snap_tolerance: f64,
    index: NearestIndex,
}

impl fmt::Debug for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampleSpace")
            .field("dimension", &self.dimension)
            .field("len", &self.len())
            .field("topology", &self.topology)
            .field("resolution", &self.resolution)
            .field("snap_tolerance", &self.snap_tolerance)
            .finish()
    }
}

impl PartialEq for SampleSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension
            && self.coords == other.coords
            && self.weights == other.weights
            && self.topology == other.topology
    }
}

/// Neumaier-compensated sum in index order.
pub(crate) fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl SampleSpace {
    /// Equispaced grid `i / per_dim` on `[0, 1)^d`, uniform weights.
    pub fn grid(per_dim: usize, topology: Vec<Topology>) -> Result<Self> {
        let dimension = topology.len();
        if dimension == 0 {
            return Err(Error::InvalidSample("dimension must be positive".into()));
        }
        let total = per_dim
            .checked_pow(dimension as u32)
            .ok_or_else(|| Error::InvalidSample("grid too large".into()))?;
        if total < 2 {
            return Err(Error::SizeTooSmall { size: total });
        }
        let step = 1.0 / per_dim as f64;
        let mut coords = Vec::with_capacity(total * dimension);
        let mut digits = vec![0usize; dimension];
        for _ in 0..total {
            coords.extend(digits.iter().map(|&i| i as f64 * step));
            for c in (0..dimension).rev() {
                digits[c] += 1;
                if digits[c] < per_dim {
                    break;
                }
                digits[c] = 0;
            }
        }
        Self::assemble(
            dimension,
            coords,
            None,
            topology,
            vec![step; dimension],
            2.0 * step,
        )
    }

    /// Cell-centred square grid on `[-1, 1)^2` restricted to the closed unit
    /// disk; a rotation-invariant surrogate for the phase plane.
    pub fn disk_grid(per_dim: usize) -> Result<Self> {
        if per_dim < 2 {
            return Err(Error::SizeTooSmall {
                size: per_dim * per_dim,
            });
        }
        let step = 2.0 / per_dim as f64;
        let mut coords = Vec::new();
        for i in 0..per_dim {
            let x = -1.0 + (i as f64 + 0.5) * step;
            for j in 0..per_dim {
                let y = -1.0 + (j as f64 + 0.5) * step;
                if x * x + y * y <= 1.0 {
                    coords.push(x);
                    coords.push(y);
                }
            }
        }
        Self::assemble(
            2,
            coords,
            None,
            vec![Topology::Line; 2],
            vec![step; 2],
            2.0 * step,
        )
    }

    /// `n` abstract, pairwise distinguishable points at integer coordinates
    /// `0..n`. Resolution is zero: a cell is only "small" when it is a
    /// singleton, and images must land exactly on a point.
    pub fn discrete(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::SizeTooSmall { size: n });
        }
        let coords = (0..n).map(|i| i as f64).collect();
        Self::assemble(
            1,
            coords,
            None,
            vec![Topology::Line],
            vec![0.0],
            EPS_SPACE,
        )
    }

    /// Arbitrary point cloud. Weights default to uniform; resolution defaults
    /// to the mean spacing `range / n^(1/d)` per coordinate; the snap tolerance
    /// is twice the largest nearest-neighbour distance.
    pub fn from_points(
        dimension: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        topology: Vec<Topology>,
        resolution: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::point_cloud(dimension, coords, weights, topology, resolution, false)
    }

    /// Like [`SampleSpace::from_points`], but points within [`EPS_SPACE`] of
    /// each other are merged into the lowest-indexed one, which inherits
    /// their weight. Used for generated samples, where a million random
    /// points almost surely contain a pair closer than `EPS_SPACE`.
    pub fn from_points_merging(
        dimension: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        topology: Vec<Topology>,
        resolution: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::point_cloud(dimension, coords, weights, topology, resolution, true)
    }

    fn merge_duplicates(
        space: SampleSpace,
        nn: &[(usize, usize, f64)],
        resolution_given: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = space.len();
        let mut uf = crate::partition::UnionFind::new(n);
        for &(p, q, d) in nn {
            if d <= EPS_SPACE {
                uf.union(p, q);
            }
        }
        let mut keeper = vec![usize::MAX; n];
        let mut kept: Vec<usize> = Vec::new();
        for p in 0..n {
            let root = uf.find(p);
            if keeper[root] == usize::MAX {
                keeper[root] = kept.len();
                kept.push(p);
            }
        }
        let mut weights = vec![0.0; kept.len()];
        for p in 0..n {
            weights[keeper[uf.find(p)]] += space.weights[p];
        }
        let d = space.dimension;
        let coords = kept.iter().flat_map(|&p| space.point(p).to_vec()).collect();
        Self::point_cloud(d, coords, Some(weights), space.topology, resolution_given, true)
    }

    fn point_cloud(
        dimension: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        topology: Vec<Topology>,
        resolution: Option<Vec<f64>>,
        merge: bool,
    ) -> Result<Self> {
        let resolution_given = resolution.clone();
        if dimension == 0 || !coords.len().is_multiple_of(dimension) {
            return Err(Error::InvalidSample(
                "coordinate buffer does not match dimension".into(),
            ));
        }
        if topology.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                actual: topology.len(),
            });
        }
        let n = coords.len() / dimension;
        if n < 2 {
            return Err(Error::SizeTooSmall { size: n });
        }
        let resolution = match resolution {
            Some(r) => {
                if r.len() != dimension {
                    return Err(Error::DimensionMismatch {
                        expected: dimension,
                        actual: r.len(),
                    });
                }
                r
            }
            None => (0..dimension)
                .map(|c| {
                    let range = if topology[c] == Topology::Circle {
                        1.0
                    } else {
                        let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| {
                            let x = coords[p * dimension + c];
                            (acc.0.min(x), acc.1.max(x))
                        });
                        hi - lo
                    };
                    range / (n as f64).powf(1.0 / dimension as f64)
                })
                .collect(),
        };
        let mut space = Self::assemble(dimension, coords, weights, topology, resolution, 0.0)?;
        let nn: Vec<(usize, usize, f64)> = (0..n)
            .into_par_iter()
            .map(|p| {
                let (q, d) = space
                    .index
                    .nearest(
                        &space.coords,
                        &space.topology,
                        space.point(p),
                        Some(p),
                        f64::INFINITY,
                    )
                    .expect("at least two points");
                (p, q, d)
            })
            .collect();
        if let Some(&(p, q, _)) = nn.iter().find(|(_, _, d)| *d <= EPS_SPACE) {
            if merge {
                return Self::merge_duplicates(space, &nn, resolution_given);
            }
            return Err(Error::DuplicatePoints {
                first: p.min(q),
                second: p.max(q),
            });
        }
        let max_nn = nn.iter().map(|(_, _, d)| *d).fold(0.0, f64::max);
        space.snap_tolerance = 2.0 * max_nn;
        Ok(space)
    }

    fn assemble(
        dimension: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        topology: Vec<Topology>,
        resolution: Vec<f64>,
        snap_tolerance: f64,
    ) -> Result<Self> {
        let n = coords.len() / dimension;
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                index: i / dimension,
            });
        }
        for (i, x) in coords.iter().enumerate() {
            if topology[i % dimension] == Topology::Circle && !(0.0..1.0).contains(x) {
                return Err(Error::InvalidSample(format!(
                    "circle coordinate of point {} outside [0, 1)",
                    i / dimension
                )));
            }
        }
        let weights = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::InvalidSample(format!(
                        "{} weights for {} points",
                        w.len(),
                        n
                    )));
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidSample("weights must be nonnegative".into()));
                }
                let total = stable_sum(w.iter().copied());
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidSample(format!(
                        "weights sum to {total}, not 1"
                    )));
                }
                w
            }
            None => vec![1.0 / n as f64; n],
        };
        let index = NearestIndex::build(dimension, &coords, &topology);
        Ok(SampleSpace {
            dimension,
            coords,
            weights,
            topology,
            resolution,
            snap_tolerance,
            index,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dimension)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn topology(&self) -> &[Topology] {
        &self.topology
    }

    pub fn resolution(&self) -> &[f64] {
        &self.resolution
    }

    pub fn snap_tolerance(&self) -> f64 {
        self.snap_tolerance
    }

    /// Default generating tolerance: twice the coarsest per-point resolution.
    pub fn generating_tolerance(&self) -> f64 {
        2.0 * self.resolution.iter().copied().fold(0.0, f64::max)
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        index::distance(a, b, &self.topology)
    }

    /// Nearest sample point to `q` within the snap tolerance.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        self.index.nearest(
            &self.coords,
            &self.topology,
            q,
            None,
            self.snap_tolerance.max(EPS_SPACE),
        )
    }

    /// Total weight of a set of point indices.
    pub fn measure(&self, members: impl IntoIterator<Item = usize>) -> f64 {
        stable_sum(members.into_iter().map(|i| self.weights[i]))
    }
}
