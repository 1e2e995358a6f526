//! The partition calculus over a sampled state space.
//!
//! A [`Partition`] labels every sample point with a cell id. Cell ids are
//! canonical: cells are numbered in order of their first member, so two
//! partitions of the same space have the same cells exactly when their label
//! vectors are equal.

mod algebra;
mod coarsen;
mod json;
mod refine;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{EpistemicState, Observable, SampleSpace, Topology};

pub use algebra::{algebra, PartitionAlgebra, N_ALG};
pub use coarsen::{common_coarsening, UnionFind};
pub use json::{CellDoc, PartitionDoc};
pub use refine::{
    dynamic_refinement, dynamic_refinement_with, generating_diagnostic,
    generating_diagnostic_with, predecessor_table, preimage, successor_table, Direction,
    RefinementResult, Verdict, CONTRACTION_RATIO, STALL_TOLERANCE, STALL_WINDOW,
};
pub(crate) use refine::pull_back;

/// How an observable's values are grouped into cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// One cell per distinct value.
    ExactValues,
    /// `k` half-open bins of equal width over `[min f, max f)`; the maximum
    /// falls into the last bin.
    UniformBins(usize),
}

/// Position of two partitions in the refinement order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    FirstRefinesSecond,
    SecondRefinesFirst,
    Incomparable,
}

/// Mutually exclusive, jointly exhaustive cells over a [`SampleSpace`].
#[derive(Clone)]
pub struct Partition {
    space: Arc<SampleSpace>,
    labels: Vec<u32>,
    offsets: Vec<usize>,
    members: Vec<u32>,
    cell_labels: Vec<Option<String>>,
    name: Option<String>,
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Partition")
            .field("name", &self.name)
            .field("points", &self.labels.len())
            .field("cells", &self.len())
            .finish()
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other) && self.labels == other.labels
    }
}

impl Eq for Partition {}

/// Renumber raw keys in order of first appearance. Returns the canonical
/// labels and, per new id, the index of its first point.
fn canonicalize(raw: impl ExactSizeIterator<Item = u64>, dense_bound: Option<u64>) -> (Vec<u32>, Vec<usize>) {
    let n = raw.len();
    let mut labels = Vec::with_capacity(n);
    let mut firsts = Vec::new();
    match dense_bound {
        Some(bound) if bound <= (8 * n as u64).max(1 << 16) => {
            let mut table = vec![u32::MAX; bound as usize];
            for (i, key) in raw.enumerate() {
                let slot = &mut table[key as usize];
                if *slot == u32::MAX {
                    *slot = firsts.len() as u32;
                    firsts.push(i);
                }
                labels.push(*slot);
            }
        }
        _ => {
            let mut table: HashMap<u64, u32> = HashMap::new();
            for (i, key) in raw.enumerate() {
                let next = firsts.len() as u32;
                let id = *table.entry(key).or_insert_with(|| {
                    firsts.push(i);
                    next
                });
                labels.push(id);
            }
        }
    }
    (labels, firsts)
}

impl Partition {
    fn assemble(
        space: Arc<SampleSpace>,
        labels: Vec<u32>,
        cells: usize,
        cell_labels: Vec<Option<String>>,
    ) -> Self {
        let mut offsets = vec![0usize; cells + 1];
        for &l in &labels {
            offsets[l as usize + 1] += 1;
        }
        for c in 0..cells {
            offsets[c + 1] += offsets[c];
        }
        let mut fill = offsets[..cells].to_vec();
        let mut members = vec![0u32; labels.len()];
        for (i, &l) in labels.iter().enumerate() {
            members[fill[l as usize]] = i as u32;
            fill[l as usize] += 1;
        }
        Partition {
            space,
            labels,
            offsets,
            members,
            cell_labels,
            name: None,
        }
    }

    /// Build from arbitrary per-point keys; `label_of(first_point)` names the
    /// cell that point opens.
    fn from_keys(
        space: &Arc<SampleSpace>,
        keys: impl ExactSizeIterator<Item = u64>,
        dense_bound: Option<u64>,
        mut label_of: impl FnMut(usize) -> Option<String>,
    ) -> Self {
        let (labels, firsts) = canonicalize(keys, dense_bound);
        let cell_labels = firsts.iter().map(|&i| label_of(i)).collect();
        Self::assemble(space.clone(), labels, firsts.len(), cell_labels)
    }

    /// Partition from one label per point. Equal labels share a cell.
    pub fn from_labels(space: &Arc<SampleSpace>, labels: &[usize]) -> Result<Self> {
        if labels.len() != space.len() {
            return Err(Error::InvalidPartition(format!(
                "{} labels for {} points",
                labels.len(),
                space.len()
            )));
        }
        let bound = labels.iter().max().map(|m| (*m as u64).saturating_add(1));
        Ok(Self::from_keys(space, labels.iter().map(|&l| l as u64), bound, |_| None))
    }

    /// Partition from explicit cells, checked to be nonempty, mutually
    /// exclusive and jointly exhaustive.
    pub fn from_cells(
        space: &Arc<SampleSpace>,
        cells: Vec<(Vec<usize>, Option<String>)>,
    ) -> Result<Self> {
        let n = space.len();
        let mut owner = vec![u32::MAX; n];
        for (c, (members, _)) in cells.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidPartition(format!("cell {c} is empty")));
            }
            for &i in members {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "cell {c} references point {i} of {n}"
                    )));
                }
                if owner[i] != u32::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "point {i} lies in cells {} and {c}",
                        owner[i]
                    )));
                }
                owner[i] = c as u32;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(Error::InvalidPartition(format!("point {i} is in no cell")));
        }
        let names: Vec<Option<String>> = cells.into_iter().map(|(_, l)| l).collect();
        Ok(Self::from_keys(
            space,
            owner.iter().map(|&o| o as u64),
            Some(names.len() as u64),
            |i| names[owner[i] as usize].clone(),
        ))
    }

    /// One cell covering the whole space.
    pub fn trivial(space: &Arc<SampleSpace>) -> Self {
        Self::assemble(
            space.clone(),
            vec![0; space.len()],
            1,
            vec![Some("X".into())],
        )
    }

    /// Every point in its own cell.
    pub fn identity(space: &Arc<SampleSpace>) -> Self {
        let n = space.len();
        Self::assemble(space.clone(), (0..n as u32).collect(), n, vec![None; n])
    }

    /// Partition induced by the level sets (or value bins) of an observable.
    pub fn induce(obs: &Observable, space: &Arc<SampleSpace>, binning: Binning) -> Result<Self> {
        let values = obs.values(space)?;
        match binning {
            Binning::ExactValues => Ok(Self::from_keys(
                space,
                values.iter().map(|v| v.to_bits()),
                None,
                |i| Some(format!("{}={}", obs.name(), values[i])),
            )),
            Binning::UniformBins(k) => {
                if k == 0 {
                    return Err(Error::InvalidParameter("bin count must be >= 1".into()));
                }
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let width = (hi - lo) / k as f64;
                if !(width > 0.0) {
                    return Ok(Self::trivial(space).with_name(obs.name()));
                }
                let bin = |v: f64| (((v - lo) / width).floor() as usize).min(k - 1);
                Ok(Self::from_keys(
                    space,
                    values.iter().map(|&v| bin(v) as u64),
                    Some(k as u64),
                    |i| {
                        let b = bin(values[i]) as f64;
                        Some(format!("[{},{})", lo + b * width, lo + (b + 1.0) * width))
                    },
                ))
            }
        }
    }

    /// Intervals of coordinate `coord` cut at the sorted `boundaries`:
    /// `(-inf, b0), [b0, b1), …, [b_last, inf)`; empty intervals are dropped.
    pub fn from_boundaries(
        space: &Arc<SampleSpace>,
        coord: usize,
        boundaries: &[f64],
    ) -> Result<Self> {
        if coord >= space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                actual: coord + 1,
            });
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("boundaries must be finite".into()));
        }
        let mut cuts = boundaries.to_vec();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let slot = |x: f64| cuts.partition_point(|b| *b <= x);
        let edge = |s: usize| -> String {
            let lo = if s == 0 { "-inf".into() } else { cuts[s - 1].to_string() };
            let hi = if s == cuts.len() { "inf".into() } else { cuts[s].to_string() };
            format!("[{lo},{hi})")
        };
        Ok(Self::from_keys(
            space,
            space.points().map(|p| slot(p[coord]) as u64),
            Some(cuts.len() as u64 + 1),
            |i| Some(edge(slot(space.point(i)[coord]))),
        ))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn same_space(&self, other: &Partition) -> bool {
        Arc::ptr_eq(&self.space, &other.space)
    }

    pub(crate) fn check_space(&self, other: &Partition) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn cell_of(&self, point: usize) -> usize {
        self.labels[point] as usize
    }

    pub fn cell(&self, id: usize) -> &[u32] {
        &self.members[self.offsets[id]..self.offsets[id + 1]]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |c| self.cell(c))
    }

    pub fn cell_size(&self, id: usize) -> usize {
        self.offsets[id + 1] - self.offsets[id]
    }

    pub fn cell_label(&self, id: usize) -> Option<&str> {
        self.cell_labels[id].as_deref()
    }

    /// Cell label, or `A{id}` when the cell carries none.
    pub fn display_label(&self, id: usize) -> String {
        self.cell_label(id)
            .map(str::to_owned)
            .unwrap_or_else(|| format!("A{id}"))
    }

    pub fn cell_state(&self, id: usize) -> EpistemicState {
        EpistemicState::new(self.space.len(), self.cell(id).iter().map(|&i| i as usize))
            .expect("cell members are valid indices")
    }

    pub fn cell_measure(&self, id: usize) -> f64 {
        self.space.measure(self.cell(id).iter().map(|&i| i as usize))
    }

    pub fn is_trivial(&self) -> bool {
        self.len() == 1
    }

    pub fn is_identity(&self) -> bool {
        self.len() == self.space.len()
    }

    /// Product `P ∨ Q`: all nonempty pairwise intersections of cells.
    pub fn product(&self, other: &Partition) -> Result<Partition> {
        self.check_space(other)?;
        let nb = other.len() as u64;
        let both_labeled = self.cell_labels.iter().all(Option::is_some)
            && other.cell_labels.iter().all(Option::is_some)
            && self.len() * other.len() <= 1 << 16;
        Ok(Self::from_keys(
            &self.space,
            self.labels
                .iter()
                .zip(&other.labels)
                .map(|(&a, &b)| a as u64 * nb + b as u64),
            Some(self.len() as u64 * nb),
            |i| {
                both_labeled.then(|| {
                    format!(
                        "{}∩{}",
                        self.display_label(self.cell_of(i)),
                        other.display_label(other.cell_of(i))
                    )
                })
            },
        ))
    }

    /// Unlabeled product used inside refinement loops.
    pub(crate) fn product_unlabeled(&self, other: &Partition) -> Partition {
        let nb = other.len() as u64;
        Self::from_keys(
            &self.space,
            self.labels
                .iter()
                .zip(&other.labels)
                .map(|(&a, &b)| a as u64 * nb + b as u64),
            Some(self.len() as u64 * nb),
            |_| None,
        )
    }

    /// Whether every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        self.check_space(coarser)?;
        let mut image = vec![u32::MAX; self.len()];
        for (&a, &b) in self.labels.iter().zip(&coarser.labels) {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            } else if *slot != b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Position of `self` relative to `other` in the refinement order.
    pub fn compare(&self, other: &Partition) -> Result<Relation> {
        self.check_space(other)?;
        if self.labels == other.labels {
            return Ok(Relation::Equal);
        }
        Ok(match (self.refines(other)?, other.refines(self)?) {
            (true, _) => Relation::FirstRefinesSecond,
            (_, true) => Relation::SecondRefinesFirst,
            _ => Relation::Incomparable,
        })
    }

    /// Whether `state` is a union of cells of this partition.
    pub fn is_union_of_cells(&self, state: &EpistemicState) -> Result<bool> {
        if state.members().last().is_some_and(|&i| i >= self.space.len()) {
            return Err(Error::SpaceMismatch);
        }
        let mut hits = vec![0usize; self.len()];
        for &i in state.members() {
            hits[self.labels[i] as usize] += 1;
        }
        Ok(hits
            .iter()
            .enumerate()
            .all(|(c, &h)| h == 0 || h == self.cell_size(c)))
    }

    /// Per-cell diameter in the sup metric, each coordinate extent padded by
    /// the per-point resolution (circle coordinates use the shortest covering
    /// arc, capped at one full turn).
    pub fn cell_diameters(&self) -> Vec<f64> {
        let space = &*self.space;
        let dim = space.dimension();
        (0..self.len())
            .into_par_iter()
            .map(|c| {
                let cell = self.cell(c);
                let mut diameter: f64 = 0.0;
                let mut buf: Vec<f64> = Vec::new();
                for k in 0..dim {
                    let res = space.resolution()[k];
                    let extent = match space.topology()[k] {
                        Topology::Line => {
                            let (lo, hi) = cell.iter().fold(
                                (f64::INFINITY, f64::NEG_INFINITY),
                                |(lo, hi), &i| {
                                    let x = space.point(i as usize)[k];
                                    (lo.min(x), hi.max(x))
                                },
                            );
                            hi - lo + res
                        }
                        Topology::Circle => {
                            buf.clear();
                            buf.extend(cell.iter().map(|&i| space.point(i as usize)[k]));
                            buf.sort_unstable_by(f64::total_cmp);
                            let wrap_gap = buf[0] + 1.0 - buf[buf.len() - 1];
                            let gap = buf
                                .windows(2)
                                .map(|w| w[1] - w[0])
                                .fold(wrap_gap, f64::max);
                            ((1.0 - gap).max(0.0) + res).min(1.0)
                        }
                    };
                    diameter = diameter.max(extent);
                }
                diameter
            })
            .collect()
    }

    pub fn max_diameter(&self) -> f64 {
        self.cell_diameters().into_iter().fold(0.0, f64::max)
    }

    /// Cell sets as sorted member lists, for order-independent comparisons.
    pub fn cell_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = self
            .cells()
            .map(|c| c.iter().map(|&i| i as usize).collect())
            .collect();
        sets.sort();
        sets
    }
}

/// Binary partition `{S, X∖S}` of the proposition "`f(x) = a`".
#[derive(Debug, Clone)]
pub struct Proposition {
    pub partition: Partition,
    /// `S` was empty or the whole space; `partition` is then trivial.
    pub degenerate: bool,
}

/// Proposition partition with `S = {x : |f(x) − a| ≤ tol}`.
pub fn proposition_partition(
    obs: &Observable,
    a: f64,
    tol: f64,
    space: &Arc<SampleSpace>,
) -> Result<Proposition> {
    if !(tol >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(
            "proposition needs finite value and tolerance >= 0".into(),
        ));
    }
    let values = obs.values(space)?;
    let inside: Vec<bool> = values.iter().map(|v| (v - a).abs() <= tol).collect();
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 || count == values.len() {
        return Ok(Proposition {
            partition: Partition::trivial(space),
            degenerate: true,
        });
    }
    let yes = format!("{}={a}", obs.name());
    let no = format!("¬({yes})");
    let partition = Partition::from_keys(
        space,
        inside.iter().map(|&b| b as u64),
        Some(2),
        |i| Some(if inside[i] { yes.clone() } else { no.clone() }),
    );
    Ok(Proposition {
        partition,
        degenerate: false,
    })
}
