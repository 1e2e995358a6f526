//! Pre-images, finite-horizon dynamic refinement and the generating
//! diagnostic.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};
use crate::system::{DynamicalMap, SampleSpace};

/// Steps inspected when deciding whether the diameter series has stalled.
pub const STALL_WINDOW: usize = 3;
/// Relative diameter change below which a step counts as stationary.
pub const STALL_TOLERANCE: f64 = 0.01;
/// Per-step diameter ratio at or below which a step counts as contracting.
pub const CONTRACTION_RATIO: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GeneratingNumerically,
    NonGeneratingNumerically,
    Inconclusive,
}

impl Verdict {
    pub fn is_generating(self) -> bool {
        self == Verdict::GeneratingNumerically
    }
}

/// Which iterates enter the refinement product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `⋁_{t=0}^{h} Φ^{-t}(P)`
    Past,
    /// `⋁_{t=-h}^{h} Φ^{t}(P)`; forward images are pre-images under `Φ^{-1}`.
    Bidirectional,
}

#[derive(Debug, Clone)]
pub struct RefinementResult {
    pub refined: Partition,
    pub horizon: usize,
    pub direction: Direction,
    /// Entry `t` describes the refinement after `t` steps; length `horizon + 1`.
    pub cell_count_series: Vec<usize>,
    pub max_diameter_series: Vec<f64>,
    pub verdict: Verdict,
}

fn snap_table(
    space: &SampleSpace,
    eval: impl Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
) -> Result<Vec<u32>> {
    let dim = space.dimension();
    (0..space.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |img, i| {
                eval(space.point(i), img)?;
                if img.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { index: i });
                }
                match space.nearest(img) {
                    Some((j, _)) => Ok(j as u32),
                    None => Err(Error::ImageEscape {
                        index: i,
                        distance: nearest_distance(space, img),
                        tolerance: space.snap_tolerance(),
                    }),
                }
            },
        )
        .collect()
}

fn nearest_distance(space: &SampleSpace, q: &[f64]) -> f64 {
    space
        .points()
        .map(|p| space.distance(p, q))
        .fold(f64::INFINITY, f64::min)
}

fn check_dimension(space: &SampleSpace, map: &DynamicalMap) -> Result<()> {
    if space.dimension() != map.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            actual: map.dimension(),
        });
    }
    Ok(())
}

/// For each sample point, the index of the sample point nearest to `Φ(x)`.
pub fn successor_table(space: &SampleSpace, map: &DynamicalMap) -> Result<Vec<u32>> {
    check_dimension(space, map)?;
    snap_table(space, |x, out| {
        map.apply(x, out);
        Ok(())
    })
}

/// For each sample point, the index of the sample point nearest to `Φ^{-1}(x)`.
pub fn predecessor_table(space: &SampleSpace, map: &DynamicalMap) -> Result<Vec<u32>> {
    check_dimension(space, map)?;
    if !map.invertible() {
        return Err(Error::NegativeTimeOnNonInvertible {
            map: map.name().to_string(),
            t: -1,
        });
    }
    snap_table(space, |x, out| map.apply_inverse(x, out))
}

/// Pull a partition back along a point table: `x` joins the cell of `table[x]`.
pub(crate) fn pull_back(p: &Partition, table: &[u32], keep_labels: bool) -> Partition {
    Partition::from_keys(
        &p.space,
        table.iter().map(|&j| p.labels[j as usize] as u64),
        Some(p.len() as u64),
        |i| {
            if keep_labels {
                p.cell_labels[p.labels[table[i] as usize] as usize].clone()
            } else {
                None
            }
        },
    )
}

/// `Φ^{-1}(P)`: `x` lies in the pre-image of cell `c` iff `Φ(x)` lies in `c`.
/// Cells keep the label of the cell they pull back.
pub fn preimage(p: &Partition, map: &DynamicalMap) -> Result<Partition> {
    let table = successor_table(&p.space, map)?;
    Ok(pull_back(p, &table, true))
}

/// Finest dynamic refinement truncated at `horizon`: bidirectional for
/// invertible maps, past-only otherwise.
pub fn dynamic_refinement(
    p: &Partition,
    map: &DynamicalMap,
    horizon: usize,
) -> Result<RefinementResult> {
    let direction = if map.invertible() {
        Direction::Bidirectional
    } else {
        Direction::Past
    };
    dynamic_refinement_with(p, map, horizon, direction)
}

pub fn dynamic_refinement_with(
    p: &Partition,
    map: &DynamicalMap,
    horizon: usize,
    direction: Direction,
) -> Result<RefinementResult> {
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let space = p.space.clone();
    let succ = successor_table(&space, map)?;
    let pred = match direction {
        Direction::Past => None,
        Direction::Bidirectional => Some(predecessor_table(&space, map)?),
    };
    refine_with_tables(p, &space, &succ, pred.as_deref(), horizon, direction)
}

pub(crate) fn refine_with_tables(
    p: &Partition,
    space: &Arc<SampleSpace>,
    succ: &[u32],
    pred: Option<&[u32]>,
    horizon: usize,
    direction: Direction,
) -> Result<RefinementResult> {
    let mut past = p.clone();
    let mut future = p.clone();
    let mut refined = p.clone();
    let mut cell_count_series = vec![refined.len()];
    let mut max_diameter_series = vec![refined.max_diameter()];
    for _ in 0..horizon {
        past = p.product_unlabeled(&pull_back(&past, succ, false));
        refined = match pred {
            Some(pred) => {
                future = p.product_unlabeled(&pull_back(&future, pred, false));
                past.product_unlabeled(&future)
            }
            None => past.clone(),
        };
        cell_count_series.push(refined.len());
        max_diameter_series.push(refined.max_diameter());
    }
    let mut result = RefinementResult {
        refined: refined.with_name(format!("R({})", p.name())),
        horizon,
        direction,
        cell_count_series,
        max_diameter_series,
        verdict: Verdict::Inconclusive,
    };
    result.verdict = generating_diagnostic_with(&result, space.generating_tolerance());
    Ok(result)
}

/// Generating diagnostic with the sample's default tolerance.
pub fn generating_diagnostic(result: &RefinementResult) -> Verdict {
    generating_diagnostic_with(result, result.refined.space().generating_tolerance())
}

/// Numerical verdict on whether the refinement is heading for the identity
/// partition.
///
/// * generating: the largest cell is within `tolerance`, every cell holds at
///   most one sample point, or the diameter shrank by at least
///   [`CONTRACTION_RATIO`] on each of the last [`STALL_WINDOW`] steps;
/// * non-generating: the diameter changed by less than [`STALL_TOLERANCE`]
///   (relative) on each of the last `min(STALL_WINDOW, horizon)` steps;
/// * inconclusive otherwise.
pub fn generating_diagnostic_with(result: &RefinementResult, tolerance: f64) -> Verdict {
    let diam = &result.max_diameter_series;
    let last = *diam.last().expect("series has horizon + 1 entries");
    if last <= tolerance || result.refined.is_identity() {
        return Verdict::GeneratingNumerically;
    }
    let steps: Vec<(f64, f64)> = diam.windows(2).map(|w| (w[0], w[1])).collect();
    let window = STALL_WINDOW.min(steps.len());
    let tail = &steps[steps.len() - window..];
    if window > 0
        && tail
            .iter()
            .all(|(prev, cur)| (prev - cur).abs() <= STALL_TOLERANCE * prev)
    {
        return Verdict::NonGeneratingNumerically;
    }
    if steps.len() >= STALL_WINDOW
        && steps[steps.len() - STALL_WINDOW..]
            .iter()
            .all(|(prev, cur)| *cur <= CONTRACTION_RATIO * prev)
    {
        return Verdict::GeneratingNumerically;
    }
    Verdict::Inconclusive
}
