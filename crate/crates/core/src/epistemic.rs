//! Dispersion, eigenstates, epistemic accessibility and the
//! compatible / incompatible / complementary taxonomy.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{
    common_coarsening, dynamic_refinement, Binning, Partition, RefinementResult, Verdict,
};
use crate::system::{stable_sum, DynamicalMap, EpistemicState, Observable, SampleSpace};

/// Horizon used by [`epistemic_quantization_demo`].
pub const DEMO_HORIZON: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Both partitions generating.
    Compatible,
    /// Refinements differ but share nontrivial accessible states.
    Incompatible,
    /// Refinements share no accessible state besides `∅` and `X`.
    Complementary,
    /// `R F = R G ≠ I`: neither compatible nor incompatible as literally
    /// defined.
    EquivalentNonGenerating,
}

/// Verdict plus the evidence it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Classification,
    pub generating_f: Verdict,
    pub generating_g: Verdict,
    pub refinement_equal: bool,
    pub coarsening_trivial: bool,
    pub horizon: usize,
    pub refined_cells_f: usize,
    pub refined_cells_g: usize,
    pub coarsening_cells: usize,
}

fn check_state(s: &EpistemicState, space: &SampleSpace) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyState);
    }
    if s.members().last().is_some_and(|&i| i >= space.len()) {
        return Err(Error::InvalidState("member outside the sample space".into()));
    }
    Ok(())
}

/// Weighted variance of `obs` over `s`, weights renormalised over `s`.
pub fn dispersion(obs: &Observable, s: &EpistemicState, space: &SampleSpace) -> Result<f64> {
    check_state(s, space)?;
    let values: Vec<f64> = s
        .members()
        .iter()
        .map(|&i| {
            let v = obs.eval(space.point(i));
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { index: i })
            }
        })
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = s.members().iter().map(|&i| space.weight(i)).collect();
    let total = stable_sum(weights.iter().copied());
    let (weights, total) = if total > 0.0 {
        (weights, total)
    } else {
        (vec![1.0; values.len()], values.len() as f64)
    };
    // deviations from a member value, so a constant observable gives exactly 0
    let shifted: Vec<f64> = values.iter().map(|v| v - values[0]).collect();
    let mean = stable_sum(shifted.iter().zip(&weights).map(|(d, w)| d * w)) / total;
    let var = stable_sum(
        shifted
            .iter()
            .zip(&weights)
            .map(|(d, w)| w * (d - mean) * (d - mean)),
    ) / total;
    Ok(var.max(0.0))
}

/// Default eigenstate tolerance: `1e-9 × (range of obs over the space)²`.
pub fn default_eigen_tolerance(obs: &Observable, space: &SampleSpace) -> Result<f64> {
    let values = obs.values(space)?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(1e-9 * (hi - lo) * (hi - lo))
}

/// Whether `obs` is dispersion-free on `s` up to `tol` (default relative
/// tolerance when `None`).
pub fn is_eigenstate(
    obs: &Observable,
    s: &EpistemicState,
    space: &SampleSpace,
    tol: Option<f64>,
) -> Result<bool> {
    let d = dispersion(obs, s, space)?;
    let tol = match tol {
        Some(t) => t,
        None => default_eigen_tolerance(obs, space)?,
    };
    Ok(d <= tol)
}

/// Whether `s` belongs to the partition algebra of the refinement.
pub fn accessible(s: &EpistemicState, r: &RefinementResult) -> Result<bool> {
    r.refined.is_union_of_cells(s)
}

/// Classify two partitions under `map` at a finite horizon.
pub fn classify(
    f: &Partition,
    g: &Partition,
    map: &DynamicalMap,
    horizon: usize,
) -> Result<ClassificationReport> {
    if !f.same_space(g) {
        return Err(Error::SpaceMismatch);
    }
    let (rf, rg) = rayon::join(
        || dynamic_refinement(f, map, horizon),
        || dynamic_refinement(g, map, horizon),
    );
    let (rf, rg) = (rf?, rg?);
    let coarsening = common_coarsening(&rf.refined, &rg.refined)?;
    let refinement_equal = rf.refined == rg.refined;
    let coarsening_trivial = coarsening.is_trivial();
    let verdict = if rf.verdict.is_generating() && rg.verdict.is_generating() {
        Classification::Compatible
    } else if coarsening_trivial {
        Classification::Complementary
    } else if !refinement_equal {
        Classification::Incompatible
    } else {
        Classification::EquivalentNonGenerating
    };
    Ok(ClassificationReport {
        verdict,
        generating_f: rf.verdict,
        generating_g: rg.verdict,
        refinement_equal,
        coarsening_trivial,
        horizon,
        refined_cells_f: rf.refined.len(),
        refined_cells_g: rg.refined.len(),
        coarsening_cells: coarsening.len(),
    })
}

/// Position strips against momentum strips under the discretised harmonic
/// oscillator, on a phase-plane sample.
pub fn epistemic_quantization_demo(
    space: &Arc<SampleSpace>,
    angle: f64,
    grid_cells: usize,
) -> Result<ClassificationReport> {
    epistemic_quantization_demo_with(space, angle, grid_cells, DEMO_HORIZON)
}

pub fn epistemic_quantization_demo_with(
    space: &Arc<SampleSpace>,
    angle: f64,
    grid_cells: usize,
    horizon: usize,
) -> Result<ClassificationReport> {
    if !(0.0..1.0).contains(&angle) {
        return Err(Error::InvalidParameter(format!(
            "angle {angle} outside [0, 1) turns"
        )));
    }
    if grid_cells < 2 {
        return Err(Error::InvalidParameter("grid_cells must be >= 2".into()));
    }
    let map = DynamicalMap::oscillator(angle)?;
    let position = Partition::induce(&Observable::coordinate(0), space, Binning::UniformBins(grid_cells))?
        .with_name("position");
    let momentum = Partition::induce(&Observable::coordinate(1), space, Binning::UniformBins(grid_cells))?
        .with_name("momentum");
    classify(&position, &momentum, &map, horizon)
}
