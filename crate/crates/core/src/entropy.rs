//! Block entropy, dynamical entropy of a partition, Kolmogorov-Sinai
//! estimates over partition families and empirical transition matrices.
//!
//! Entropies are in nats. The measure is the sample's weights.

use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{pull_back, successor_table, Partition};
use crate::system::{stable_sum, DynamicalMap, SampleSpace};

/// Estimates whose refined cell count exceeds this fraction of the sample
/// size are flagged unreliable.
pub const SATURATION_FRACTION: f64 = 0.1;

/// Number of trailing difference values averaged into the estimate.
pub const ESTIMATE_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub partition_name: String,
    pub horizon: usize,
    /// `H_1 ..= H_horizon`.
    pub block_entropy_series: Vec<f64>,
    /// `H_n / n`.
    pub rate_series_quotient: Vec<f64>,
    /// `H_{n+1} − H_n`, one entry shorter than the block series.
    pub rate_series_difference: Vec<f64>,
    /// Mean of the last [`ESTIMATE_WINDOW`] difference values.
    pub estimate: f64,
    pub saturation_flag: bool,
    /// Cells of the `n`-step refinement.
    pub cell_count_series: Vec<usize>,
}

impl EntropyReport {
    /// Rows `n,H_n,H_n/n,H_{n+1}-H_n`; the last difference is blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,H_n,H_n/n,H_{n+1}-H_n\n");
        for (i, (h, q)) in self
            .block_entropy_series
            .iter()
            .zip(&self.rate_series_quotient)
            .enumerate()
        {
            let d = self
                .rate_series_difference
                .get(i)
                .map_or(String::new(), |d| format!("{d:.12}"));
            writeln!(out, "{},{h:.12},{q:.12},{d}", i + 1).unwrap();
        }
        out
    }
}

/// `−Σ μ(A) ln μ(A)` over the cells of `p`, with `0 ln 0 = 0`.
pub fn block_entropy(p: &Partition) -> f64 {
    let h = stable_sum((0..p.len()).map(|c| {
        let m = p.cell_measure(c);
        if m > 0.0 {
            -m * m.ln()
        } else {
            0.0
        }
    }));
    h.max(0.0)
}

fn report_from_tables(p: &Partition, succ: &[u32], horizon: usize) -> Result<EntropyReport> {
    if horizon < 2 {
        return Err(Error::InvalidParameter("entropy horizon must be >= 2".into()));
    }
    let mut joined = p.clone();
    let mut block = vec![block_entropy(&joined)];
    let mut cells = vec![joined.len()];
    for _ in 1..horizon {
        joined = p.product_unlabeled(&pull_back(&joined, succ, false));
        block.push(block_entropy(&joined));
        cells.push(joined.len());
    }
    let quotient = block
        .iter()
        .enumerate()
        .map(|(i, h)| h / (i + 1) as f64)
        .collect();
    let difference: Vec<f64> = block.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &difference[difference.len().saturating_sub(ESTIMATE_WINDOW)..];
    let estimate = stable_sum(tail.iter().copied()) / tail.len() as f64;
    let size = p.space().len();
    Ok(EntropyReport {
        partition_name: p.name().to_string(),
        horizon,
        block_entropy_series: block,
        rate_series_quotient: quotient,
        rate_series_difference: difference,
        estimate,
        saturation_flag: *cells.last().unwrap() as f64 > SATURATION_FRACTION * size as f64,
        cell_count_series: cells,
    })
}

/// `H_n` of `⋁_{t<n} Φ^{-t} P` for `n = 1..=horizon`, with both rate series.
pub fn dynamical_entropy(
    p: &Partition,
    map: &DynamicalMap,
    horizon: usize,
) -> Result<EntropyReport> {
    let succ = successor_table(p.space(), map)?;
    report_from_tables(p, &succ, horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEstimate {
    pub estimate: f64,
    pub partition_name: String,
    /// Whether every candidate was saturated, so the maximum comes from
    /// unreliable estimates.
    pub saturated: bool,
    pub reports: Vec<EntropyReport>,
}

/// Largest entropy estimate over `family`, ignoring saturated reports
/// unless every report is saturated. Ties go to the earliest partition.
pub fn ks_estimate(
    map: &DynamicalMap,
    space: &std::sync::Arc<SampleSpace>,
    family: &[Partition],
    horizon: usize,
) -> Result<KsEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if family.iter().any(|p| !std::sync::Arc::ptr_eq(p.space(), space)) {
        return Err(Error::SpaceMismatch);
    }
    let succ = successor_table(space, map)?;
    let reports = family
        .par_iter()
        .map(|p| report_from_tables(p, &succ, horizon))
        .collect::<Result<Vec<_>>>()?;
    let saturated = reports.iter().all(|r| r.saturation_flag);
    let best = reports
        .iter()
        .filter(|r| saturated || !r.saturation_flag)
        .fold(None::<&EntropyReport>, |best, r| match best {
            Some(b) if b.estimate >= r.estimate => Some(b),
            _ => Some(r),
        })
        .expect("family is nonempty");
    Ok(KsEstimate {
        estimate: best.estimate,
        partition_name: best.partition_name.clone(),
        saturated,
        reports,
    })
}

/// `T_ij = μ(A_i ∩ Φ⁻¹A_j) / μ(A_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub cells: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from");
        for c in &self.cells {
            write!(out, ",{}", csv_field(c)).unwrap();
        }
        out.push('\n');
        for (c, row) in self.cells.iter().zip(&self.rows) {
            out.push_str(&csv_field(c));
            for v in row {
                write!(out, ",{v:.12}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn transition_matrix(p: &Partition, map: &DynamicalMap) -> Result<TransitionMatrix> {
    let succ = successor_table(p.space(), map)?;
    let k = p.len();
    let labels = p.labels();
    let weights = p.space().weights();
    // per-cell accumulation in point order keeps the sums deterministic
    let rows: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let members = p.cell(i);
            let mass = stable_sum(members.iter().map(|&x| weights[x as usize]));
            if mass <= 0.0 {
                return Err(Error::ZeroMeasureCell { cell: i });
            }
            let mut row = vec![Vec::new(); k];
            for &x in members {
                row[labels[succ[x as usize] as usize] as usize].push(weights[x as usize]);
            }
            Ok(row
                .into_iter()
                .map(|w| stable_sum(w) / mass)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(TransitionMatrix {
        cells: (0..k).map(|c| p.display_label(c)).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Binning;
    use crate::system::{Observable, Topology};
    use std::sync::Arc;

    fn circle(n: usize) -> Arc<SampleSpace> {
        Arc::new(SampleSpace::grid(n, vec![Topology::Circle]).unwrap())
    }

    fn cuts(space: &Arc<SampleSpace>, cuts: &[f64]) -> Partition {
        Partition::from_boundaries(space, 0, cuts).unwrap()
    }

    #[test]
    fn block_entropy_values() {
        let s = circle(4);
        assert!((block_entropy(&cuts(&s, &[0.5])) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(block_entropy(&Partition::trivial(&s)), 0.0);
        let skew = block_entropy(&cuts(&s, &[0.25]));
        assert!((skew - 0.562_335_144_618_808_5).abs() < 1e-12);
    }

    #[test]
    fn doubling_on_dyadic_grid_is_exact() {
        let s = circle(1 << 12);
        let r = dynamical_entropy(&cuts(&s, &[0.5]), &DynamicalMap::doubling(), 6).unwrap();
        for (n, h) in r.block_entropy_series.iter().enumerate() {
            assert!((h - (n + 1) as f64 * 2f64.ln()).abs() < 1e-12);
        }
        assert!((r.estimate - 2f64.ln()).abs() < 1e-12);
        assert!(!r.saturation_flag);
        assert_eq!(r.cell_count_series, vec![2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn identity_dynamics_has_zero_entropy() {
        let s = circle(64);
        let r = dynamical_entropy(&cuts(&s, &[0.2, 0.7]), &DynamicalMap::identity(1), 4).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn horizon_one_is_rejected() {
        let s = circle(8);
        assert!(dynamical_entropy(&Partition::trivial(&s), &DynamicalMap::identity(1), 1).is_err());
    }

    #[test]
    fn ks_estimate_prefers_generating_partition() {
        let s = circle(1 << 12);
        let family = vec![
            cuts(&s, &[0.5]).with_name("half"),
            cuts(&s, &[0.6]).with_name("skew"),
            Partition::trivial(&s).with_name("trivial"),
            Partition::identity(&s).with_name("points"),
        ];
        let ks = ks_estimate(&DynamicalMap::doubling(), &s, &family, 6).unwrap();
        assert_eq!(ks.partition_name, "half");
        assert!(!ks.saturated);
        assert!(ks.reports[3].saturation_flag);
        let only = ks_estimate(&DynamicalMap::doubling(), &s, &family[2..3], 3).unwrap();
        assert_eq!(only.estimate, 0.0);
        assert_eq!(
            ks_estimate(&DynamicalMap::doubling(), &s, &[], 3).unwrap_err(),
            Error::EmptyFamily
        );
    }

    #[test]
    fn transition_matrices() {
        let s = circle(1 << 10);
        let t = transition_matrix(&cuts(&s, &[0.5]), &DynamicalMap::doubling()).unwrap();
        assert_eq!(t.rows, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let quarters = Partition::induce(&Observable::coordinate(0), &s, Binning::UniformBins(4)).unwrap();
        let t = transition_matrix(&quarters, &DynamicalMap::rotation(0.25).unwrap()).unwrap();
        for (i, row) in t.rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if j == (i + 1) % 4 { 1.0 } else { 0.0 });
            }
        }
        let id = transition_matrix(&quarters, &DynamicalMap::identity(1)).unwrap();
        assert!(id.rows.iter().enumerate().all(|(i, r)| r[i] == 1.0));
        assert!(t.to_csv().starts_with("from,"));
    }

    #[test]
    fn zero_measure_cells_are_rejected() {
        let s = Arc::new(
            SampleSpace::from_points(1, vec![0.1, 0.6], Some(vec![1.0, 0.0]), vec![Topology::Line], None)
                .unwrap(),
        );
        let p = cuts(&s, &[0.5]);
        assert_eq!(
            transition_matrix(&p, &DynamicalMap::identity(1)).unwrap_err(),
            Error::ZeroMeasureCell { cell: 1 }
        );
    }
}
