//! Run specifications: which system to sample, which partitions to build and
//! which artifacts to write.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use coarsegrain::partition::{Binning, Partition};
use coarsegrain::system::{build_sample, DynamicalMap, Observable, Point, SampleKind, SampleSpace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Accepted under `system` or `map`.
    #[serde(alias = "map")]
    pub system: SystemSpec,
    pub sample: SampleSpec,
    #[serde(default)]
    pub partitions: Vec<PartitionSpec>,
    pub horizon: usize,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Registry name, accepted under `name` or `map`.
    #[serde(alias = "map")]
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub kind: SampleKind,
    pub size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObservableSpec {
    Coordinate { coordinate: usize },
    /// 1 when the coordinate is at least `threshold`, else 0.
    Indicator { coordinate: usize, threshold: f64 },
    /// `x mod modulus`.
    Modulo { coordinate: usize, modulus: f64 },
    /// `floor(x / divisor)`.
    FloorDiv { coordinate: usize, divisor: f64 },
}

impl ObservableSpec {
    fn coordinate(&self) -> usize {
        match *self {
            ObservableSpec::Coordinate { coordinate }
            | ObservableSpec::Indicator { coordinate, .. }
            | ObservableSpec::Modulo { coordinate, .. }
            | ObservableSpec::FloorDiv { coordinate, .. } => coordinate,
        }
    }

    pub fn build(&self) -> Result<Observable, CliError> {
        Ok(match *self {
            ObservableSpec::Coordinate { coordinate } => Observable::coordinate(coordinate),
            ObservableSpec::Indicator { coordinate, threshold } => {
                Observable::indicator(coordinate, threshold)
            }
            ObservableSpec::Modulo { coordinate, modulus } => {
                if !(modulus > 0.0) {
                    return Err(CliError::spec("modulus must be positive"));
                }
                Observable::new(format!("x{coordinate} mod {modulus}"), move |x| {
                    x[coordinate].rem_euclid(modulus)
                })
            }
            ObservableSpec::FloorDiv { coordinate, divisor } => {
                if !(divisor > 0.0) {
                    return Err(CliError::spec("divisor must be positive"));
                }
                Observable::new(format!("floor(x{coordinate}/{divisor})"), move |x| {
                    (x[coordinate] / divisor).floor()
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PartitionKind {
    /// Half-open intervals of one coordinate between sorted cut points.
    Boundaries { coordinate: usize, cuts: Vec<f64> },
    /// `bins` equal-width bins over the observable's range.
    Bins { observable: ObservableSpec, bins: usize },
    /// Level sets of the observable.
    Exact { observable: ObservableSpec },
    Trivial,
    Identity,
    Cells { cells: Vec<CellSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: PartitionKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtifactKind {
    RefinementCsv,
    VerdictJson,
    PartitionJson,
    ClassificationJson,
    LatticeJson,
    HasseDot,
    LawsJson,
    EntropyJson,
    EntropyCsv,
    TransitionCsv,
    TransitionJson,
}

impl ArtifactKind {
    /// Whether the artifact is written once per partition; its path must then
    /// contain `{partition}` when the spec has several partitions.
    pub fn per_partition(self) -> bool {
        matches!(
            self,
            ArtifactKind::EntropyCsv | ArtifactKind::TransitionCsv | ArtifactKind::TransitionJson
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub artifact: ArtifactKind,
    pub path: String,
}

/// Placeholder substituted by the partition name in per-partition paths.
pub const PARTITION_PLACEHOLDER: &str = "{partition}";

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: RunSpec =
            serde_json::from_str(text).map_err(|e| CliError::spec(format!("malformed spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Structural checks that need no sampling.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.horizon < 1 {
            return Err(CliError::spec("horizon must be >= 1"));
        }
        let map = self.map()?;
        let mut names = BTreeSet::new();
        for p in &self.partitions {
            if p.name.is_empty() {
                return Err(CliError::spec("partition names must be nonempty"));
            }
            if !names.insert(p.name.as_str()) {
                return Err(CliError::spec(format!("duplicate partition name `{}`", p.name)));
            }
            let coord = match &p.kind {
                PartitionKind::Boundaries { coordinate, .. } => Some(*coordinate),
                PartitionKind::Bins { observable, .. } | PartitionKind::Exact { observable } => {
                    Some(observable.coordinate())
                }
                _ => None,
            };
            if let Some(c) = coord {
                if c >= map.dimension() {
                    return Err(CliError::spec(format!(
                        "partition `{}` uses coordinate {c} of a {}-dimensional system",
                        p.name,
                        map.dimension()
                    )));
                }
            }
        }
        let mut paths = BTreeSet::new();
        for o in &self.outputs {
            if o.path.is_empty() {
                return Err(CliError::spec("output paths must be nonempty"));
            }
            if !paths.insert(o.path.as_str()) {
                return Err(CliError::spec(format!("output path `{}` listed twice", o.path)));
            }
            if o.artifact.per_partition()
                && self.partitions.len() > 1
                && !o.path.contains(PARTITION_PLACEHOLDER)
            {
                return Err(CliError::spec(format!(
                    "path `{}` must contain {PARTITION_PLACEHOLDER} for several partitions",
                    o.path
                )));
            }
        }
        Ok(())
    }

    pub fn map(&self) -> Result<DynamicalMap, CliError> {
        DynamicalMap::by_name(&self.system.name, &self.system.params).map_err(CliError::spec)
    }

    pub fn space(&self, map: &DynamicalMap) -> Result<Arc<SampleSpace>, CliError> {
        let x0 = self.sample.x0.clone().map(Point::new);
        build_sample(
            self.sample.kind,
            self.sample.size,
            Some(map),
            self.sample.seed,
            x0.as_ref(),
        )
        .map(Arc::new)
        .map_err(CliError::spec)
    }

    pub fn partitions(&self, space: &Arc<SampleSpace>) -> Result<Vec<Partition>, CliError> {
        self.partitions
            .iter()
            .map(|p| p.build(space).map(|q| q.with_name(p.name.clone())))
            .collect()
    }

    /// SHA-256 of the canonical JSON form (after command-line overrides).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("spec serialises");
        hex::encode(Sha256::digest(canonical))
    }
}

impl PartitionSpec {
    pub fn build(&self, space: &Arc<SampleSpace>) -> Result<Partition, CliError> {
        let built = match &self.kind {
            PartitionKind::Boundaries { coordinate, cuts } => {
                Partition::from_boundaries(space, *coordinate, cuts)
            }
            PartitionKind::Bins { observable, bins } => {
                Partition::induce(&observable.build()?, space, Binning::UniformBins(*bins))
            }
            PartitionKind::Exact { observable } => {
                Partition::induce(&observable.build()?, space, Binning::ExactValues)
            }
            PartitionKind::Trivial => Ok(Partition::trivial(space)),
            PartitionKind::Identity => Ok(Partition::identity(space)),
            PartitionKind::Cells { cells } => Partition::from_cells(
                space,
                cells
                    .iter()
                    .map(|c| (c.members.clone(), c.label.clone()))
                    .collect(),
            ),
        };
        built.map_err(CliError::spec)
    }
}
