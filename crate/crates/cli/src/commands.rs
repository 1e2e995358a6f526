use std::collections::BTreeSet;

use coarsegrain::entropy::{ks_estimate, transition_matrix};
use coarsegrain::epistemic::{classify, ClassificationReport};
use coarsegrain::lattice::{
    boolean_from_partition, fixtures, hasse_dot, laws, partition_logic, FiniteLattice, LawReport,
};
use coarsegrain::partition::{dynamic_refinement, Direction, Verdict};
use coarsegrain::system::BUILTIN_MAPS;
use serde::Serialize;

use crate::artifact::{Artifact, Format, Header};
use crate::spec::{ArtifactKind, RunSpec, PARTITION_PLACEHOLDER};
use crate::CliError;

/// Rendered artifacts of one command plus non-fatal warnings.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

/// Artifact kinds to render: those requested by the spec, else the defaults.
struct Selection {
    wanted: BTreeSet<ArtifactKind>,
}

impl Selection {
    fn new(spec: Option<&RunSpec>, owned: &[ArtifactKind], defaults: &[ArtifactKind]) -> Self {
        let requested: BTreeSet<ArtifactKind> = spec
            .map(|s| {
                s.outputs
                    .iter()
                    .map(|o| o.artifact)
                    .filter(|k| owned.contains(k))
                    .collect()
            })
            .unwrap_or_default();
        Selection {
            wanted: if requested.is_empty() {
                defaults.iter().copied().collect()
            } else {
                requested
            },
        }
    }

    fn has(&self, kind: ArtifactKind) -> bool {
        self.wanted.contains(&kind)
    }
}

fn artifact(kind: ArtifactKind, file: impl Into<String>, format: Format, text: String) -> Artifact {
    Artifact {
        kind,
        partition: None,
        file: file.into(),
        format,
        text,
    }
}

/// Partition names made safe for use inside file names.
pub(crate) fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

fn per_partition(kind: ArtifactKind, name: &str, template: &str, format: Format, text: String) -> Artifact {
    Artifact {
        partition: Some(name.to_string()),
        ..artifact(kind, template.replace(PARTITION_PLACEHOLDER, &file_safe(name)), format, text)
    }
}

fn exactly(spec: &RunSpec, n: usize, command: &str) -> Result<(), CliError> {
    if spec.partitions.len() != n {
        return Err(CliError::spec(format!(
            "`{command}` needs exactly {n} partition(s), spec has {}",
            spec.partitions.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct RefinementDoc<'a> {
    partition: &'a str,
    map: &'a str,
    horizon: usize,
    direction: Direction,
    verdict: Verdict,
    generating_tolerance: f64,
    refined_cells: usize,
    cell_count_series: &'a [usize],
    max_diameter_series: &'a [f64],
}

pub fn refine(spec: &RunSpec) -> Result<Output, CliError> {
    exactly(spec, 1, "refine")?;
    let header = Header { digest: spec.digest() };
    let sel = Selection::new(
        Some(spec),
        &[ArtifactKind::RefinementCsv, ArtifactKind::VerdictJson, ArtifactKind::PartitionJson],
        &[ArtifactKind::RefinementCsv, ArtifactKind::VerdictJson],
    );
    let map = spec.map()?;
    let space = spec.space(&map)?;
    let p = spec.partitions(&space)?.remove(0);
    let r = dynamic_refinement(&p, &map, spec.horizon)?;

    let mut out = Output::default();
    if sel.has(ArtifactKind::RefinementCsv) {
        let mut body = String::from("t,cells,max_diameter\n");
        for (t, (c, d)) in r.cell_count_series.iter().zip(&r.max_diameter_series).enumerate() {
            body.push_str(&format!("{t},{c},{d}\n"));
        }
        out.artifacts.push(artifact(ArtifactKind::RefinementCsv, "refinement.csv", Format::Csv, header.csv(&body)));
    }
    if sel.has(ArtifactKind::VerdictJson) {
        let doc = RefinementDoc {
            partition: p.name(),
            map: map.name(),
            horizon: r.horizon,
            direction: r.direction,
            verdict: r.verdict,
            generating_tolerance: space.generating_tolerance(),
            refined_cells: r.refined.len(),
            cell_count_series: &r.cell_count_series,
            max_diameter_series: &r.max_diameter_series,
        };
        out.artifacts.push(artifact(ArtifactKind::VerdictJson, "verdict.json", Format::Json, header.json("refinement", &doc)));
    }
    if sel.has(ArtifactKind::PartitionJson) {
        out.artifacts.push(artifact(
            ArtifactKind::PartitionJson,
            "refined-partition.json",
            Format::Json,
            header.json("partition", &r.refined.to_doc()),
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ClassificationDoc<'a> {
    map: &'a str,
    partitions: [&'a str; 2],
    #[serde(flatten)]
    report: &'a ClassificationReport,
}

pub fn classify_cmd(spec: &RunSpec) -> Result<Output, CliError> {
    exactly(spec, 2, "classify")?;
    let header = Header { digest: spec.digest() };
    let map = spec.map()?;
    let space = spec.space(&map)?;
    let parts = spec.partitions(&space)?;
    let report = classify(&parts[0], &parts[1], &map, spec.horizon)?;
    let doc = ClassificationDoc {
        map: map.name(),
        partitions: [parts[0].name(), parts[1].name()],
        report: &report,
    };
    Ok(Output {
        artifacts: vec![artifact(
            ArtifactKind::ClassificationJson,
            "classification.json",
            Format::Json,
            header.json("classification", &doc),
        )],
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Builtin {
    Firefly,
    O6,
    Mo2,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Firefly => "firefly",
            Builtin::O6 => "o6",
            Builtin::Mo2 => "mo2",
        }
    }
}

#[derive(Serialize)]
struct LawsDoc<'a> {
    #[serde(flatten)]
    report: &'a LawReport,
    distributivity_witness_labels: Option<Vec<&'a str>>,
    modularity_witness_labels: Option<Vec<&'a str>>,
    orthomodularity_witness_labels: Option<Vec<&'a str>>,
    boolean_block_labels: Vec<Vec<&'a str>>,
}

fn names<'a>(l: &'a FiniteLattice, ids: &[usize]) -> Vec<&'a str> {
    ids.iter().map(|&a| l.label(a)).collect()
}

pub enum LatticeSource<'a> {
    Builtin(Builtin),
    Spec(&'a RunSpec),
}

pub fn lattice_cmd(source: LatticeSource<'_>) -> Result<Output, CliError> {
    let (lattice, digest, spec) = match source {
        LatticeSource::Builtin(b) => {
            let l = match b {
                Builtin::Firefly => fixtures::firefly().logic,
                Builtin::O6 => fixtures::o6(),
                Builtin::Mo2 => fixtures::mo2(),
            };
            let digest = {
                use sha2::{Digest, Sha256};
                hex::encode(Sha256::digest(format!("builtin:{}", b.name())))
            };
            (l, digest, None)
        }
        LatticeSource::Spec(spec) => {
            let map = spec.map()?;
            let space = spec.space(&map)?;
            let parts = spec.partitions(&space)?;
            let l = match parts.as_slice() {
                [p] => boolean_from_partition(p)?,
                [f, g] => partition_logic(f, g)?,
                _ => {
                    return Err(CliError::spec(format!(
                        "`lattice` needs one or two partitions, spec has {}",
                        parts.len()
                    )))
                }
            };
            (l, spec.digest(), Some(spec))
        }
    };
    let header = Header { digest };
    let all = [ArtifactKind::LatticeJson, ArtifactKind::HasseDot, ArtifactKind::LawsJson];
    let sel = Selection::new(spec, &all, &all);
    let mut out = Output::default();
    if sel.has(ArtifactKind::LatticeJson) {
        out.artifacts.push(artifact(ArtifactKind::LatticeJson, "lattice.json", Format::Json, header.json("lattice", &lattice.to_doc())));
    }
    if sel.has(ArtifactKind::HasseDot) {
        out.artifacts.push(artifact(ArtifactKind::HasseDot, "hasse.dot", Format::Dot, header.dot(&hasse_dot(&lattice))));
    }
    if sel.has(ArtifactKind::LawsJson) {
        let report = laws(&lattice)?;
        let doc = LawsDoc {
            distributivity_witness_labels: report.distributivity_witness.map(|w| names(&lattice, &w)),
            modularity_witness_labels: report.modularity_witness.map(|w| names(&lattice, &w)),
            orthomodularity_witness_labels: report.orthomodularity_witness.map(|w| names(&lattice, &w)),
            boolean_block_labels: report.boolean_blocks.iter().map(|b| names(&lattice, b)).collect(),
            report: &report,
        };
        out.artifacts.push(artifact(ArtifactKind::LawsJson, "laws.json", Format::Json, header.json("laws", &doc)));
    }
    Ok(out)
}

#[derive(Serialize)]
struct EntropySummary<'a> {
    estimate: f64,
    partition: &'a str,
    all_saturated: bool,
}

#[derive(Serialize)]
struct EntropyDoc<'a> {
    map: &'a str,
    horizon: usize,
    reports: &'a [coarsegrain::entropy::EntropyReport],
    summary: EntropySummary<'a>,
    warnings: &'a [String],
}

pub fn entropy_cmd(spec: &RunSpec) -> Result<Output, CliError> {
    if spec.partitions.is_empty() {
        return Err(CliError::spec("`entropy` needs at least one partition"));
    }
    if spec.horizon < 2 {
        return Err(CliError::spec("`entropy` needs horizon >= 2"));
    }
    let header = Header { digest: spec.digest() };
    let sel = Selection::new(
        Some(spec),
        &[
            ArtifactKind::EntropyJson,
            ArtifactKind::EntropyCsv,
            ArtifactKind::TransitionCsv,
            ArtifactKind::TransitionJson,
        ],
        &[ArtifactKind::EntropyJson, ArtifactKind::EntropyCsv],
    );
    let map = spec.map()?;
    let space = spec.space(&map)?;
    let parts = spec.partitions(&space)?;
    let ks = ks_estimate(&map, &space, &parts, spec.horizon)?;
    let warnings: Vec<String> = ks
        .reports
        .iter()
        .filter(|r| r.saturation_flag)
        .map(|r| {
            format!(
                "partition `{}` saturated: {} cells on {} points, estimate unreliable",
                r.partition_name,
                r.cell_count_series.last().unwrap(),
                space.len()
            )
        })
        .collect();

    let mut out = Output {
        warnings: warnings.clone(),
        ..Output::default()
    };
    if sel.has(ArtifactKind::EntropyJson) {
        let doc = EntropyDoc {
            map: map.name(),
            horizon: spec.horizon,
            reports: &ks.reports,
            summary: EntropySummary {
                estimate: ks.estimate,
                partition: &ks.partition_name,
                all_saturated: ks.saturated,
            },
            warnings: &warnings,
        };
        out.artifacts.push(artifact(ArtifactKind::EntropyJson, "entropy.json", Format::Json, header.json("entropy", &doc)));
    }
    for (p, report) in parts.iter().zip(&ks.reports) {
        if sel.has(ArtifactKind::EntropyCsv) {
            out.artifacts.push(per_partition(
                ArtifactKind::EntropyCsv,
                p.name(),
                "entropy-{partition}.csv",
                Format::Csv,
                header.csv(&report.to_csv()),
            ));
        }
        if sel.has(ArtifactKind::TransitionCsv) || sel.has(ArtifactKind::TransitionJson) {
            let t = transition_matrix(p, &map)?;
            if sel.has(ArtifactKind::TransitionCsv) {
                out.artifacts.push(per_partition(
                    ArtifactKind::TransitionCsv,
                    p.name(),
                    "transition-{partition}.csv",
                    Format::Csv,
                    header.csv(&t.to_csv()),
                ));
            }
            if sel.has(ArtifactKind::TransitionJson) {
                out.artifacts.push(per_partition(
                    ArtifactKind::TransitionJson,
                    p.name(),
                    "transition-{partition}.json",
                    Format::Json,
                    header.json("transition", &t),
                ));
            }
        }
    }
    Ok(out)
}

/// Built-in maps with their parameters.
pub fn systems(format: Format) -> String {
    match format {
        Format::Json => {
            let list: Vec<_> = BUILTIN_MAPS
                .iter()
                .map(|(name, params, about)| {
                    serde_json::json!({"name": name, "params": params, "description": about})
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&list).expect("json");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::from("name,params,description\n");
            for (name, params, about) in BUILTIN_MAPS {
                s.push_str(&format!("{name},{},\"{about}\"\n", params.join(" ")));
            }
            s
        }
    }
}
