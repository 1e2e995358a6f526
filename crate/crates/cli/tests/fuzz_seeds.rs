//! The fuzz corpus seeds go through the same decoders as the fuzz targets.

use std::path::PathBuf;
use std::sync::Arc;

use coarsegrain::lattice::{laws, LatticeDoc};
use coarsegrain::partition::PartitionDoc;
use coarsegrain::system::SampleSpace;
use coarsegrain_cli::spec::RunSpec;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn run_spec_seeds_parse_and_round_trip() {
    for (name, text) in seeds("run_spec") {
        let spec = RunSpec::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = RunSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec.digest(), again.digest(), "{name}");
    }
}

#[test]
fn partition_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("partition_json") {
        let doc = PartitionDoc::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let space = Arc::new(SampleSpace::discrete(doc.space_size).unwrap());
        if let Ok(p) = doc.into_partition(&space) {
            let back = PartitionDoc::parse(&p.to_doc().to_json()).unwrap();
            assert_eq!(back.into_partition(&space).unwrap(), p, "{name}");
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn lattice_seeds() {
    for (name, text) in seeds("lattice_json") {
        let l = LatticeDoc::parse(&text).and_then(LatticeDoc::into_lattice).unwrap_or_else(|e| panic!("{name}: {e}"));
        laws(&l).unwrap();
        let back = LatticeDoc::parse(&l.to_doc().to_json()).unwrap().into_lattice().unwrap();
        assert!(back.isomorphism(&l).is_some(), "{name}");
    }
}
