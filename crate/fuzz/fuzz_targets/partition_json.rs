#![no_main]

use std::sync::Arc;

use coarsegrain::partition::PartitionDoc;
use coarsegrain::system::SampleSpace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = PartitionDoc::parse(text) else { return };
    if !(2..=4096).contains(&doc.space_size) {
        return;
    }
    let space = Arc::new(SampleSpace::discrete(doc.space_size).unwrap());
    if let Ok(p) = doc.into_partition(&space) {
        let back = PartitionDoc::parse(&p.to_doc().to_json()).unwrap();
        assert_eq!(back.into_partition(&space).unwrap(), p);
    }
});
