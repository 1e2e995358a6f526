#![no_main]

use coarsegrain::lattice::{laws, LatticeDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = LatticeDoc::parse(text) else { return };
    if let Ok(l) = doc.into_lattice() {
        if l.len() <= 64 {
            laws(&l).unwrap();
        }
        let back = LatticeDoc::parse(&l.to_doc().to_json()).unwrap().into_lattice().unwrap();
        assert!(back.isomorphism(&l).is_some());
    }
});
