#![no_main]

use coarsegrain_cli::spec::RunSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = RunSpec::parse(text) {
        let again = RunSpec::parse(&serde_json::to_string(&spec).unwrap()).expect("round trip");
        assert_eq!(spec.digest(), again.digest());
    }
});
