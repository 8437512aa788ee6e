#![no_main]

use libfuzzer_sys::fuzz_target;

// Fuzz target: the run-configuration parser and validator.
//
// Invariants: parsing arbitrary bytes must never panic, and any config that
// validates must survive a serialize/re-parse round trip.
fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = vlab_core::config::parse_config(data) {
        let json = serde_json::to_vec(&cfg).expect("accepted configs serialize");
        let again = vlab_core::config::parse_config(&json)
            .expect("serialized form of an accepted config re-parses");
        assert_eq!(again.points.len(), cfg.points.len());
    }
});
