#![no_main]

use libfuzzer_sys::fuzz_target;

// Fuzz target: report deserialization (reports written by one run are read
// back by tooling; the reader must not panic on damaged files).
fuzz_target!(|data: &[u8]| {
    if let Ok(rep) = serde_json::from_slice::<vlab_core::IdentityReport>(data) {
        let json = serde_json::to_string(&rep).expect("reports serialize");
        let again: vlab_core::IdentityReport =
            serde_json::from_str(&json).expect("serialized reports re-parse");
        // round trip is exact, including non-finite-free floats
        if rep.residual.is_finite() {
            assert_eq!(again.residual.to_bits(), rep.residual.to_bits());
        }
    }
});
