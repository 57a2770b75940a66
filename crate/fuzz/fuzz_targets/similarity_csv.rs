#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::assignment::parse_similarity;

fuzz_target!(|data: &[u8]| {
    // Accepted matrices are complete and in range.
    if let Ok(m) = parse_similarity(data) {
        m.validate().unwrap();
    }
});
