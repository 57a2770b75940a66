#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::assignment::{parse_edits, parse_preferences};

fuzz_target!(|data: &[u8]| {
    let _ = parse_preferences(data);
    let _ = parse_edits(data);
});
