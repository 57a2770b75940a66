#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::citation::parse_overrides;

fuzz_target!(|data: &[u8]| {
    let _ = parse_overrides(data);
});
