#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::dataset::io::parse_venue_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_venue_config(s) {
            assert!(cfg.score_min < cfg.score_max);
        }
    }
});
