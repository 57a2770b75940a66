#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::citation::{author_key, parse_reference_entry};

fuzz_target!(|data: &[u8]| {
    let s = String::from_utf8_lossy(data);
    for author in parse_reference_entry(&s).authors {
        let key = author_key(&author);
        assert!(!key.key.is_empty());
    }
});
