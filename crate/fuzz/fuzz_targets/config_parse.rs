#![no_main]

use drivenjc::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        for key in cfg.keys() {
            assert!(cfg.get(key).is_some());
            assert!(cfg.line_of(key).is_some());
            assert_eq!(key, key.to_lowercase());
        }
    }
});
