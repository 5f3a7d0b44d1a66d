#![no_main]

use drivenjc::scenario::DetuningMode;
use drivenjc::Process;
use drivenjc_cli::args::parse_list;
use drivenjc_cli::run_config::parse_truncations;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_list("values", text);
    if let Ok(ns) = parse_truncations(text) {
        assert!(!ns.is_empty());
    }
    if let Ok(p) = text.parse::<Process>() {
        assert_eq!(p.to_string().parse::<Process>().ok(), Some(p));
    }
    if let Ok(mode) = text.parse::<DetuningMode>() {
        assert!(mode.to_string().parse::<DetuningMode>().is_ok());
    }
});
