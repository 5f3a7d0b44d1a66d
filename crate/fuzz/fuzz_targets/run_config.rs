#![no_main]

use drivenjc_cli::run_config::RunConfigOverrides;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(overrides) = RunConfigOverrides::from_text(text) {
        if let Ok(cfg) = overrides.resolve() {
            assert!(cfg.scenario().validate().is_ok());
        }
    }
});
