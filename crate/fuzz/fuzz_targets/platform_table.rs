#![no_main]

use drivenjc::feasibility::{feasibility_row, parse_platforms};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(platforms) = parse_platforms(text) {
        for p in &platforms {
            assert!(p.g_over_2pi.is_finite() && p.g_over_2pi > 0.0);
            assert!(p.gamma_over_2pi.is_finite() && p.gamma_over_2pi > 0.0);
            let row = feasibility_row(p, 20.0, 0.25).expect("valid platform");
            assert!(row.iter().all(|r| *r >= 0.0));
        }
    }
});
