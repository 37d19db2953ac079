#![no_main]

use cellsleep::traffic::{build_trace, parse_raw_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(raw) = parse_raw_csv(data) {
        assert!(raw.iter().all(|r| r.combined() >= 0.0));
        if let Ok(trace) = build_trace(&raw, 1, 0, 2) {
            assert!(trace.demands().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        }
    }
});
