#![no_main]

use cellsleep::traffic::{TrafficTrace, SLOT_SECONDS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = TrafficTrace::read_csv(data, SLOT_SECONDS) {
        let mut out = Vec::new();
        trace.write_csv(&mut out).unwrap();
        let back = TrafficTrace::read_csv(out.as_slice(), SLOT_SECONDS).unwrap();
        assert_eq!(back.demands(), trace.demands());
    }
});
