#![no_main]

use cellsleep::agent::WeightVectors;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(w) = WeightVectors::read_csv(data) {
        let mut out = Vec::new();
        w.write_csv(&mut out).unwrap();
        assert_eq!(WeightVectors::read_csv(out.as_slice()).unwrap(), w);
    }
});
