#![no_main]

use cellsleep::experiment::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::parse(text) {
            let echo = cfg.echo();
            let back = RunConfig::parse(&echo).expect("echo parses");
            assert_eq!(back.echo(), echo);
        }
    }
});
