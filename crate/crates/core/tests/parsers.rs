//! The fuzz targets' properties, driven by the checked-in seeds and by
//! proptest inputs.

use std::fs;
use std::path::PathBuf;

use cellsleep::agent::WeightVectors;
use cellsleep::experiment::RunConfig;
use cellsleep::traffic::{build_trace, parse_raw_csv, TrafficTrace, SLOT_SECONDS};
use proptest::prelude::*;

fn raw_csv(data: &[u8]) {
    if let Ok(raw) = parse_raw_csv(data) {
        assert!(raw.iter().all(|r| r.combined() >= 0.0));
        if let Ok(trace) = build_trace(&raw, 1, 0, 2) {
            assert!(trace.demands().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

fn trace_csv(data: &[u8]) {
    if let Ok(trace) = TrafficTrace::read_csv(data, SLOT_SECONDS) {
        let mut out = Vec::new();
        trace.write_csv(&mut out).unwrap();
        let back = TrafficTrace::read_csv(out.as_slice(), SLOT_SECONDS).unwrap();
        assert_eq!(back.demands(), trace.demands());
    }
}

fn run_config(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::parse(text) {
            let echo = cfg.echo();
            let back = RunConfig::parse(&echo).expect("echo parses");
            assert_eq!(back.echo(), echo);
        }
    }
}

fn weights_csv(data: &[u8]) {
    if let Ok(w) = WeightVectors::read_csv(data) {
        let mut out = Vec::new();
        w.write_csv(&mut out).unwrap();
        assert_eq!(WeightVectors::read_csv(out.as_slice()).unwrap(), w);
    }
}

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files.iter().map(|p| fs::read(p).unwrap()).collect()
}

#[test]
fn corpus_seeds_pass_every_target() {
    type Target = fn(&[u8]);
    let targets: [(&str, Target); 4] = [
        ("raw_csv", raw_csv),
        ("trace_csv", trace_csv),
        ("run_config", run_config),
        ("weights_csv", weights_csv),
    ];
    for (name, target) in targets {
        let seeds = seeds(name);
        assert!(!seeds.is_empty(), "{name} has no seeds");
        for seed in &seeds {
            target(seed);
            // truncations are cheap extra cases
            for cut in 0..seed.len() {
                target(&seed[..cut]);
            }
        }
    }
}

fn mutated(target: &'static str) -> impl Strategy<Value = Vec<u8>> {
    let base = seeds(target);
    (0..base.len(), prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 0..6)).prop_map(move |(k, edits)| {
        let mut v = base[k].clone();
        for (at, byte) in edits {
            if !v.is_empty() {
                let i = at.index(v.len());
                v[i] = byte;
            }
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn raw_csv_never_panics(data in prop::collection::vec(any::<u8>(), 0..256)) {
        raw_csv(&data);
    }

    #[test]
    fn raw_csv_mutations(data in mutated("raw_csv")) {
        raw_csv(&data);
    }

    #[test]
    fn trace_csv_mutations(data in mutated("trace_csv")) {
        trace_csv(&data);
    }

    #[test]
    fn weights_csv_mutations(data in mutated("weights_csv")) {
        weights_csv(&data);
    }

    #[test]
    fn run_config_mutations(data in mutated("run_config")) {
        run_config(&data);
    }

    #[test]
    fn run_config_from_plausible_lines(lines in prop::collection::vec(
        (prop::sample::select(vec!["s", "seed", "kappa", "alpha", "methods", "scenario", "output_dir", "synthetic.noise", "profile.femto.eta", "trace"]),
         "[-a-z0-9.,:_/ eE+]{0,12}"),
        0..6,
    )) {
        let text: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        run_config(text.as_bytes());
    }
}
