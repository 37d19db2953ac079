use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cellsleep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellsleep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = cellsleep(&["run", "--scenario", "A", "--s", "4", "--seed", "7", "--rounds", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        listing(&out),
        [
            "config_echo.txt",
            "power_all_off.csv",
            "power_all_on.csv",
            "power_exhaustive.csv",
            "power_mean.csv",
            "power_sorting.csv",
            "power_vfa.csv",
            "summary.csv"
        ]
    );
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let gain = |m: &str| -> f64 {
        let row = summary.lines().find(|l| l.starts_with(&format!("{m},"))).unwrap();
        row.split(',').nth(3).unwrap().parse().unwrap()
    };
    assert!(gain("exhaustive") >= gain("sorting") - 1e-9);
    assert_eq!(gain("all_on"), 0.0);
}

#[test]
fn flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.cfg");
    let out = tmp.path().join("out");
    fs::write(&cfg, "scenario = B\ns = 9\nmethods = vfa\nrounds = 1\nslots = 6\nseed = 1\n").unwrap();
    let o = cellsleep(&["run", "--config", cfg.to_str().unwrap(), "--s", "2", "--methods", "all_on", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = fs::read_to_string(out.join("config_echo.txt")).unwrap();
    assert!(echo.contains("s = 2\n") && echo.contains("methods = all_on\n") && echo.contains("slots = 6\n"));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[3]), ("all_on", "2", "0"));
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn sweep_tabulates_each_size() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sw");
    let o = cellsleep(&["sweep", "--s", "4,8,12", "--methods", "all_on,all_off,sorting", "--rounds", "1", "--slots", "12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 3);
    for s in ["s4", "s8", "s12"] {
        assert!(out.join(s).join("power_sorting.csv").exists());
    }
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("r{k}"));
        let o = cellsleep(&["run", "--s", "5", "--seed", "11", "--rounds", "3", "--slots", "30", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        dirs.push(out);
    }
    for name in listing(&dirs[0]) {
        if name == "config_echo.txt" {
            continue; // records the output directory
        }
        assert_eq!(fs::read(dirs[0].join(&name)).unwrap(), fs::read(dirs[1].join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn bad_configs_fail_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "gamma = 2\n").unwrap();
    for args in [
        vec!["run", "--config", cfg.to_str().unwrap()],
        vec!["run", "--s", "20", "--methods", "exhaustive"],
        vec!["run", "--scenario", "Z"],
        vec!["run", "--s", "3,4"],
        vec!["run", "--config", "/does/not/exist.cfg"],
    ] {
        let mut args = args;
        args.extend(["--out", out.to_str().unwrap()]);
        let o = cellsleep(&args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
        assert!(!out.exists());
    }
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    fs::create_dir(&out).unwrap();
    // a directory squatting on the summary path makes that write fail
    fs::create_dir(out.join("summary.csv")).unwrap();
    let o = cellsleep(&["run", "--s", "2", "--rounds", "1", "--slots", "4", "--methods", "all_on,sorting", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert_eq!(listing(&out), ["summary.csv"]);
}
