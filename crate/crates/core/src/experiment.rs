//! Experiment configuration and the run/sweep drivers that write result CSVs.
//!
//! A configuration is a flat text file of `key = value` lines; `#` starts a
//! comment. Every key is optional. [`RunConfig::echo`] writes back the fully
//! resolved configuration in the same format.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agent::AgentConfig;
use crate::benchmarks::DEFAULT_EXHAUSTIVE_CAP;
use crate::error::{Error, Result};
use crate::metrics::{energy, gain, RunSummary, SlotResult};
use crate::power_model::{BaseStation, BsType, PowerProfile};
use crate::scenario::{build_stations, ProfileTable, Scenario, DEFAULT_BANDWIDTH_MHZ};
use crate::simulation::{run_method, Method};
use crate::traffic::{build_trace, load_raw_csv, synthetic_trace_with, RawActivity, SyntheticConfig, TrafficTrace, SLOTS_PER_DAY, SLOT_SECONDS};

pub const POWER_HEADER: &str = "slot,round,watts";
pub const SUMMARY_HEADER: &str = "method,s,energy_j,gain_pct,mean_tput,infeasible_slots";
pub const CONFIG_ECHO: &str = "config_echo.txt";

/// Where per-round traffic comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceSource {
    /// Diurnal generator, fresh draw per round.
    Synthetic,
    /// Raw activity records; grids are re-drawn per round.
    Raw(PathBuf),
    /// A ready demand matrix, identical in every round.
    Demand(PathBuf),
}

impl TraceSource {
    fn parse(v: &str) -> Result<Self> {
        let v = v.trim();
        if v == "synthetic" {
            return Ok(TraceSource::Synthetic);
        }
        let path = |p: &str| -> Result<PathBuf> {
            if p.trim().is_empty() {
                return Err(Error::Config(format!("trace `{v}` has no path")));
            }
            Ok(PathBuf::from(p.trim()))
        };
        match v.split_once(':') {
            Some(("csv", p)) => Ok(TraceSource::Raw(path(p)?)),
            Some(("demand", p)) => Ok(TraceSource::Demand(path(p)?)),
            _ => Err(Error::Config(format!(
                "trace must be `synthetic`, `csv:<path>` or `demand:<path>`, got `{v}`"
            ))),
        }
    }

    fn render(&self) -> String {
        match self {
            TraceSource::Synthetic => "synthetic".into(),
            TraceSource::Raw(p) => format!("csv:{}", p.display()),
            TraceSource::Demand(p) => format!("demand:{}", p.display()),
        }
    }
}

/// Everything a run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub s_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub trace: TraceSource,
    pub seed: u64,
    pub slots: usize,
    pub rounds: usize,
    pub exhaustive_cap: usize,
    pub output_dir: PathBuf,
    /// `kappa` here is ignored when [`RunConfig::kappa`] is unset; the
    /// scenario default applies instead.
    pub agent: AgentConfig,
    pub kappa: Option<f64>,
    pub profiles: ProfileTable,
    pub macro_bandwidth: f64,
    pub small_cell_bandwidth: f64,
    pub synthetic: SyntheticConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::B,
            s_values: vec![4],
            methods: Method::ALL.to_vec(),
            trace: TraceSource::Synthetic,
            seed: 0,
            slots: SLOTS_PER_DAY,
            rounds: 25,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            output_dir: PathBuf::from("results"),
            agent: AgentConfig::default(),
            kappa: None,
            profiles: ProfileTable::default(),
            macro_bandwidth: DEFAULT_BANDWIDTH_MHZ,
            small_cell_bandwidth: DEFAULT_BANDWIDTH_MHZ,
            synthetic: SyntheticConfig::default(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{}`", v.trim())))
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = v.split(',').map(|p| item(p.trim())).collect::<Result<_>>()?;
    Ok(items)
}

impl RunConfig {
    /// Parses `key = value` lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        let mut sc_types: Option<Vec<BsType>> = None;
        let mut custom = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected `key = value`, got `{body}`")))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(line, format!("`{key}` given twice")));
            }
            let at_line = |e: Error| match e {
                Error::Config(m) => Error::parse(line, m),
                other => other,
            };
            match key {
                "scenario" if value.trim().eq_ignore_ascii_case("custom") => custom = true,
                "sc_types" => sc_types = Some(list(value, |t| t.parse()).map_err(at_line)?),
                _ => cfg.set(key, value).map_err(at_line)?,
            }
        }
        match (custom, sc_types) {
            (true, Some(types)) => cfg.scenario = Scenario::Custom(types),
            (true, None) => return Err(Error::Config("scenario `custom` needs `sc_types`".into())),
            (false, Some(_)) => return Err(Error::Config("`sc_types` only applies to scenario `custom`".into())),
            (false, None) => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    /// Sets one key. Used by the file parser and for command-line overrides;
    /// call [`RunConfig::validate`] afterwards.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let a = &mut self.agent;
        match key {
            "scenario" => self.scenario = v.parse()?,
            "s" => self.s_values = list(v, |p| num(key, p))?,
            "methods" => self.methods = list(v, |p| p.parse())?,
            "trace" => self.trace = TraceSource::parse(v)?,
            "seed" => self.seed = num(key, v)?,
            "slots" => self.slots = num(key, v)?,
            "rounds" => self.rounds = num(key, v)?,
            "exhaustive_cap" => self.exhaustive_cap = num(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "epsilon" => a.epsilon = num(key, v)?,
            "epsilon_decay" => a.epsilon_decay = num(key, v)?,
            "alpha" => a.alpha = num(key, v)?,
            "gamma" => a.gamma = num(key, v)?,
            "xi" => a.xi = num(key, v)?,
            "j_min" => a.j_min = num(key, v)?,
            "omega" => a.omega = num(key, v)?,
            "j_rep" => a.j_rep = num(key, v)?,
            "max_iter" => a.max_iter = num(key, v)?,
            "power_scale" => a.power_scale = num(key, v)?,
            "kappa" => self.kappa = Some(num(key, v)?),
            "macro_bandwidth" => self.macro_bandwidth = num(key, v)?,
            "small_cell_bandwidth" => self.small_cell_bandwidth = num(key, v)?,
            "synthetic.macro_midpoint" => self.synthetic.macro_midpoint = num(key, v)?,
            "synthetic.small_cell_midpoint" => self.synthetic.small_cell_midpoint = num(key, v)?,
            "synthetic.amplitude_min" => self.synthetic.amplitude.0 = num(key, v)?,
            "synthetic.amplitude_max" => self.synthetic.amplitude.1 = num(key, v)?,
            "synthetic.noise" => self.synthetic.noise = num(key, v)?,
            "synthetic.phase_jitter" => self.synthetic.phase_jitter = num(key, v)?,
            "synthetic.period_slots" => self.synthetic.period_slots = num(key, v)?,
            _ => {
                let Some(rest) = key.strip_prefix("profile.") else {
                    return Err(Error::Config(format!("unknown key `{key}`")));
                };
                let (kind, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
                let kind: BsType = kind.parse()?;
                let mut p = self.profiles.get(kind);
                match field {
                    "eta" => p.eta = num(key, v)?,
                    "p_tx" => p.p_tx = num(key, v)?,
                    "p_op" => p.p_op = num(key, v)?,
                    "p_sleep" => p.p_sleep = num(key, v)?,
                    _ => return Err(Error::Config(format!("unknown key `{key}`"))),
                }
                self.profiles.set_unchecked(kind, p);
            }
        }
        Ok(())
    }

    /// Agent settings with the penalty factor resolved.
    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            kappa: self.kappa.unwrap_or_else(|| self.scenario.default_kappa()),
            ..self.agent.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.agent_config().validate()?;
        self.synthetic.validate()?;
        for (_, p) in self.profiles.iter() {
            p.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.s_values.is_empty() {
            return bad("`s` needs at least one value".into());
        }
        if let Some(&s) = self.s_values.iter().find(|&&s| s > crate::agent::MAX_SMALL_CELLS) {
            return bad(format!("s = {s} exceeds the limit of {}", crate::agent::MAX_SMALL_CELLS));
        }
        let mut sorted = self.s_values.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("`s` lists a value twice".into());
        }
        if self.methods.is_empty() {
            return bad("`methods` needs at least one method".into());
        }
        let distinct: BTreeSet<_> = self.methods.iter().collect();
        if distinct.len() != self.methods.len() {
            return bad("`methods` lists a method twice".into());
        }
        if self.slots == 0 || self.rounds == 0 {
            return bad("`slots` and `rounds` must be at least 1".into());
        }
        if self.methods.contains(&Method::Exhaustive) {
            if let Some(&s) = self.s_values.iter().find(|&&s| s > self.exhaustive_cap) {
                return bad(format!(
                    "exhaustive search requested for s = {s} above exhaustive_cap = {}",
                    self.exhaustive_cap
                ));
            }
        }
        for bw in [self.macro_bandwidth, self.small_cell_bandwidth] {
            if !(bw > 0.0 && bw.is_finite()) {
                return bad(format!("bandwidths must be > 0, got {bw}"));
            }
        }
        if let Scenario::Custom(types) = &self.scenario {
            if types.is_empty() || types.contains(&BsType::Macro) {
                return bad("`sc_types` must list small-cell types only".into());
            }
        }
        Ok(())
    }

    pub fn stations(&self, s: usize) -> Result<Vec<BaseStation>> {
        build_stations(&self.scenario, s, &self.profiles, self.macro_bandwidth, self.small_cell_bandwidth)
    }

    /// Every resolved parameter as `key = value` lines that parse back to
    /// the same configuration.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let join = |items: Vec<String>| items.join(",");
        match &self.scenario {
            Scenario::Custom(types) => {
                kv("scenario", "custom".into());
                kv("sc_types", join(types.iter().map(|t| t.name().to_string()).collect()));
            }
            other => kv("scenario", other.label().into()),
        }
        kv("s", join(self.s_values.iter().map(ToString::to_string).collect()));
        kv("methods", join(self.methods.iter().map(|m| m.name().to_string()).collect()));
        kv("trace", self.trace.render());
        kv("seed", self.seed.to_string());
        kv("slots", self.slots.to_string());
        kv("rounds", self.rounds.to_string());
        kv("exhaustive_cap", self.exhaustive_cap.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        let a = self.agent_config();
        kv("epsilon", a.epsilon.to_string());
        kv("epsilon_decay", a.epsilon_decay.to_string());
        kv("alpha", a.alpha.to_string());
        kv("gamma", a.gamma.to_string());
        kv("xi", a.xi.to_string());
        kv("j_min", a.j_min.to_string());
        kv("omega", a.omega.to_string());
        kv("j_rep", a.j_rep.to_string());
        kv("max_iter", a.max_iter.to_string());
        kv("kappa", a.kappa.to_string());
        kv("power_scale", a.power_scale.to_string());
        kv("macro_bandwidth", self.macro_bandwidth.to_string());
        kv("small_cell_bandwidth", self.small_cell_bandwidth.to_string());
        let syn = &self.synthetic;
        kv("synthetic.macro_midpoint", syn.macro_midpoint.to_string());
        kv("synthetic.small_cell_midpoint", syn.small_cell_midpoint.to_string());
        kv("synthetic.amplitude_min", syn.amplitude.0.to_string());
        kv("synthetic.amplitude_max", syn.amplitude.1.to_string());
        kv("synthetic.noise", syn.noise.to_string());
        kv("synthetic.phase_jitter", syn.phase_jitter.to_string());
        kv("synthetic.period_slots", syn.period_slots.to_string());
        for (t, p) in self.profiles.iter() {
            let PowerProfile { eta, p_tx, p_op, p_sleep } = p;
            kv(&format!("profile.{t}.eta"), eta.to_string());
            kv(&format!("profile.{t}.p_tx"), p_tx.to_string());
            kv(&format!("profile.{t}.p_op"), p_op.to_string());
            kv(&format!("profile.{t}.p_sleep"), p_sleep.to_string());
        }
        out
    }
}

/// Trace and agent seeds of one round, derived from the master seed so that
/// rounds can run in any order.
pub fn round_seeds(master: u64, s: usize, round: usize) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((s as u64) << 32) ^ round as u64);
    (rng.next_u64(), rng.next_u64())
}

/// Per-round slot results of every method at one small-cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub s: usize,
    /// `(method, results[round][slot])`, in configured method order.
    pub methods: Vec<(Method, Vec<Vec<SlotResult>>)>,
    pub summaries: Vec<RunSummary>,
}

enum Traffic {
    Synthetic(SyntheticConfig),
    Raw(Vec<RawActivity>),
    Demand(TrafficTrace),
}

impl Traffic {
    fn load(cfg: &RunConfig) -> Result<Self> {
        Ok(match &cfg.trace {
            TraceSource::Synthetic => Traffic::Synthetic(cfg.synthetic.clone()),
            TraceSource::Raw(p) => Traffic::Raw(load_raw_csv(p)?),
            TraceSource::Demand(p) => {
                let file = fs::File::open(p).map_err(|e| Error::io(p, e))?;
                Traffic::Demand(TrafficTrace::read_csv(file, SLOT_SECONDS)?)
            }
        })
    }

    fn trace(&self, s: usize, slots: usize, seed: u64) -> Result<TrafficTrace> {
        match self {
            Traffic::Synthetic(c) => synthetic_trace_with(c, s, slots, seed),
            Traffic::Raw(raw) => build_trace(raw, s, seed, slots),
            Traffic::Demand(t) => {
                if t.cells() != s + 1 || t.slots() < slots {
                    return Err(Error::Input(format!(
                        "demand file has {} cells and {} slots, need {} cells and {slots} slots",
                        t.cells(),
                        t.slots(),
                        s + 1
                    )));
                }
                TrafficTrace::new(t.demands()[..slots].to_vec(), t.slot_seconds())
            }
        }
    }
}

fn simulate_point(cfg: &RunConfig, traffic: &Traffic, s: usize) -> Result<PointResult> {
    let stations = cfg.stations(s)?;
    let agent = cfg.agent_config();
    // all-ON is the gain baseline, so it runs even when not requested
    let mut methods = cfg.methods.clone();
    if !methods.contains(&Method::AllOn) {
        methods.push(Method::AllOn);
    }
    let rounds: Vec<Vec<Vec<SlotResult>>> = (0..cfg.rounds)
        .into_par_iter()
        .map(|r| {
            let (trace_seed, agent_seed) = round_seeds(cfg.seed, s, r);
            let trace = traffic.trace(s, cfg.slots, trace_seed)?;
            methods
                .iter()
                .map(|&m| run_method(m, &trace, &stations, &agent, cfg.exhaustive_cap, agent_seed))
                .collect()
        })
        .collect::<Result<_>>()?;

    let per_method: Vec<(Method, Vec<Vec<SlotResult>>)> = methods
        .iter()
        .enumerate()
        .map(|(k, &m)| (m, rounds.iter().map(|r| r[k].clone()).collect()))
        .collect();
    let mean_energy = |runs: &[Vec<SlotResult>]| -> Result<f64> {
        let total: f64 = runs.iter().map(|r| energy(r, SLOT_SECONDS)).sum::<Result<f64>>()?;
        Ok(total / runs.len() as f64)
    };
    let on_runs = &per_method.iter().find(|(m, _)| *m == Method::AllOn).expect("all-ON added above").1;
    let e_on = mean_energy(on_runs)?;

    let mut summaries = Vec::new();
    let mut kept = Vec::new();
    for (m, runs) in per_method {
        if !cfg.methods.contains(&m) {
            continue;
        }
        let energy_j = if m == Method::AllOn { e_on } else { mean_energy(&runs)? };
        let n = runs.iter().map(Vec::len).sum::<usize>() as f64;
        summaries.push(RunSummary {
            method: m.name().to_string(),
            s,
            energy_j,
            gain_pct: gain(e_on, energy_j)?,
            mean_tput: runs.iter().flatten().map(|r| r.tput_norm).sum::<f64>() / n,
            infeasible_slots: runs.iter().flatten().filter(|r| !r.feasible).count(),
        });
        kept.push((m, runs));
    }
    Ok(PointResult { s, methods: kept, summaries })
}

/// Simulates every configured `s` without writing anything.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    let traffic = Traffic::load(cfg)?;
    cfg.s_values
        .par_iter()
        .map(|&s| simulate_point(cfg, &traffic, s))
        .collect()
}

fn power_csv(runs: &[Vec<SlotResult>]) -> String {
    let mut out = format!("{POWER_HEADER}\n");
    for (round, rs) in runs.iter().enumerate() {
        for r in rs {
            let _ = writeln!(out, "{},{},{}", r.slot, round, r.power_w);
        }
    }
    out
}

fn mean_power_csv(point: &PointResult) -> String {
    let names: Vec<&str> = point.methods.iter().map(|(m, _)| m.name()).collect();
    let mut out = format!("slot,{}\n", names.join(","));
    let slots = point.methods[0].1[0].len();
    for t in 0..slots {
        let _ = write!(out, "{t}");
        for (_, runs) in &point.methods {
            let mean = runs.iter().map(|r| r[t].power_w).sum::<f64>() / runs.len() as f64;
            let _ = write!(out, ",{mean}");
        }
        out.push('\n');
    }
    out
}

fn summary_csv<'a>(rows: impl Iterator<Item = &'a RunSummary>) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method, r.s, r.energy_j, r.gain_pct, r.mean_tput, r.infeasible_slots
        );
    }
    out
}

/// Files of one point, relative to its directory.
fn point_files(point: &PointResult) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = point
        .methods
        .iter()
        .map(|(m, runs)| (format!("power_{m}.csv"), power_csv(runs)))
        .collect();
    files.push(("power_mean.csv".into(), mean_power_csv(point)));
    files.push(("summary.csv".into(), summary_csv(point.summaries.iter())));
    files
}

/// Writes all files, removing the ones already written if any write fails.
fn write_all(files: Vec<(PathBuf, String)>) -> Result<()> {
    let mut written: Vec<PathBuf> = Vec::new();
    let mut created: Vec<PathBuf> = Vec::new();
    let result = files.iter().try_for_each(|(path, body)| {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() && !dir.exists() {
                let mut missing = Vec::new();
                let mut d = Some(dir);
                while let Some(p) = d.filter(|p| !p.as_os_str().is_empty() && !p.exists()) {
                    missing.push(p.to_path_buf());
                    d = p.parent();
                }
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                created.extend(missing);
            }
        }
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
        written.push(path.clone());
        Ok(())
    });
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        // deepest first
        for d in &created {
            let _ = fs::remove_dir(d);
        }
    }
    result
}

/// Runs a single small-cell count and writes its files into `output_dir`.
pub fn run(cfg: &RunConfig) -> Result<Vec<RunSummary>> {
    if cfg.s_values.len() != 1 {
        return Err(Error::Config(format!(
            "run takes one value of s, got {}; use sweep for a list",
            cfg.s_values.len()
        )));
    }
    let point = simulate(cfg)?.remove(0);
    let dir = &cfg.output_dir;
    let mut files: Vec<(PathBuf, String)> = point_files(&point)
        .into_iter()
        .map(|(name, body)| (dir.join(name), body))
        .collect();
    files.push((dir.join(CONFIG_ECHO), cfg.echo()));
    write_all(files)?;
    Ok(point.summaries)
}

/// Runs every configured `s`: per-point files go to `output_dir/s<N>/`, the
/// combined summary to `output_dir/summary.csv`.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<RunSummary>> {
    let points = simulate(cfg)?;
    let dir = &cfg.output_dir;
    let mut files = Vec::new();
    for point in &points {
        let sub = dir.join(format!("s{}", point.s));
        files.extend(point_files(point).into_iter().map(|(name, body)| (sub.join(name), body)));
    }
    let rows: Vec<RunSummary> = points.into_iter().flat_map(|p| p.summaries).collect();
    files.push((dir.join("summary.csv"), summary_csv(rows.iter())));
    files.push((dir.join(CONFIG_ECHO), cfg.echo()));
    write_all(files)?;
    Ok(rows)
}
