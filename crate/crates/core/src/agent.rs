//! SARSA with linear value-function approximation for small-cell switching.
//!
//! The small cells' ON/OFF pattern is read as a binary number (first small
//! cell most significant). An action adds one of `0, ±xi^0, ±xi^1, ..., ±xi^s`
//! to that number, so the agent samples a handful of patterns per step
//! instead of choosing among all `2^s`.
//!
//! Every action keeps its own weight vector. Candidate actions are scored on
//! the features of the pattern they lead to, `X = [P, λ_1, ..., λ_{s+1}]`,
//! so `Q̂(S, a) = X(S + a) · θ_a`. Learning minimizes cost: greedy selection
//! picks the smallest estimate.
//!
//! With the default learning rate the load weights move by roughly `α` per
//! step while the power weight moves by `α P²`, so the overload penalty is
//! practically invisible to the learner. [`AgentConfig::power_scale`] rescales
//! the power feature when that matters.
//!
//! One episode runs per traffic slot at fixed demand and starts from the
//! pattern the previous episode ended on (all-ON for the first one). Weights
//! carry over between episodes; the exploration rate decays per episode.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::SlotResult;
use crate::network::{apply_policy, NetworkState, SlotDemand};
use crate::power_model::{network_power, relative_capacities, validate_stations, BaseStation};
use crate::simulation::evaluate_slot;
use crate::traffic::TrafficTrace;

/// Largest number of small cells whose pattern fits the status code.
pub const MAX_SMALL_CELLS: usize = 62;

/// Learning hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    /// Initial probability of a uniformly random action.
    pub epsilon: f64,
    /// Per-episode multiplier applied to `epsilon` (1 keeps it constant).
    pub epsilon_decay: f64,
    /// Learning rate.
    pub alpha: f64,
    /// Discount factor.
    pub gamma: f64,
    /// Spacing base of the action set.
    pub xi: u32,
    /// Iterations before the stopping rule is consulted.
    pub j_min: usize,
    /// Threshold on the min-max scaled cost.
    pub omega: f64,
    /// Consecutive iterations the stopping conditions must hold.
    pub j_rep: usize,
    /// Iteration cap per episode.
    pub max_iter: usize,
    /// Macro overload penalty factor.
    pub kappa: f64,
    /// Divisor applied to the power feature before learning. 1 keeps watts;
    /// a value near the network's peak power puts it on the scale of the loads.
    pub power_scale: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            epsilon: 0.8,
            epsilon_decay: 0.9,
            alpha: 1e-7,
            gamma: 0.9,
            xi: 2,
            j_min: 10,
            omega: 5e-2,
            j_rep: 10,
            max_iter: 100,
            kappa: 10.0,
            power_scale: 1.0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay <= 1.0) {
            return bad(format!("epsilon_decay must lie in (0, 1], got {}", self.epsilon_decay));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1), got {}", self.gamma));
        }
        if self.xi < 2 {
            return bad(format!("xi must be >= 2, got {}", self.xi));
        }
        if self.omega.is_nan() || self.omega <= 0.0 {
            return bad(format!("omega must be > 0, got {}", self.omega));
        }
        if self.j_min < 1 || self.max_iter < self.j_min {
            return bad(format!(
                "need max_iter >= j_min >= 1, got j_min = {}, max_iter = {}",
                self.j_min, self.max_iter
            ));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be >= 0, got {}", self.kappa));
        }
        if !(self.power_scale > 0.0 && self.power_scale.is_finite()) {
            return bad(format!("power_scale must be > 0, got {}", self.power_scale));
        }
        Ok(())
    }

    /// Exploration rate of the `episode`-th episode (0-based).
    pub fn epsilon_at(&self, episode: usize) -> f64 {
        let exp = i32::try_from(episode).unwrap_or(i32::MAX);
        self.epsilon * self.epsilon_decay.powi(exp)
    }
}

/// Small-cell ON/OFF pattern as an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatusCode {
    value: u64,
    s: usize,
}

impl StatusCode {
    pub fn new(value: u64, s: usize) -> Result<Self> {
        if s > MAX_SMALL_CELLS {
            return Err(Error::domain(format!("at most {MAX_SMALL_CELLS} small cells, got {s}")));
        }
        let code = StatusCode { value, s };
        if value > code.max_value() {
            return Err(Error::domain(format!("status {value} out of range for {s} small cells")));
        }
        Ok(code)
    }

    /// Every small cell ON.
    pub fn all_on(s: usize) -> Result<Self> {
        StatusCode::new(crate::network::policy_count(s)? - 1, s)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn small_cells(&self) -> usize {
        self.s
    }

    pub fn max_value(&self) -> u64 {
        (1u64 << self.s) - 1
    }

    /// Full policy, macro cell first.
    pub fn to_policy(&self) -> Vec<bool> {
        std::iter::once(true).chain(decode_status(*self)).collect()
    }
}

/// Reads small-cell statuses (first cell most significant) as a number.
pub fn encode_status(statuses: &[bool]) -> Result<StatusCode> {
    let value = statuses.iter().fold(0u64, |acc, &on| (acc << 1) | u64::from(on));
    StatusCode::new(value, statuses.len())
}

pub fn decode_status(code: StatusCode) -> Vec<bool> {
    (0..code.s)
        .map(|i| (code.value >> (code.s - 1 - i)) & 1 == 1)
        .collect()
}

/// `[0, +xi^0, -xi^0, +xi^1, -xi^1, ..., +xi^s, -xi^s]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    actions: Vec<i64>,
}

impl ActionSet {
    pub fn new(s: usize, xi: u32) -> Self {
        let mut actions = vec![0i64];
        for k in 0..=s {
            let step = i64::from(xi).saturating_pow(u32::try_from(k).unwrap_or(u32::MAX));
            actions.push(step);
            actions.push(-step);
        }
        ActionSet { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, idx: usize) -> i64 {
        self.actions[idx]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.actions
    }
}

/// Indices of the actions that keep the status code within `[0, 2^s - 1]`.
/// Index 0 (no change) is always among them.
pub fn valid_actions(code: StatusCode, set: &ActionSet) -> Vec<usize> {
    let lo = -i128::from(code.value);
    let hi = i128::from(code.max_value() - code.value);
    set.actions
        .iter()
        .enumerate()
        .filter(|(_, &a)| (lo..=hi).contains(&i128::from(a)))
        .map(|(i, _)| i)
        .collect()
}

fn apply_action(code: StatusCode, action: i64) -> StatusCode {
    let value = (i128::from(code.value) + i128::from(action)) as u64;
    StatusCode { value, s: code.s }
}

/// `[P, λ_1, ..., λ_{s+1}]`.
pub fn features(state: &NetworkState, stations: &[BaseStation]) -> Result<Vec<f64>> {
    let mut x = Vec::with_capacity(state.loads().len() + 1);
    x.push(network_power(stations, state)?);
    x.extend_from_slice(state.loads());
    Ok(x)
}

pub fn q_hat(x: &[f64], theta: &[f64]) -> Result<f64> {
    if x.len() != theta.len() {
        return Err(Error::domain(format!("{} features vs {} weights", x.len(), theta.len())));
    }
    Ok(x.iter().zip(theta).map(|(a, b)| a * b).sum())
}

/// Network power plus `s * kappa * λ_1` when the macro cell is overloaded.
pub fn cost(state: &NetworkState, stations: &[BaseStation], kappa: f64) -> Result<f64> {
    let power = network_power(stations, state)?;
    let overloaded = state.macro_load() > 1.0;
    let penalty = if overloaded {
        state.small_cells() as f64 * kappa * state.macro_load()
    } else {
        0.0
    };
    Ok(power + penalty)
}

/// Epsilon-greedy choice over `q_values`, returning a position in the slice.
///
/// Draws one uniform number to decide whether to explore and, when exploring,
/// one index. Greedy picks the minimum, the earliest on ties.
pub fn select_action<R: Rng + ?Sized>(q_values: &[f64], epsilon: f64, rng: &mut R) -> usize {
    assert!(!q_values.is_empty(), "no action to choose from");
    if rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..q_values.len());
    }
    q_values
        .iter()
        .enumerate()
        .fold((0, q_values[0]), |(bi, bq), (i, &q)| if q < bq { (i, q) } else { (bi, bq) })
        .0
}

/// One semi-gradient SARSA step on a linear estimate:
/// `θ + α (c + γ x_next·θ_next − x·θ) x`.
pub fn sarsa_update(
    theta: &[f64],
    x: &[f64],
    c: f64,
    x_next: &[f64],
    theta_next: &[f64],
    alpha: f64,
    gamma: f64,
) -> Result<Vec<f64>> {
    let target = c + gamma * q_hat(x_next, theta_next)?;
    let td = target - q_hat(x, theta)?;
    let updated: Vec<f64> = theta.iter().zip(x).map(|(w, xi)| w + alpha * td * xi).collect();
    if updated.iter().any(|w| !w.is_finite()) {
        return Err(Error::Diverged(format!("TD error {td} produced non-finite weights")));
    }
    Ok(updated)
}

/// One weight vector per action.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVectors {
    theta: Vec<Vec<f64>>,
}

impl WeightVectors {
    pub fn zeros(actions: usize, dim: usize) -> Self {
        WeightVectors {
            theta: vec![vec![0.0; dim]; actions],
        }
    }

    pub fn from_rows(theta: Vec<Vec<f64>>) -> Result<Self> {
        let dim = theta.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || theta.iter().any(|r| r.len() != dim) {
            return Err(Error::Input("weight vectors must be non-empty and equally long".into()));
        }
        if theta.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::Input("weights must be finite".into()));
        }
        Ok(WeightVectors { theta })
    }

    pub fn actions(&self) -> usize {
        self.theta.len()
    }

    pub fn dim(&self) -> usize {
        self.theta[0].len()
    }

    pub fn row(&self, action: usize) -> &[f64] {
        &self.theta[action]
    }

    /// `action_index,feature_index,value` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["action_index", "feature_index", "value"])?;
        for (a, row) in self.theta.iter().enumerate() {
            for (f, v) in row.iter().enumerate() {
                w.write_record([a.to_string(), f.to_string(), v.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("<weights csv>", e))?;
        Ok(())
    }

    /// Reads [`WeightVectors::write_csv`] output. Every (action, feature) cell
    /// of the dense grid must appear exactly once.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut rows = rdr.records();
        match rows.next() {
            None => return Err(Error::Input("weights file is empty".into())),
            Some(Err(e)) => return Err(Error::parse(1, e.to_string())),
            Some(Ok(h)) => {
                if h.iter().map(str::trim).ne(["action_index", "feature_index", "value"]) {
                    return Err(Error::parse(1, "expected header `action_index,feature_index,value`"));
                }
            }
        }
        let mut cells: Vec<(usize, usize, f64)> = Vec::new();
        for rec in rows {
            let rec = rec.map_err(|e| {
                Error::parse(e.position().map(|p| p.line() as usize).unwrap_or(0), e.to_string())
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if rec.len() != 3 {
                return Err(Error::parse(line, format!("expected 3 fields, got {}", rec.len())));
            }
            let idx = |k: usize| -> Result<usize> {
                rec[k]
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("`{}` is not an index", &rec[k])))
            };
            let (a, f) = (idx(0)?, idx(1)?);
            let v: f64 = rec[2]
                .trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("`{}` is not a number", &rec[2])))?;
            cells.push((a, f, v));
        }
        let actions = cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
        let dim = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
        if actions.checked_mul(dim) != Some(cells.len()) {
            return Err(Error::Input(format!(
                "{} entries do not form a dense {actions} x {dim} grid",
                cells.len()
            )));
        }
        let mut theta = vec![vec![None; dim]; actions];
        for (a, f, v) in cells {
            if theta[a][f].replace(v).is_some() {
                return Err(Error::Input(format!("weight ({a}, {f}) given twice")));
            }
        }
        let theta = theta
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.expect("dense grid checked above")).collect())
            .collect();
        WeightVectors::from_rows(theta)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        WeightVectors::read_csv(file)
    }
}

/// What one episode produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    /// Status held at termination, macro first.
    pub policy: Vec<bool>,
    /// Cost observed after every iteration.
    pub costs: Vec<f64>,
    /// Whether the stopping rule fired before `max_iter`.
    pub stopped_early: bool,
}

impl EpisodeOutcome {
    pub fn iterations(&self) -> usize {
        self.costs.len()
    }
}

/// One valid move from the current pattern, scored.
struct Candidate {
    action: usize,
    code: StatusCode,
    x: Vec<f64>,
    q: f64,
}

/// Learning switch controller for one deployment.
#[derive(Debug, Clone)]
pub struct Agent {
    stations: Vec<BaseStation>,
    phis: Vec<f64>,
    config: AgentConfig,
    actions: ActionSet,
    weights: WeightVectors,
    rng: ChaCha8Rng,
    status: StatusCode,
    episodes: usize,
}

impl Agent {
    pub fn new(stations: Vec<BaseStation>, config: AgentConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        validate_stations(&stations)?;
        let s = stations.len() - 1;
        let status = StatusCode::all_on(s)?;
        let actions = ActionSet::new(s, config.xi);
        let weights = WeightVectors::zeros(actions.len(), s + 2);
        Ok(Agent {
            phis: relative_capacities(&stations),
            stations,
            config,
            actions,
            weights,
            rng: ChaCha8Rng::seed_from_u64(seed),
            status,
            episodes: 0,
        })
    }

    /// Replaces the weights, e.g. for a warm start.
    pub fn with_weights(mut self, weights: WeightVectors) -> Result<Self> {
        if weights.actions() != self.actions.len() || weights.dim() != self.stations.len() + 1 {
            return Err(Error::domain(format!(
                "weights are {} x {}, agent needs {} x {}",
                weights.actions(),
                weights.dim(),
                self.actions.len(),
                self.stations.len() + 1
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn weights(&self) -> &WeightVectors {
        &self.weights
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn stations(&self) -> &[BaseStation] {
        &self.stations
    }

    pub fn status(&self) -> StatusCode {
        self.status
    }

    pub fn action_set(&self) -> &ActionSet {
        &self.actions
    }

    pub fn episodes_run(&self) -> usize {
        self.episodes
    }

    fn state_of(&self, demand: &SlotDemand, code: StatusCode) -> Result<NetworkState> {
        apply_policy(demand, &code.to_policy(), &self.phis)
    }

    fn candidates(&self, demand: &SlotDemand, from: StatusCode) -> Result<Vec<Candidate>> {
        valid_actions(from, &self.actions)
            .into_iter()
            .map(|action| {
                let code = apply_action(from, self.actions.get(action));
                let mut x = features(&self.state_of(demand, code)?, &self.stations)?;
                x[0] /= self.config.power_scale;
                let q = q_hat(&x, self.weights.row(action))?;
                Ok(Candidate { action, code, x, q })
            })
            .collect()
    }

    fn choose(&mut self, cands: Vec<Candidate>, epsilon: f64) -> Candidate {
        let qs: Vec<f64> = cands.iter().map(|c| c.q).collect();
        let pick = select_action(&qs, epsilon, &mut self.rng);
        cands.into_iter().nth(pick).expect("pick is within the candidate list")
    }

    /// Runs one episode at fixed demand and returns the pattern it settles on.
    pub fn run_episode(&mut self, demand: &SlotDemand) -> Result<EpisodeOutcome> {
        if demand.native().len() != self.stations.len() {
            return Err(Error::domain(format!(
                "demand covers {} cells, deployment has {}",
                demand.native().len(),
                self.stations.len()
            )));
        }
        let cfg = self.config.clone();
        let epsilon = cfg.epsilon_at(self.episodes);
        self.episodes += 1;

        let first = self.candidates(demand, self.status)?;
        let mut current = self.choose(first, epsilon);
        let mut costs = Vec::with_capacity(cfg.max_iter);
        let (mut c_min, mut c_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut held = 0usize;
        let mut stopped_early = false;

        for j in 1..=cfg.max_iter {
            // take the action: move to the pattern it leads to
            self.status = current.code;
            let c = cost(&self.state_of(demand, current.code)?, &self.stations, cfg.kappa)?;
            let repeated = costs.last() == Some(&c);
            costs.push(c);
            c_min = c_min.min(c);
            c_max = c_max.max(c);

            let next = self.candidates(demand, self.status)?;
            let next = self.choose(next, epsilon);
            let updated = sarsa_update(
                self.weights.row(current.action),
                &current.x,
                c,
                &next.x,
                self.weights.row(next.action),
                cfg.alpha,
                cfg.gamma,
            )?;
            self.weights.theta[current.action] = updated;
            current = next;

            let scaled = if c_max > c_min { (c - c_min) / (c_max - c_min) } else { 0.0 };
            if j > cfg.j_min && scaled <= cfg.omega && repeated {
                held += 1;
            } else {
                held = 0;
            }
            if held >= cfg.j_rep {
                stopped_early = true;
                break;
            }
        }
        Ok(EpisodeOutcome {
            policy: self.status.to_policy(),
            costs,
            stopped_early,
        })
    }
}

/// Online learning over a whole trace: one episode per slot, weights carried
/// across slots.
pub fn run_simulation(
    trace: &TrafficTrace,
    stations: &[BaseStation],
    config: &AgentConfig,
    seed: u64,
) -> Result<Vec<SlotResult>> {
    if trace.cells() != stations.len() {
        return Err(Error::domain(format!(
            "trace has {} cells, deployment {}",
            trace.cells(),
            stations.len()
        )));
    }
    let mut agent = Agent::new(stations.to_vec(), config.clone(), seed)?;
    let phis = relative_capacities(stations);
    (0..trace.slots())
        .map(|t| {
            let demand = trace.slot_demand(t);
            let outcome = agent.run_episode(&demand)?;
            evaluate_slot(stations, &phis, &demand, &outcome.policy, config.kappa, t)
        })
        .collect()
}
