//! Runs a switching method over a traffic trace and scores every slot.

use std::fmt;
use std::str::FromStr;

use crate::agent::{cost, run_simulation, AgentConfig};
use crate::benchmarks::{all_off, all_on, exhaustive, sorting};
use crate::error::{Error, Result};
use crate::metrics::{normalized_throughput, SlotResult};
use crate::network::{apply_policy, is_feasible, SlotDemand};
use crate::power_model::{network_power, relative_capacities, BaseStation};
use crate::traffic::TrafficTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Vfa,
    AllOn,
    AllOff,
    Sorting,
    Exhaustive,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Vfa, Method::AllOn, Method::AllOff, Method::Sorting, Method::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Method::Vfa => "vfa",
            Method::AllOn => "all_on",
            Method::AllOff => "all_off",
            Method::Sorting => "sorting",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Applies `policy` to `demand` and records power, cost, feasibility and
/// throughput.
pub fn evaluate_slot(
    stations: &[BaseStation],
    phis: &[f64],
    demand: &SlotDemand,
    policy: &[bool],
    kappa: f64,
    slot: usize,
) -> Result<SlotResult> {
    let state = apply_policy(demand, policy, phis)?.with_slot(slot);
    Ok(SlotResult {
        slot,
        policy: policy.to_vec(),
        power_w: network_power(stations, &state)?,
        cost: cost(&state, stations, kappa)?,
        feasible: is_feasible(&state),
        tput_norm: normalized_throughput(&state)?,
    })
}

/// Per-slot results of `method` over `trace`. `seed` only matters to the
/// learning agent.
pub fn run_method(
    method: Method,
    trace: &TrafficTrace,
    stations: &[BaseStation],
    agent: &AgentConfig,
    exhaustive_cap: usize,
    seed: u64,
) -> Result<Vec<SlotResult>> {
    if trace.cells() != stations.len() {
        return Err(Error::domain(format!(
            "trace has {} cells, deployment {}",
            trace.cells(),
            stations.len()
        )));
    }
    if method == Method::Vfa {
        return run_simulation(trace, stations, agent, seed);
    }
    let s = stations.len() - 1;
    if method == Method::Exhaustive && s > exhaustive_cap {
        return Err(Error::Refused { s, cap: exhaustive_cap });
    }
    let phis = relative_capacities(stations);
    (0..trace.slots())
        .map(|t| {
            let demand = trace.slot_demand(t);
            let policy = match method {
                Method::AllOn => all_on(&demand),
                Method::AllOff => all_off(&demand),
                Method::Sorting => sorting(&demand, &phis)?,
                Method::Exhaustive => exhaustive(&demand, stations, &phis, exhaustive_cap)?,
                Method::Vfa => unreachable!("handled above"),
            };
            evaluate_slot(stations, &phis, &demand, &policy, agent.kappa, t)
        })
        .collect()
}
