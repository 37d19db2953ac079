//! Per-slot network state and the offloading arithmetic.
//!
//! Loads are recomputed every slot from the cells' native demand and the
//! ON/OFF policy: a sleeping small cell hands `phi_j * demand_j` to the macro
//! cell and a woken one takes back exactly its own native demand. Toggling a
//! single status at fixed demand therefore reproduces the incremental
//! switch-off/switch-on update.

use crate::error::{Error, Result};

/// Slack allowed on the macro capacity constraint.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// Native (pre-offloading) load factor of each cell in one slot.
/// Index 0 is the macro cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDemand {
    native: Vec<f64>,
}

impl SlotDemand {
    pub fn new(native: Vec<f64>) -> Result<Self> {
        if native.is_empty() {
            return Err(Error::domain("slot demand needs at least the macro cell"));
        }
        if let Some((idx, v)) = native
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::domain(format!("demand of cell {idx} is {v}, outside [0, 1]")));
        }
        Ok(SlotDemand { native })
    }

    pub fn native(&self) -> &[f64] {
        &self.native
    }

    /// Number of small cells.
    pub fn small_cells(&self) -> usize {
        self.native.len() - 1
    }
}

/// Loads and statuses of all `s + 1` stations at one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    loads: Vec<f64>,
    statuses: Vec<bool>,
    slot: usize,
}

impl NetworkState {
    /// Builds a state, enforcing: macro ON, sleeping cells unloaded,
    /// non-negative loads, small-cell loads at most 1.
    pub fn new(loads: Vec<f64>, statuses: Vec<bool>, slot: usize) -> Result<Self> {
        if loads.is_empty() || loads.len() != statuses.len() {
            return Err(Error::domain(format!(
                "{} loads vs {} statuses",
                loads.len(),
                statuses.len()
            )));
        }
        if !statuses[0] {
            return Err(Error::domain("the macro cell is always ON"));
        }
        for (j, (&l, &on)) in loads.iter().zip(&statuses).enumerate() {
            if l.is_nan() || l < 0.0 {
                return Err(Error::domain(format!("load of cell {j} is {l}")));
            }
            if j > 0 && l > 1.0 {
                return Err(Error::domain(format!("small cell {j} loaded above capacity ({l})")));
            }
            if !on && l != 0.0 {
                return Err(Error::domain(format!("sleeping cell {j} carries load {l}")));
            }
        }
        Ok(NetworkState {
            loads,
            statuses,
            slot,
        })
    }

    pub fn loads(&self) -> &[f64] {
        &self.loads
    }

    pub fn statuses(&self) -> &[bool] {
        &self.statuses
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn with_slot(mut self, slot: usize) -> Self {
        self.slot = slot;
        self
    }

    pub fn macro_load(&self) -> f64 {
        self.loads[0]
    }

    pub fn small_cells(&self) -> usize {
        self.loads.len() - 1
    }
}

/// Loads that result from running `policy` against `demand`.
///
/// `phis[j]` is cell `j`'s capacity relative to the macro cell; `phis[0]` is
/// ignored.
pub fn apply_policy(demand: &SlotDemand, policy: &[bool], phis: &[f64]) -> Result<NetworkState> {
    let n = demand.native.len();
    if policy.len() != n || phis.len() != n {
        return Err(Error::domain(format!(
            "demand covers {n} cells, policy {}, phis {}",
            policy.len(),
            phis.len()
        )));
    }
    if !policy[0] {
        return Err(Error::domain("policy switches the macro cell off"));
    }
    let mut loads = Vec::with_capacity(n);
    let mut macro_load = demand.native[0];
    loads.push(0.0);
    for j in 1..n {
        if policy[j] {
            loads.push(demand.native[j]);
        } else {
            macro_load += phis[j] * demand.native[j];
            loads.push(0.0);
        }
    }
    loads[0] = macro_load;
    NetworkState::new(loads, policy.to_vec(), 0)
}

/// Whether the macro cell stays within capacity.
pub fn is_feasible(state: &NetworkState) -> bool {
    state.macro_load() <= 1.0 + FEASIBILITY_TOLERANCE
}

/// Number of ON/OFF combinations for `s` small cells.
pub fn policy_count(s: usize) -> Result<u64> {
    if s > 62 {
        return Err(Error::Overflow(s));
    }
    Ok(1u64 << s)
}
