//! Per-run energy accounting and delivered throughput.

use crate::error::{Error, Result};
use crate::network::NetworkState;

/// What one policy did in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotResult {
    pub slot: usize,
    /// Status of every station, macro first.
    pub policy: Vec<bool>,
    pub power_w: f64,
    pub cost: f64,
    pub feasible: bool,
    pub tput_norm: f64,
}

/// Aggregate of one method over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub method: String,
    pub s: usize,
    pub energy_j: f64,
    pub gain_pct: f64,
    pub mean_tput: f64,
    pub infeasible_slots: usize,
}

/// Left Riemann sum of per-slot power.
pub fn energy(results: &[SlotResult], slot_seconds: f64) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::domain("cannot integrate energy over zero slots"));
    }
    Ok(results.iter().map(|r| r.power_w * slot_seconds).sum())
}

/// Percentage energy saved relative to the all-ON baseline. Negative when the
/// method spends more than the baseline.
pub fn gain(e_on: f64, e_x: f64) -> Result<f64> {
    if e_on.is_nan() || e_on <= 0.0 {
        return Err(Error::domain(format!("baseline energy must be > 0, got {e_on}")));
    }
    Ok((e_on - e_x) / e_on * 100.0)
}

/// Served fraction of one cell: `min(load, 1)`.
pub fn cell_throughput(load: f64) -> Result<f64> {
    if load.is_nan() || load < 0.0 {
        return Err(Error::domain(format!("load must be >= 0, got {load}")));
    }
    Ok(load.min(1.0))
}

/// Network throughput normalized by per-cell capacity; each cell contributes
/// at most 1.
pub fn normalized_throughput(state: &NetworkState) -> Result<f64> {
    state.loads().iter().map(|&l| cell_throughput(l)).sum()
}

/// Per-user derivation of a cell's delivered throughput.
///
/// Each of `n_users` asks for `required / n_users`; when the cell is over
/// capacity every user loses `(required - provided_cap) / n_users`. Returns
/// the delivered total. Kept as an independent route to cross-check
/// [`cell_throughput`].
pub fn throughput_oracle(required: f64, provided_cap: f64, n_users: u32) -> Result<f64> {
    if n_users == 0 {
        return Err(Error::domain("a cell with traffic needs at least one user"));
    }
    if !(required >= 0.0 && provided_cap >= 0.0) {
        return Err(Error::domain("throughputs must be >= 0"));
    }
    let n = f64::from(n_users);
    let per_user = required / n;
    let penalty = if required > provided_cap {
        (required - provided_cap) / n
    } else {
        0.0
    };
    Ok((per_user - penalty) * n)
}

/// Summarizes one method's slots.
pub fn summarize(method: &str, s: usize, results: &[SlotResult], slot_seconds: f64, e_on: f64) -> Result<RunSummary> {
    let energy_j = energy(results, slot_seconds)?;
    Ok(RunSummary {
        method: method.to_string(),
        s,
        energy_j,
        gain_pct: gain(e_on, energy_j)?,
        mean_tput: results.iter().map(|r| r.tput_norm).sum::<f64>() / results.len() as f64,
        infeasible_slots: results.iter().filter(|r| !r.feasible).count(),
    })
}
