//! Fixed reference policies the learning agent is measured against.
//!
//! Every policy returns a full status vector, macro first.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{SlotDemand, FEASIBILITY_TOLERANCE};
use crate::power_model::BaseStation;

/// Default small-cell limit for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 15;

pub fn all_on(demand: &SlotDemand) -> Vec<bool> {
    vec![true; demand.native().len()]
}

/// Every small cell asleep, regardless of macro capacity.
pub fn all_off(demand: &SlotDemand) -> Vec<bool> {
    let mut policy = vec![false; demand.native().len()];
    policy[0] = true;
    policy
}

/// Switches small cells off in ascending order of demand while the macro cell
/// still has room; a cell that does not fit is skipped and the next one tried.
pub fn sorting(demand: &SlotDemand, phis: &[f64]) -> Result<Vec<bool>> {
    let d = demand.native();
    if phis.len() != d.len() {
        return Err(Error::domain(format!("{} cells but {} relative capacities", d.len(), phis.len())));
    }
    if d[0] > 1.0 {
        return Err(Error::domain(format!("macro cell already overloaded ({})", d[0])));
    }
    let mut order: Vec<usize> = (1..d.len()).collect();
    // stable: equal loads keep index order
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let mut policy = vec![true; d.len()];
    let mut macro_load = d[0];
    for j in order {
        let next = macro_load + phis[j] * d[j];
        if next <= 1.0 + FEASIBILITY_TOLERANCE {
            macro_load = next;
            policy[j] = false;
        }
    }
    Ok(policy)
}

/// Small-cell statuses encoded as an integer, first small cell in the most
/// significant bit.
fn code_is_on(code: u64, s: usize, j: usize) -> bool {
    (code >> (s - j)) & 1 == 1
}

/// Power and macro load of the policy encoded by `code`, without allocating.
fn evaluate_code(code: u64, demand: &[f64], stations: &[BaseStation], phis: &[f64]) -> (f64, f64) {
    let s = demand.len() - 1;
    let mut macro_load = demand[0];
    let mut power = 0.0;
    for j in 1..=s {
        let prof = &stations[j].profile;
        if code_is_on(code, s, j) {
            power += prof.p_op + prof.dynamic_slope() * demand[j];
        } else {
            macro_load += phis[j] * demand[j];
            power += prof.p_sleep;
        }
    }
    let mc = &stations[0].profile;
    (power + mc.p_op + mc.dynamic_slope() * macro_load.min(1.0), macro_load)
}

/// Minimum-power feasible policy over all `2^s` combinations, ties going to
/// the smaller status code. Falls back to all-ON when the macro cell is
/// overloaded by its own demand.
pub fn exhaustive(demand: &SlotDemand, stations: &[BaseStation], phis: &[f64], s_cap: usize) -> Result<Vec<bool>> {
    let d = demand.native();
    let s = d.len() - 1;
    if stations.len() != d.len() || phis.len() != d.len() {
        return Err(Error::domain(format!(
            "{} cells, {} stations, {} relative capacities",
            d.len(),
            stations.len(),
            phis.len()
        )));
    }
    if s > s_cap {
        return Err(Error::Refused { s, cap: s_cap });
    }
    if d[0] > 1.0 + FEASIBILITY_TOLERANCE {
        return Ok(all_on(demand));
    }
    let count = crate::network::policy_count(s)?;
    let pick = |best: Option<(f64, u64)>, cand: (f64, u64)| match best {
        Some(b) if b.0 < cand.0 || (b.0 == cand.0 && b.1 < cand.1) => Some(b),
        _ => Some(cand),
    };
    let candidate = |code: u64| {
        let (power, macro_load) = evaluate_code(code, d, stations, phis);
        (macro_load <= 1.0 + FEASIBILITY_TOLERANCE).then_some((power, code))
    };
    let best = if s >= 10 {
        (0..count)
            .into_par_iter()
            .filter_map(candidate)
            .fold(|| None, pick)
            .reduce(|| None, |a, b| match b {
                Some(b) => pick(a, b),
                None => a,
            })
    } else {
        (0..count).filter_map(candidate).fold(None, pick)
    };
    // all-ON is always feasible here, so a best exists
    let (_, code) = best.expect("all-ON is feasible when the macro demand fits");
    let mut policy = vec![true; d.len()];
    for (j, slot) in policy.iter_mut().enumerate().skip(1) {
        *slot = code_is_on(code, s, j);
    }
    Ok(policy)
}
