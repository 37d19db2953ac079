//! Linear (EARTH-style) base-station power model.
//!
//! An ON station draws `p_op + eta * load * p_tx`, a sleeping one draws
//! `p_sleep`. Load above 1 is clamped for power purposes: an overloaded macro
//! cell cannot radiate more than its full-load power, the overload is
//! accounted for in throughput instead.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::NetworkState;

/// Base-station hardware class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BsType {
    Macro,
    Rrh,
    Micro,
    Pico,
    Femto,
}

impl BsType {
    pub const ALL: [BsType; 5] = [
        BsType::Macro,
        BsType::Rrh,
        BsType::Micro,
        BsType::Pico,
        BsType::Femto,
    ];

    /// Small-cell classes, in the order used to spread a heterogeneous
    /// deployment (remainder goes to the last entries).
    pub const SMALL_CELLS: [BsType; 4] = [BsType::Micro, BsType::Rrh, BsType::Pico, BsType::Femto];

    /// Reference profile for this class.
    pub fn default_profile(self) -> PowerProfile {
        let (eta, p_tx, p_op, p_sleep) = match self {
            BsType::Macro => (4.7, 20.0, 130.0, 75.0),
            BsType::Rrh => (2.8, 20.0, 84.0, 56.0),
            BsType::Micro => (2.6, 6.3, 56.0, 39.0),
            BsType::Pico => (4.0, 0.13, 6.8, 4.3),
            BsType::Femto => (8.0, 0.05, 4.8, 2.9),
        };
        PowerProfile {
            eta,
            p_tx,
            p_op,
            p_sleep,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BsType::Macro => "macro",
            BsType::Rrh => "rrh",
            BsType::Micro => "micro",
            BsType::Pico => "pico",
            BsType::Femto => "femto",
        }
    }
}

impl fmt::Display for BsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BsType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "macro" => Ok(BsType::Macro),
            "rrh" => Ok(BsType::Rrh),
            "micro" => Ok(BsType::Micro),
            "pico" => Ok(BsType::Pico),
            "femto" => Ok(BsType::Femto),
            other => Err(Error::Config(format!("unknown base-station type `{other}`"))),
        }
    }
}

/// Power constants of one hardware class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    /// Power-amplifier efficiency factor (dimensionless).
    pub eta: f64,
    /// Transmit power, W.
    pub p_tx: f64,
    /// Operational circuit power, W.
    pub p_op: f64,
    /// Sleep circuit power, W.
    pub p_sleep: f64,
}

impl PowerProfile {
    pub fn new(eta: f64, p_tx: f64, p_op: f64, p_sleep: f64) -> Result<Self> {
        let profile = PowerProfile {
            eta,
            p_tx,
            p_op,
            p_sleep,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.eta, self.p_tx, self.p_op, self.p_sleep]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("power profile has non-finite entries"));
        }
        if self.eta <= 0.0 {
            return Err(Error::domain(format!("eta must be > 0, got {}", self.eta)));
        }
        if self.p_tx < 0.0 {
            return Err(Error::domain(format!("p_tx must be >= 0, got {}", self.p_tx)));
        }
        if self.p_sleep < 0.0 || self.p_op <= self.p_sleep {
            return Err(Error::domain(format!(
                "need p_op > p_sleep >= 0, got p_op = {}, p_sleep = {}",
                self.p_op, self.p_sleep
            )));
        }
        Ok(())
    }

    /// Load-dependent slope, W per unit load.
    pub fn dynamic_slope(&self) -> f64 {
        self.eta * self.p_tx
    }
}

/// One base station of the deployment. Index 0 is the macro cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseStation {
    pub id: usize,
    pub bs_type: BsType,
    pub profile: PowerProfile,
    /// Installed resources (MHz of bandwidth).
    pub capacity: f64,
}

impl BaseStation {
    pub fn new(id: usize, bs_type: BsType, profile: PowerProfile, capacity: f64) -> Result<Self> {
        profile.validate()?;
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(Error::domain(format!("capacity must be > 0, got {capacity}")));
        }
        if (bs_type == BsType::Macro) != (id == 0) {
            return Err(Error::domain(format!(
                "the macro cell must sit at index 0 and only there (station {id} is {bs_type})"
            )));
        }
        Ok(BaseStation {
            id,
            bs_type,
            profile,
            capacity,
        })
    }

    pub fn is_macro(&self) -> bool {
        self.id == 0
    }

    /// Capacity relative to `macro_cell`.
    pub fn relative_capacity(&self, macro_cell: &BaseStation) -> f64 {
        self.capacity / macro_cell.capacity
    }
}

/// Validates a full station list: macro first, ids in order, one profile per type.
pub fn validate_stations(stations: &[BaseStation]) -> Result<()> {
    let Some(first) = stations.first() else {
        return Err(Error::domain("a deployment needs at least the macro cell"));
    };
    if first.bs_type != BsType::Macro {
        return Err(Error::domain("station 0 must be the macro cell"));
    }
    for (idx, st) in stations.iter().enumerate() {
        if st.id != idx {
            return Err(Error::domain(format!("station at position {idx} has id {}", st.id)));
        }
        if idx > 0 && st.bs_type == BsType::Macro {
            return Err(Error::domain(format!("station {idx} is a second macro cell")));
        }
        if let Some(other) = stations[..idx]
            .iter()
            .find(|o| o.bs_type == st.bs_type && o.profile != st.profile)
        {
            return Err(Error::domain(format!(
                "stations {} and {idx} share type {} but not a power profile",
                other.id, st.bs_type
            )));
        }
    }
    Ok(())
}

/// Relative capacities of every station against the macro cell; entry 0 is 1.
pub fn relative_capacities(stations: &[BaseStation]) -> Vec<f64> {
    match stations.first() {
        Some(mc) => stations.iter().map(|st| st.relative_capacity(mc)).collect(),
        None => Vec::new(),
    }
}

/// Instantaneous consumption of a single station.
pub fn bs_power(profile: &PowerProfile, load: f64, is_on: bool) -> Result<f64> {
    if load.is_nan() || load < 0.0 {
        return Err(Error::domain(format!("load must be >= 0, got {load}")));
    }
    if !is_on {
        if load != 0.0 {
            return Err(Error::domain(format!("a sleeping station cannot carry load {load}")));
        }
        return Ok(profile.p_sleep);
    }
    Ok(profile.p_op + profile.dynamic_slope() * load.min(1.0))
}

/// Total consumption of the deployment in `state`.
pub fn network_power(stations: &[BaseStation], state: &NetworkState) -> Result<f64> {
    if stations.len() != state.loads().len() {
        return Err(Error::domain(format!(
            "{} stations but the state covers {}",
            stations.len(),
            state.loads().len()
        )));
    }
    stations
        .iter()
        .zip(state.loads().iter().zip(state.statuses()))
        .map(|(st, (&load, &on))| bs_power(&st.profile, load, on))
        .sum()
}

fn check_small_cell(sc: &BaseStation) -> Result<()> {
    if sc.is_macro() || sc.bs_type == BsType::Macro {
        return Err(Error::domain("the macro cell is never switched"));
    }
    Ok(())
}

/// Load above which keeping `sc` ON costs less than offloading it to `mc`.
///
/// `None` when offloading never becomes more expensive, i.e. when the macro
/// cell's marginal power per unit of offloaded load does not exceed the small
/// cell's own.
pub fn profitability_threshold(sc: &BaseStation, mc: &BaseStation, phi: f64) -> Result<Option<f64>> {
    check_small_cell(sc)?;
    let denom = phi * mc.profile.dynamic_slope() - sc.profile.dynamic_slope();
    if denom > 0.0 {
        Ok(Some((sc.profile.p_op - sc.profile.p_sleep) / denom))
    } else {
        Ok(None)
    }
}

/// Change in network power from waking `sc` (taking back `sc_load` from the
/// macro cell) while every other station stays as it is.
pub fn delta_power_switch_on(
    sc: &BaseStation,
    mc: &BaseStation,
    phi: f64,
    sc_load: f64,
) -> Result<f64> {
    check_small_cell(sc)?;
    if !(0.0..=1.0).contains(&sc_load) {
        return Err(Error::domain(format!("small-cell load must lie in [0, 1], got {sc_load}")));
    }
    Ok(sc.profile.p_op + sc.profile.dynamic_slope() * sc_load
        - mc.profile.dynamic_slope() * phi * sc_load
        - sc.profile.p_sleep)
}
