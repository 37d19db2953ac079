//! Deployment construction for the homogeneous (A) and heterogeneous (B)
//! studies, plus custom small-cell mixes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::power_model::{validate_stations, BaseStation, BsType, PowerProfile};

/// Bandwidth of the macro cell and of each small cell, MHz.
pub const DEFAULT_BANDWIDTH_MHZ: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scenario {
    /// Micro cells only, zero sleep power.
    A,
    /// The four small-cell classes spread almost equally.
    B,
    /// Small cells spread almost equally over the given types.
    Custom(Vec<BsType>),
}

impl Scenario {
    /// Overload penalty used for this scenario when none is configured.
    pub fn default_kappa(&self) -> f64 {
        match self {
            Scenario::A => 20.0,
            Scenario::B | Scenario::Custom(_) => 10.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Custom(types) => {
                let names: Vec<&str> = types.iter().map(|t| t.name()).collect();
                write!(f, "custom({})", names.join("+"))
            }
            other => f.write_str(other.label()),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Scenario::A),
            "B" | "b" => Ok(Scenario::B),
            other => Err(Error::Config(format!(
                "unknown scenario `{other}` (use A, B, or custom with sc_types)"
            ))),
        }
    }
}

/// Splits `s` small cells over `kinds` as evenly as possible; the remainder
/// goes to the last kinds (13 over four kinds gives 3, 3, 3, 4).
pub fn type_counts(s: usize, kinds: usize) -> Vec<usize> {
    if kinds == 0 {
        return Vec::new();
    }
    let base = s / kinds;
    let extra = s % kinds;
    (0..kinds)
        .map(|k| base + usize::from(k >= kinds - extra))
        .collect()
}

/// Power profile per hardware class, starting from the reference table.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    profiles: BTreeMap<BsType, PowerProfile>,
}

impl Default for ProfileTable {
    fn default() -> Self {
        ProfileTable {
            profiles: BsType::ALL.iter().map(|&t| (t, t.default_profile())).collect(),
        }
    }
}

impl ProfileTable {
    pub fn get(&self, t: BsType) -> PowerProfile {
        self.profiles[&t]
    }

    pub fn set(&mut self, t: BsType, profile: PowerProfile) -> Result<()> {
        profile.validate()?;
        self.profiles.insert(t, profile);
        Ok(())
    }

    /// Stores without validating, for field-by-field edits validated later.
    pub(crate) fn set_unchecked(&mut self, t: BsType, profile: PowerProfile) {
        self.profiles.insert(t, profile);
    }

    pub fn iter(&self) -> impl Iterator<Item = (BsType, PowerProfile)> + '_ {
        self.profiles.iter().map(|(&t, &p)| (t, p))
    }
}

/// Small-cell types in station order (index 1 onwards).
pub fn small_cell_types(scenario: &Scenario, s: usize) -> Result<Vec<BsType>> {
    let kinds: Vec<BsType> = match scenario {
        Scenario::A => vec![BsType::Micro],
        Scenario::B => BsType::SMALL_CELLS.to_vec(),
        Scenario::Custom(kinds) => {
            if kinds.is_empty() || kinds.contains(&BsType::Macro) {
                return Err(Error::Config("custom scenario needs small-cell types only".into()));
            }
            kinds.clone()
        }
    };
    Ok(kinds
        .iter()
        .zip(type_counts(s, kinds.len()))
        .flat_map(|(&t, n)| std::iter::repeat_n(t, n))
        .collect())
}

/// Builds the macro cell plus `s` small cells for `scenario`.
pub fn build_stations(
    scenario: &Scenario,
    s: usize,
    profiles: &ProfileTable,
    macro_bandwidth: f64,
    small_cell_bandwidth: f64,
) -> Result<Vec<BaseStation>> {
    let mut stations = vec![BaseStation::new(
        0,
        BsType::Macro,
        profiles.get(BsType::Macro),
        macro_bandwidth,
    )?];
    for (k, t) in small_cell_types(scenario, s)?.into_iter().enumerate() {
        let mut profile = profiles.get(t);
        if *scenario == Scenario::A {
            profile.p_sleep = 0.0;
        }
        stations.push(BaseStation::new(k + 1, t, profile, small_cell_bandwidth)?);
    }
    validate_stations(&stations)?;
    Ok(stations)
}

/// Scenario stations with reference profiles and equal bandwidths.
pub fn default_stations(scenario: &Scenario, s: usize) -> Result<Vec<BaseStation>> {
    build_stations(
        scenario,
        s,
        &ProfileTable::default(),
        DEFAULT_BANDWIDTH_MHZ,
        DEFAULT_BANDWIDTH_MHZ,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remainder_goes_to_last_types() {
        assert_eq!(type_counts(13, 4), vec![3, 3, 3, 4]);
        assert_eq!(type_counts(14, 4), vec![3, 3, 4, 4]);
        assert_eq!(type_counts(4, 4), vec![1, 1, 1, 1]);
        assert_eq!(type_counts(2, 4), vec![0, 0, 1, 1]);
        assert_eq!(type_counts(0, 4), vec![0, 0, 0, 0]);
    }

    #[test]
    fn scenario_b_thirteen() {
        let st = default_stations(&Scenario::B, 13).unwrap();
        let count = |t| st.iter().filter(|b| b.bs_type == t).count();
        assert_eq!(
            [count(BsType::Micro), count(BsType::Rrh), count(BsType::Pico), count(BsType::Femto)],
            [3, 3, 3, 4]
        );
        assert_eq!(st[1].profile.p_sleep, 39.0);
    }

    #[test]
    fn scenario_a_zero_sleep_micro() {
        let st = default_stations(&Scenario::A, 5).unwrap();
        assert_eq!(st.len(), 6);
        assert!(st[1..].iter().all(|b| b.bs_type == BsType::Micro && b.profile.p_sleep == 0.0));
        assert_eq!(st[0].profile, BsType::Macro.default_profile());
    }

    #[test]
    fn profile_overrides_apply() {
        let mut table = ProfileTable::default();
        table.set(BsType::Pico, PowerProfile::new(4.0, 0.2, 7.0, 1.0).unwrap()).unwrap();
        let st = build_stations(&Scenario::Custom(vec![BsType::Pico]), 2, &table, 20.0, 10.0).unwrap();
        assert_eq!(st[2].profile.p_tx, 0.2);
        assert_eq!(st[1].relative_capacity(&st[0]), 0.5);
        assert!(small_cell_types(&Scenario::Custom(vec![BsType::Macro]), 2).is_err());
    }
}
