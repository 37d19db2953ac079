//! Traffic traces: CDR-style activity ingestion and a synthetic generator.
//!
//! Raw activity is combined per grid (call + sms + internet), grids are
//! assigned to cells (two for the macro cell, one per small cell, drawn
//! without replacement), and every cell's series is min-max normalized
//! *jointly* into load factors in `[0, 1]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::SlotDemand;

/// Slots in one day at 10-minute resolution.
pub const SLOTS_PER_DAY: usize = 144;
/// Duration of one slot, seconds.
pub const SLOT_SECONDS: f64 = 600.0;

pub const RAW_HEADER: [&str; 5] = ["grid_id", "slot", "call", "sms", "internet"];

/// One CDR activity record for one grid square and slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawActivity {
    pub grid_id: u64,
    pub slot: u64,
    pub call: f64,
    pub sms: f64,
    pub internet: f64,
}

impl RawActivity {
    pub fn combined(&self) -> f64 {
        self.call + self.sms + self.internet
    }
}

fn csv_error_line(err: &csv::Error) -> usize {
    err.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn parse_activity(field: Option<&str>, name: &str, line: usize) -> Result<f64> {
    let field = field.map(str::trim).unwrap_or("");
    if field.is_empty() {
        return Ok(0.0);
    }
    let v: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("{name}: `{field}` is not a number")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::parse(line, format!("{name}: activity must be finite and >= 0, got {v}")));
    }
    Ok(v)
}

fn parse_index(field: Option<&str>, name: &str, line: usize) -> Result<u64> {
    let field = field.map(str::trim).unwrap_or("");
    if field.is_empty() {
        return Err(Error::parse(line, format!("missing {name}")));
    }
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("{name}: `{field}` is not a non-negative integer")))
}

/// Parses activity records. Expects the header `grid_id,slot,call,sms,internet`;
/// empty or missing activity fields count as zero.
pub fn parse_raw_csv<R: Read>(reader: R) -> Result<Vec<RawActivity>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Err(Error::Input("activity file is empty".into())),
        Some(Err(e)) => return Err(Error::parse(csv_error_line(&e).max(1), e.to_string())),
        Some(Ok(h)) => h,
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != RAW_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header `{}`, got `{}`", RAW_HEADER.join(","), names.join(",")),
        ));
    }

    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::parse(csv_error_line(&e), e.to_string()))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() > RAW_HEADER.len() {
            return Err(Error::parse(line, format!("expected at most 5 fields, got {}", rec.len())));
        }
        out.push(RawActivity {
            grid_id: parse_index(rec.get(0), "grid_id", line)?,
            slot: parse_index(rec.get(1), "slot", line)?,
            call: parse_activity(rec.get(2), "call", line)?,
            sms: parse_activity(rec.get(3), "sms", line)?,
            internet: parse_activity(rec.get(4), "internet", line)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Input("activity file has a header but no records".into()));
    }
    Ok(out)
}

pub fn load_raw_csv(path: impl AsRef<Path>) -> Result<Vec<RawActivity>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_raw_csv(file)
}

/// Which grid squares feed which cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGridMap {
    pub macro_grids: [u64; 2],
    pub small_cell_grids: Vec<u64>,
}

impl CellGridMap {
    fn all(&self) -> impl Iterator<Item = u64> + '_ {
        self.macro_grids.iter().chain(&self.small_cell_grids).copied()
    }
}

/// Per-slot native demand of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficTrace {
    demands: Vec<Vec<f64>>,
    slot_seconds: f64,
    cell_grid_map: Option<CellGridMap>,
}

impl TrafficTrace {
    /// `demands[t][j]` is the load factor of cell `j` in slot `t`.
    pub fn new(demands: Vec<Vec<f64>>, slot_seconds: f64) -> Result<Self> {
        let width = demands.first().map(Vec::len).unwrap_or(0);
        if width == 0 {
            return Err(Error::Input("a trace needs at least one slot and one cell".into()));
        }
        for (t, row) in demands.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Input(format!("slot {t} has {} cells, expected {width}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Input(format!("slot {t} has demand {v} outside [0, 1]")));
            }
        }
        if !(slot_seconds > 0.0 && slot_seconds.is_finite()) {
            return Err(Error::Input(format!("slot duration must be > 0, got {slot_seconds}")));
        }
        Ok(TrafficTrace {
            demands,
            slot_seconds,
            cell_grid_map: None,
        })
    }

    pub fn slots(&self) -> usize {
        self.demands.len()
    }

    pub fn cells(&self) -> usize {
        self.demands[0].len()
    }

    pub fn small_cells(&self) -> usize {
        self.cells() - 1
    }

    pub fn slot_seconds(&self) -> f64 {
        self.slot_seconds
    }

    pub fn demands(&self) -> &[Vec<f64>] {
        &self.demands
    }

    pub fn cell_grid_map(&self) -> Option<&CellGridMap> {
        self.cell_grid_map.as_ref()
    }

    pub fn slot_demand(&self, t: usize) -> SlotDemand {
        SlotDemand::new(self.demands[t].clone()).expect("trace entries are validated load factors")
    }

    /// Mean over every entry of the demand matrix.
    pub fn mean_demand(&self) -> f64 {
        let n = (self.slots() * self.cells()) as f64;
        self.demands.iter().flatten().sum::<f64>() / n
    }

    /// Writes `slot,cell_0,...,cell_s` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["slot".to_string()];
        header.extend((0..self.cells()).map(|j| format!("cell_{j}")));
        w.write_record(&header)?;
        for (t, row) in self.demands.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<trace csv>", e))?;
        Ok(())
    }

    /// Reads the format produced by [`TrafficTrace::write_csv`]; slots must be
    /// numbered `0, 1, 2, ...` in order.
    pub fn read_csv<R: Read>(reader: R, slot_seconds: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            None => return Err(Error::Input("trace file is empty".into())),
            Some(Err(e)) => return Err(Error::parse(csv_error_line(&e).max(1), e.to_string())),
            Some(Ok(h)) => h,
        };
        let cells = header.len().saturating_sub(1);
        let well_formed = header.get(0).map(str::trim) == Some("slot")
            && (0..cells).all(|j| header.get(j + 1).map(str::trim) == Some(format!("cell_{j}").as_str()));
        if cells == 0 || !well_formed {
            return Err(Error::parse(1, "expected header `slot,cell_0,...,cell_s`"));
        }
        let mut demands = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| Error::parse(csv_error_line(&e), e.to_string()))?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let slot = parse_index(rec.get(0), "slot", line)?;
            if slot != demands.len() as u64 {
                return Err(Error::parse(line, format!("expected slot {}, got {slot}", demands.len())));
            }
            let row = (1..rec.len())
                .map(|k| {
                    let f = rec[k].trim();
                    match f.parse::<f64>() {
                        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
                        _ => Err(Error::parse(line, format!("demand `{f}` is not a load factor in [0, 1]"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            demands.push(row);
        }
        TrafficTrace::new(demands, slot_seconds)
    }
}

/// Min-max normalizes all series together; a constant input maps to zero.
pub fn normalize_jointly(series: &mut [Vec<f64>]) {
    let (lo, hi) = series
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    for v in series.iter_mut().flatten() {
        *v = if span > 0.0 {
            // scale to 0..100, then read back as a load factor
            (100.0 * (*v - lo) / span) / 100.0
        } else {
            0.0
        };
    }
}

/// Combined activity per grid, keyed by slot. Rejects duplicated and gapped slots.
fn activity_by_grid(raw: &[RawActivity]) -> Result<BTreeMap<u64, Vec<f64>>> {
    let mut grids: BTreeMap<u64, BTreeMap<u64, f64>> = BTreeMap::new();
    for rec in raw {
        if grids.entry(rec.grid_id).or_default().insert(rec.slot, rec.combined()).is_some() {
            return Err(Error::Input(format!(
                "grid {} has two records for slot {}",
                rec.grid_id, rec.slot
            )));
        }
    }
    grids
        .into_iter()
        .map(|(grid, by_slot)| {
            let first = *by_slot.keys().next().expect("grid has at least one record");
            if let Some((k, (&slot, _))) = by_slot
                .iter()
                .enumerate()
                .find(|(k, (&slot, _))| slot != first + *k as u64)
            {
                return Err(Error::Input(format!(
                    "grid {grid} skips slots: expected slot {}, found {slot}",
                    first + k as u64
                )));
            }
            Ok((grid, by_slot.into_values().collect()))
        })
        .collect()
}

/// Builds a trace from an explicit grid assignment, using the first `slots`
/// slots of every grid.
pub fn build_trace_with_map(raw: &[RawActivity], map: CellGridMap, slots: usize) -> Result<TrafficTrace> {
    if slots == 0 {
        return Err(Error::Input("a trace needs at least one slot".into()));
    }
    let mut seen: Vec<u64> = map.all().collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input("a grid may feed only one cell".into()));
    }
    let grids = activity_by_grid(raw)?;
    let series_of = |g: u64| -> Result<&[f64]> {
        let s = grids
            .get(&g)
            .ok_or_else(|| Error::Input(format!("grid {g} does not appear in the data")))?;
        if s.len() < slots {
            return Err(Error::Input(format!("grid {g} has {} slots, need {slots}", s.len())));
        }
        Ok(&s[..slots])
    };

    let (m0, m1) = (series_of(map.macro_grids[0])?, series_of(map.macro_grids[1])?);
    let mut cells: Vec<Vec<f64>> = vec![m0.iter().zip(m1).map(|(a, b)| a + b).collect()];
    for &g in &map.small_cell_grids {
        cells.push(series_of(g)?.to_vec());
    }
    normalize_jointly(&mut cells);

    let demands = (0..slots)
        .map(|t| cells.iter().map(|c| c[t]).collect())
        .collect();
    let mut trace = TrafficTrace::new(demands, SLOT_SECONDS)?;
    trace.cell_grid_map = Some(map);
    Ok(trace)
}

/// Draws `s + 2` distinct grids with at least `slots` records (two for the
/// macro cell, one per small cell) and builds the normalized trace.
pub fn build_trace(raw: &[RawActivity], s: usize, seed: u64, slots: usize) -> Result<TrafficTrace> {
    let grids = activity_by_grid(raw)?;
    let eligible: Vec<u64> = grids
        .iter()
        .filter(|(_, series)| series.len() >= slots)
        .map(|(&g, _)| g)
        .collect();
    if eligible.len() < s + 2 {
        return Err(Error::Input(format!(
            "need {} grids with at least {slots} slots, found {}",
            s + 2,
            eligible.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, eligible.len(), s + 2).into_vec();
    let map = CellGridMap {
        macro_grids: [eligible[picks[0]], eligible[picks[1]]],
        small_cell_grids: picks[2..].iter().map(|&i| eligible[i]).collect(),
    };
    build_trace_with_map(raw, map, slots)
}

/// Shape of the synthetic diurnal load generator.
///
/// Cell `j` follows `mid_j - amp_j * cos(2 pi t / period + phase_j) + noise`,
/// clamped to `[0, 1]`, with `amp_j` uniform in `amplitude`, `phase_j` uniform
/// in `[-phase_jitter, phase_jitter]` and noise uniform in `[-noise, noise]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub macro_midpoint: f64,
    pub small_cell_midpoint: f64,
    pub amplitude: (f64, f64),
    pub noise: f64,
    pub phase_jitter: f64,
    pub period_slots: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        // The macro cell aggregates two grids, so it runs roughly twice as hot
        // as a small cell after joint normalization.
        SyntheticConfig {
            macro_midpoint: 0.45,
            small_cell_midpoint: 0.25,
            amplitude: (0.1, 0.2),
            noise: 0.05,
            phase_jitter: PI / 6.0,
            period_slots: SLOTS_PER_DAY,
        }
    }
}

impl SyntheticConfig {
    /// Every cell centred on the same midpoint.
    pub fn uniform(midpoint: f64) -> Self {
        SyntheticConfig {
            macro_midpoint: midpoint,
            small_cell_midpoint: midpoint,
            ..SyntheticConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        let (lo, hi) = self.amplitude;
        if !in_unit(self.macro_midpoint) || !in_unit(self.small_cell_midpoint) {
            return Err(Error::Config("synthetic midpoints must lie in [0, 1]".into()));
        }
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::Config(format!("bad amplitude range ({lo}, {hi})")));
        }
        if !(0.0..=1.0).contains(&self.noise) || !(self.phase_jitter >= 0.0 && self.phase_jitter.is_finite()) {
            return Err(Error::Config("noise must lie in [0, 1], phase jitter must be >= 0".into()));
        }
        if self.period_slots == 0 {
            return Err(Error::Config("period must be at least one slot".into()));
        }
        Ok(())
    }
}

pub fn synthetic_trace(s: usize, slots: usize, seed: u64) -> Result<TrafficTrace> {
    synthetic_trace_with(&SyntheticConfig::default(), s, slots, seed)
}

/// Random draws happen in a fixed order: per cell (amplitude, phase), then per
/// slot per cell one noise sample.
pub fn synthetic_trace_with(cfg: &SyntheticConfig, s: usize, slots: usize, seed: u64) -> Result<TrafficTrace> {
    cfg.validate()?;
    if slots == 0 {
        return Err(Error::Input("a trace needs at least one slot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape: Vec<(f64, f64, f64)> = (0..=s)
        .map(|j| {
            let mid = if j == 0 { cfg.macro_midpoint } else { cfg.small_cell_midpoint };
            let amp = rng.gen_range(cfg.amplitude.0..=cfg.amplitude.1);
            let phase = rng.gen_range(-cfg.phase_jitter..=cfg.phase_jitter);
            (mid, amp, phase)
        })
        .collect();
    let omega = 2.0 * PI / cfg.period_slots as f64;
    let demands = (0..slots)
        .map(|t| {
            shape
                .iter()
                .map(|&(mid, amp, phase)| {
                    let noise = rng.gen_range(-cfg.noise..=cfg.noise);
                    (mid - amp * (omega * t as f64 + phase).cos() + noise).clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect();
    TrafficTrace::new(demands, SLOT_SECONDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<RawActivity>> {
        parse_raw_csv(text.as_bytes())
    }

    #[test]
    fn parses_rows() {
        let recs = parse("grid_id,slot,call,sms,internet\n5,0,1.5,0.3,7.2\n5,1,0,0,1\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(
            recs[0],
            RawActivity {
                grid_id: 5,
                slot: 0,
                call: 1.5,
                sms: 0.3,
                internet: 7.2
            }
        );
    }

    #[test]
    fn missing_activity_is_zero() {
        let recs = parse("grid_id,slot,call,sms,internet\n5,0,1.5,,7.2\n6,0,2\n").unwrap();
        assert_eq!(recs[0].sms, 0.0);
        assert_eq!(recs[0].internet, 7.2);
        assert_eq!((recs[1].sms, recs[1].internet), (0.0, 0.0));
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse("grid_id,slot,call,sms,internet\n5,0,1,1,1\n5,x,1,1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("grid_id,slot,call,sms,internet\n5,0,-1,1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("grid_id,slot,call,sms,internet\n5,0,1,1,1,9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_and_headerless_inputs_fail() {
        assert!(matches!(parse(""), Err(Error::Input(_))));
        assert!(matches!(parse("grid_id,slot,call,sms,internet\n"), Err(Error::Input(_))));
        assert!(matches!(parse("a,b,c\n1,2,3\n"), Err(Error::Parse { line: 1, .. })));
    }

    fn raw(grid: u64, values: &[f64]) -> Vec<RawActivity> {
        values
            .iter()
            .enumerate()
            .map(|(t, &v)| RawActivity {
                grid_id: grid,
                slot: t as u64,
                call: v,
                sms: 0.0,
                internet: 0.0,
            })
            .collect()
    }

    #[test]
    fn joint_normalization_by_hand() {
        // macro = grids 1 + 2, small cell = grid 3; slot 1 pins the minimum at 0
        let mut data = raw(1, &[3.0, 0.0]);
        data.extend(raw(2, &[4.0, 0.0]));
        data.extend(raw(3, &[7.0, 0.0]));
        let map = CellGridMap {
            macro_grids: [1, 2],
            small_cell_grids: vec![3],
        };
        let trace = build_trace_with_map(&data, map, 2).unwrap();
        assert_eq!(trace.demands(), &[vec![1.0, 1.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn constant_activity_maps_to_zero() {
        let mut data = raw(1, &[2.5; 4]);
        data.extend(raw(2, &[2.5; 4]));
        let map = CellGridMap {
            macro_grids: [1, 2],
            small_cell_grids: vec![],
        };
        let trace = build_trace_with_map(&data, map, 4).unwrap();
        assert!(trace.demands().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn activities_are_summed_per_grid() {
        let data = vec![
            RawActivity { grid_id: 1, slot: 0, call: 1.0, sms: 2.0, internet: 3.0 },
            RawActivity { grid_id: 1, slot: 1, call: 0.0, sms: 0.0, internet: 0.0 },
            RawActivity { grid_id: 2, slot: 0, call: 0.0, sms: 0.0, internet: 0.0 },
            RawActivity { grid_id: 2, slot: 1, call: 0.0, sms: 0.0, internet: 0.0 },
            RawActivity { grid_id: 3, slot: 0, call: 0.0, sms: 0.0, internet: 3.0 },
            RawActivity { grid_id: 3, slot: 1, call: 0.0, sms: 0.0, internet: 0.0 },
        ];
        let map = CellGridMap { macro_grids: [1, 2], small_cell_grids: vec![3] };
        let trace = build_trace_with_map(&data, map, 2).unwrap();
        assert_eq!(trace.demands()[0], vec![1.0, 0.5]);
    }

    #[test]
    fn build_trace_is_deterministic_and_samples_without_replacement() {
        let data: Vec<RawActivity> = (0..12u64)
            .flat_map(|g| raw(g, &(0..10).map(|t| ((g * 7 + t) % 5) as f64).collect::<Vec<_>>()))
            .collect();
        let a = build_trace(&data, 6, 11, 10).unwrap();
        let b = build_trace(&data, 6, 11, 10).unwrap();
        assert_eq!(a, b);
        let map = a.cell_grid_map().unwrap();
        let mut grids: Vec<u64> = map.all().collect();
        grids.sort_unstable();
        grids.dedup();
        assert_eq!(grids.len(), 8);
        assert_eq!(a.cells(), 7);
        let max = a.demands().iter().flatten().cloned().fold(f64::MIN, f64::max);
        let min = a.demands().iter().flatten().cloned().fold(f64::MAX, f64::min);
        assert_eq!((min, max), (0.0, 1.0));
    }

    #[test]
    fn build_trace_rejects_short_data() {
        let data: Vec<RawActivity> = (0..3u64).flat_map(|g| raw(g, &[1.0, 2.0])).collect();
        assert!(matches!(build_trace(&data, 2, 0, 2), Err(Error::Input(_))));
        assert!(matches!(build_trace(&data, 1, 0, 3), Err(Error::Input(_))));
        assert!(build_trace(&data, 1, 0, 2).is_ok());
    }

    #[test]
    fn gaps_and_duplicates_are_rejected() {
        let mut data = raw(1, &[1.0, 2.0]);
        data.push(RawActivity { grid_id: 1, slot: 5, call: 1.0, sms: 0.0, internet: 0.0 });
        data.extend(raw(2, &[1.0, 2.0, 3.0]));
        let map = CellGridMap { macro_grids: [1, 2], small_cell_grids: vec![] };
        assert!(build_trace_with_map(&data, map.clone(), 2).is_err());

        let mut data = raw(1, &[1.0, 2.0]);
        data.extend(raw(2, &[1.0, 2.0]));
        data.extend(raw(2, &[1.0]));
        assert!(build_trace_with_map(&data, map, 2).is_err());

        let data: Vec<RawActivity> = (0..3u64).flat_map(|g| raw(g, &[1.0, 2.0])).collect();
        let reused = CellGridMap { macro_grids: [1, 2], small_cell_grids: vec![2] };
        assert!(build_trace_with_map(&data, reused, 2).is_err());
    }

    #[test]
    fn synthetic_is_deterministic_and_bounded() {
        let a = synthetic_trace(4, 144, 7).unwrap();
        let b = synthetic_trace(4, 144, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, synthetic_trace(4, 144, 8).unwrap());
        assert_eq!((a.slots(), a.cells()), (144, 5));
        assert!(a.demands().iter().flatten().all(|v| (0.0..=1.0).contains(v)));

        let hot = synthetic_trace_with(&SyntheticConfig { noise: 0.5, ..SyntheticConfig::uniform(0.95) }, 3, 144, 1)
            .unwrap();
        assert!(hot.demands().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn synthetic_mean_over_a_period() {
        // no clamping: mid 0.5, amplitude <= 0.2, noise 0.05
        let cfg = SyntheticConfig::uniform(0.5);
        let trace = synthetic_trace_with(&cfg, 6, 144, 3).unwrap();
        for j in 0..trace.cells() {
            let mean = trace.demands().iter().map(|r| r[j]).sum::<f64>() / 144.0;
            // a full cosine period sums to zero, so only the noise moves the mean
            assert!((mean - 0.5).abs() <= cfg.noise, "cell {j}: {mean}");
        }
    }

    #[test]
    fn trace_csv_round_trip() {
        let trace = synthetic_trace(3, 20, 5).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("slot,cell_0,cell_1,cell_2,cell_3\n0,"));
        let back = TrafficTrace::read_csv(buf.as_slice(), SLOT_SECONDS).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn trace_csv_rejects_garbage() {
        assert!(TrafficTrace::read_csv("".as_bytes(), 600.0).is_err());
        assert!(TrafficTrace::read_csv("slot,cell_0\n1,0.5\n".as_bytes(), 600.0).is_err());
        assert!(TrafficTrace::read_csv("slot,cell_0\n0,1.5\n".as_bytes(), 600.0).is_err());
        assert!(TrafficTrace::read_csv("slot,cell_1\n0,0.5\n".as_bytes(), 600.0).is_err());
    }
}
