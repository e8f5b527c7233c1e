//! Desk-scale synthetic network: a fleet of cells in four traffic classes
//! with day/night traffic, used when operator counters are not available.

use serde::{Deserialize, Serialize};

use super::{
    generate_diurnal_trace, trace_to_kpis, uniform, DiurnalProfileSpec, KpiRecord, KpiSynthesis,
    TrafficTrace,
};
use crate::cell_model::{CellConfig, DEFAULT_CCH_SLOTS};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrafficClass {
    Low,
    Medium,
    High,
    /// Demand at or above the TCH capacity around the clock.
    Saturated,
}

/// Class sequence repeated over the fleet: 6 low, 6 medium, 6 high and
/// 2 saturated cells per 20.
const CLASS_PATTERN: [TrafficClass; 20] = {
    use TrafficClass::*;
    [
        Low, Medium, High, Low, Medium, High, Low, Medium, High, Saturated, Low, Medium, High, Low,
        Medium, High, Low, Medium, High, Saturated,
    ]
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetCell {
    pub config: CellConfig,
    pub class: TrafficClass,
    pub profile: DiurnalProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub cells: usize,
    pub days: u32,
    pub seed: u64,
    pub scan_period_s: u32,
}

impl FleetSpec {
    pub fn new(cells: usize, days: u32, seed: u64) -> Self {
        FleetSpec {
            cells,
            days,
            seed,
            scan_period_s: 10,
        }
    }
}

/// Lays out the fleet. Cell `i` is named `Cell_{i+1}`.
pub fn synthetic_fleet(spec: &FleetSpec) -> Result<Vec<FleetCell>> {
    if spec.cells == 0 {
        return Err(Error::config("fleet needs at least one cell"));
    }
    if spec.days == 0 {
        return Err(Error::config("fleet needs at least one day"));
    }
    (0..spec.cells)
        .map(|i| {
            let class = CLASS_PATTERN[i % CLASS_PATTERN.len()];
            let cell_seed = seed::derive(spec.seed, &[seed::tag::CELL_PROFILE, i as u64]);
            let mut rng = seed::rng(cell_seed);
            let (num_trx, base, peak, noise) = match class {
                TrafficClass::Low => (
                    3,
                    uniform(&mut rng, 0.05, 0.3),
                    uniform(&mut rng, 1.6, 2.8),
                    0.25,
                ),
                TrafficClass::Medium => (
                    3,
                    uniform(&mut rng, 0.3, 0.8),
                    uniform(&mut rng, 4.5, 6.5),
                    0.35,
                ),
                TrafficClass::High => (
                    4,
                    uniform(&mut rng, 7.0, 9.0),
                    uniform(&mut rng, 14.0, 20.0),
                    0.5,
                ),
                TrafficClass::Saturated => (
                    4,
                    uniform(&mut rng, 30.0, 31.0),
                    uniform(&mut rng, 33.0, 35.0),
                    0.3,
                ),
            };
            let peak_hour = 11 + (uniform(&mut rng, 0.0, 10.0) as u32).min(9);
            let trough_hour = 3 + (uniform(&mut rng, 0.0, 3.0) as u32).min(2);
            Ok(FleetCell {
                config: CellConfig::new(format!("Cell_{}", i + 1), num_trx, DEFAULT_CCH_SLOTS)?,
                class,
                profile: DiurnalProfileSpec {
                    base_erlang: base,
                    peak_erlang: peak,
                    peak_hour,
                    trough_hour,
                    noise_sigma: noise,
                    days: spec.days,
                    seed: seed::derive(cell_seed, &[0]),
                    scan_period_s: spec.scan_period_s,
                },
            })
        })
        .collect()
}

/// Traces and synthesized busy-hour KPIs for every fleet cell, in fleet order.
pub fn materialize(
    fleet: &[FleetCell],
    synth: &KpiSynthesis,
) -> Result<(Vec<TrafficTrace>, Vec<KpiRecord>)> {
    use rayon::prelude::*;
    let pairs: Vec<Result<(TrafficTrace, KpiRecord)>> = fleet
        .par_iter()
        .map(|cell| {
            let trace = generate_diurnal_trace(&cell.config.cell_id, &cell.profile)?;
            let kpi = trace_to_kpis(&trace, &cell.config, synth)?;
            Ok((trace, kpi))
        })
        .collect();
    let mut traces = Vec::with_capacity(fleet.len());
    let mut kpis = Vec::with_capacity(fleet.len());
    for p in pairs {
        let (t, k) = p?;
        traces.push(t);
        kpis.push(k);
    }
    Ok((traces, kpis))
}
