//! Cyclic BTS power-saving algorithm.
//!
//! Every scan (nominally 10 s) the engine compares the number of idle TCHs
//! against the hysteresis thresholds:
//!
//! ```text
//!   idle > BTSPSHYST + 9            -> off counter += 1, else max(off - 3, 0)
//!   idle < BTSPSHYST + on_offset    -> on counter  += 1, else max(on - 3, 0)
//! ```
//!
//! When the off counter reaches TRXOFFTARGET the highest enabled TRX is
//! switched off and disable-checking pauses for TRXOFFDELAY scans. When the
//! on counter reaches TRXONTARGET the lowest disabled TRX is switched back on.
//! TRX 1 carries the control channels and is never switched off.

use serde::{Deserialize, Serialize};

use crate::cell_model::{CellConfig, CellState, MappingStrategy, TrxIndex};
use crate::error::{Error, Result};
use crate::seed;
use crate::traffic::{DemandModel, TrafficTrace};

pub const FIXED_OFFSET: u32 = 9;
pub const DEFAULT_SCAN_PERIOD_S: f64 = 10.0;

/// The four operator parameters plus the engine constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSavingParams {
    /// TRXOFFTARGET, 20..=100.
    pub trx_off_target: u32,
    /// TRXONTARGET, 20..=100.
    pub trx_on_target: u32,
    /// TRXOFFDELAY in scans, 6..=90.
    pub trx_off_delay: u32,
    /// BTSPSHYST in idle-TCH units, 1..=1014.
    pub hysteresis: u32,
    pub fixed_offset: u32,
    /// Added to the hysteresis to form the switch-on threshold. 0 gives a
    /// hysteresis band as wide as `fixed_offset`.
    pub on_offset: u32,
    /// Counter decrement on a non-qualifying scan.
    pub decay_step: u32,
    pub scan_period_s: f64,
}

impl Default for PowerSavingParams {
    fn default() -> Self {
        PowerSavingParams {
            trx_off_target: 50,
            trx_on_target: 49,
            trx_off_delay: 30,
            hysteresis: 5,
            fixed_offset: FIXED_OFFSET,
            on_offset: 0,
            decay_step: 3,
            scan_period_s: DEFAULT_SCAN_PERIOD_S,
        }
    }
}

fn check_range(name: &'static str, value: u32, min: u32, max: u32) -> Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::Validation {
            name,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        })
    }
}

impl PowerSavingParams {
    pub fn with_hysteresis(mut self, hysteresis: u32) -> Self {
        self.hysteresis = hysteresis;
        self
    }

    /// Checks the operator ranges and engine constants.
    pub fn validate(self) -> Result<Self> {
        check_range("TRXOFFTARGET", self.trx_off_target, 20, 100)?;
        check_range("TRXONTARGET", self.trx_on_target, 20, 100)?;
        check_range("TRXOFFDELAY", self.trx_off_delay, 6, 90)?;
        check_range("BTSPSHYST", self.hysteresis, 1, 1014)?;
        check_range(
            "fixed_offset",
            self.fixed_offset,
            FIXED_OFFSET,
            FIXED_OFFSET,
        )?;
        check_range("on_offset", self.on_offset, 0, FIXED_OFFSET)?;
        check_range("decay_step", self.decay_step, 1, 100)?;
        if !(self.scan_period_s.is_finite() && self.scan_period_s > 0.0) {
            return Err(Error::config(format!(
                "scan_period_s must be positive, got {}",
                self.scan_period_s
            )));
        }
        Ok(self)
    }

    /// Idle TCHs must exceed this for a scan to count towards switch-off.
    pub fn off_threshold(&self) -> u32 {
        self.hysteresis + self.fixed_offset
    }

    /// Idle TCHs must fall below this for a scan to count towards switch-on.
    pub fn on_threshold(&self) -> u32 {
        self.hysteresis + self.on_offset
    }
}

/// Counters carried from scan to scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavingState {
    pub off_counter: u32,
    pub on_counter: u32,
    pub delay_remaining: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanAction {
    None,
    DisableTrx(TrxIndex),
    EnableTrx(TrxIndex),
}

/// What [`apply_action`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionOutcome {
    Applied,
    /// The disable would have left fewer TCHs than calls in progress.
    Deferred,
    Nothing,
}

/// One iteration of the algorithm over the cell's current occupancy.
pub fn scan_step(
    cell: &CellState,
    saving: SavingState,
    p: &PowerSavingParams,
) -> (SavingState, ScanAction) {
    let idle = cell.idle_tch_count();
    let mut next = saving;
    let mut disable = false;
    let mut enable = false;

    if saving.delay_remaining > 0 {
        next.delay_remaining = saving.delay_remaining - 1;
        next.off_counter = 0;
    } else if cell.active_trx_count() > 1 {
        next.off_counter = if idle > p.off_threshold() {
            saving.off_counter + 1
        } else {
            saving.off_counter.saturating_sub(p.decay_step)
        };
        disable = next.off_counter >= p.trx_off_target;
    } else {
        next.off_counter = 0;
    }

    if cell.lowest_disabled().is_some() {
        next.on_counter = if idle < p.on_threshold() {
            saving.on_counter + 1
        } else {
            saving.on_counter.saturating_sub(p.decay_step)
        };
        enable = next.on_counter >= p.trx_on_target;
    } else {
        next.on_counter = 0;
    }

    if enable {
        // capacity first: a pending disable is dropped
        next.on_counter = 0;
        if disable {
            next.off_counter = 0;
        }
        let trx = cell.lowest_disabled().expect("checked above");
        (next, ScanAction::EnableTrx(trx))
    } else if disable {
        next.off_counter = 0;
        next.delay_remaining = p.trx_off_delay;
        (next, ScanAction::DisableTrx(cell.highest_enabled()))
    } else {
        (next, ScanAction::None)
    }
}

/// Toggles the TRX named by `action`.
pub fn apply_action(cell: &mut CellState, action: ScanAction) -> Result<ActionOutcome> {
    match action {
        ScanAction::None => Ok(ActionOutcome::Nothing),
        ScanAction::DisableTrx(trx) => {
            if trx == TrxIndex::BCCH {
                return Err(Error::invariant(
                    "TRX1 carries the control channels and cannot be disabled",
                ));
            }
            if !cell.is_enabled(trx) {
                return Err(Error::invariant(format!("{trx} is not enabled")));
            }
            let capacity_after = cell.enabled_tch_capacity() - crate::cell_model::SLOTS_PER_TRX;
            if cell.occupied_tch() > capacity_after {
                return Ok(ActionOutcome::Deferred);
            }
            cell.set_enabled(trx, false);
            Ok(ActionOutcome::Applied)
        }
        ScanAction::EnableTrx(trx) => {
            if trx.0 < 1 || trx.0 > cell.config().num_trx {
                return Err(Error::invariant(format!("{trx} does not exist")));
            }
            if cell.is_enabled(trx) {
                return Err(Error::invariant(format!("{trx} is already enabled")));
            }
            cell.set_enabled(trx, true);
            Ok(ActionOutcome::Applied)
        }
    }
}

/// Per-scan knobs for [`run_cell`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub strategy: MappingStrategy,
    pub demand: DemandModel,
    pub ps_enabled: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strategy: MappingStrategy::Packed,
            demand: DemandModel::Rounded,
            ps_enabled: true,
        }
    }
}

/// One scan of a cell run. `active_trx`/`active_ts` describe the TRXs that
/// were powered while the scan's demand was served; `action` takes effect
/// from the next scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub offered_erlang: f64,
    pub demand: u32,
    pub occupied: u32,
    pub blocked: u32,
    pub active_trx: u32,
    pub active_ts: u32,
    pub off_counter: u32,
    pub on_counter: u32,
    pub delay_remaining: u32,
    pub action: ScanAction,
    pub deferred: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTimeline {
    pub cell_id: String,
    pub num_trx: u32,
    pub ps_enabled: bool,
    pub hysteresis: u32,
    pub scan_period_s: f64,
    pub records: Vec<ScanRecord>,
}

/// Runs the algorithm over a whole trace. With `ps_enabled = false` every
/// TRX stays on and only occupancy and blocking are tracked.
pub fn run_cell(
    config: &CellConfig,
    p: &PowerSavingParams,
    trace: &TrafficTrace,
    opts: RunOptions,
) -> Result<CellTimeline> {
    if trace.samples.is_empty() {
        return Err(Error::input(format!(
            "trace for {} is empty",
            config.cell_id
        )));
    }
    let p = p.validate()?;
    if (trace.scan_period_s - p.scan_period_s).abs() > 1e-9 {
        return Err(Error::input(format!(
            "trace period {} s does not match scan period {} s",
            trace.scan_period_s, p.scan_period_s
        )));
    }
    let mut cell = CellState::new(config.clone())?;
    let mut saving = SavingState::default();
    let mut demand_source = opts.demand.source();
    let mut records = Vec::with_capacity(trace.samples.len());

    for (scan, &offered) in trace.samples.iter().enumerate() {
        let demand = demand_source.demand(offered);
        let strategy = match opts.strategy {
            MappingStrategy::Packed => MappingStrategy::Packed,
            MappingStrategy::Scattered { seed } => MappingStrategy::Scattered {
                seed: seed::derive(seed, &[scan as u64]),
            },
        };
        let placement = cell.place_calls(demand, strategy);
        let active_trx = cell.active_trx_count();
        let active_ts = cell.active_ts();

        let (action, deferred) = if opts.ps_enabled {
            let (next, action) = scan_step(&cell, saving, &p);
            saving = next;
            let outcome = apply_action(&mut cell, action)?;
            (action, outcome == ActionOutcome::Deferred)
        } else {
            (ScanAction::None, false)
        };

        records.push(ScanRecord {
            offered_erlang: offered,
            demand,
            occupied: placement.occupied,
            blocked: placement.blocked,
            active_trx,
            active_ts,
            off_counter: saving.off_counter,
            on_counter: saving.on_counter,
            delay_remaining: saving.delay_remaining,
            action,
            deferred,
        });
    }

    Ok(CellTimeline {
        cell_id: config.cell_id.clone(),
        num_trx: config.num_trx,
        ps_enabled: opts.ps_enabled,
        hysteresis: p.hysteresis,
        scan_period_s: p.scan_period_s,
        records,
    })
}
