//! Physical channel layout of a GSM cell: TRXs of 8 TDMA time slots each,
//! control channels reserved at the start of TRX 1, and placement of
//! full-rate calls onto the remaining traffic slots.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const SLOTS_PER_TRX: u32 = 8;
pub const MAX_TRX: u32 = 12;
pub const MAX_CCH_SLOTS: u32 = 3;
pub const DEFAULT_CCH_SLOTS: u32 = 3;

/// 1-based TRX index. TRX 1 carries the control channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrxIndex(pub u32);

impl TrxIndex {
    pub const BCCH: TrxIndex = TrxIndex(1);
}

impl fmt::Display for TrxIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TRX{}", self.0)
    }
}

/// Static layout of one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellConfig {
    pub cell_id: String,
    pub num_trx: u32,
    pub cch_slots: u32,
}

impl CellConfig {
    pub fn new(cell_id: impl Into<String>, num_trx: u32, cch_slots: u32) -> Result<Self> {
        let config = CellConfig {
            cell_id: cell_id.into(),
            num_trx,
            cch_slots,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_TRX).contains(&self.num_trx) {
            return Err(Error::config(format!(
                "cell {}: num_trx {} outside 1..={MAX_TRX}",
                self.cell_id, self.num_trx
            )));
        }
        if !(1..=MAX_CCH_SLOTS).contains(&self.cch_slots) {
            return Err(Error::config(format!(
                "cell {}: cch_slots {} outside 1..={MAX_CCH_SLOTS}",
                self.cell_id, self.cch_slots
            )));
        }
        Ok(())
    }

    pub fn total_slots(&self) -> u32 {
        self.num_trx * SLOTS_PER_TRX
    }

    pub fn total_tch(&self) -> u32 {
        self.total_slots() - self.cch_slots
    }

    /// Derives the layout from a KPI row's time-slot count (`ts_count` is
    /// TRXs × 8).
    pub fn from_ts_count(
        cell_id: impl Into<String>,
        ts_count: u32,
        cch_slots: u32,
    ) -> Result<Self> {
        let cell_id = cell_id.into();
        if ts_count == 0 || !ts_count.is_multiple_of(SLOTS_PER_TRX) {
            return Err(Error::config(format!(
                "cell {cell_id}: ts_count {ts_count} is not a positive multiple of {SLOTS_PER_TRX}"
            )));
        }
        CellConfig::new(cell_id, ts_count / SLOTS_PER_TRX, cch_slots)
    }
}

/// How calls are laid onto free traffic slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MappingStrategy {
    /// Lowest-index free traffic slot first.
    Packed,
    /// Uniformly random free traffic slots drawn from a seeded generator.
    Scattered { seed: u64 },
}

/// Result of one placement round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub occupied: u32,
    pub blocked: u32,
}

/// Live state of a cell: which TRXs are powered and which slots carry calls.
///
/// Slot `s` of TRX `t` (both 0-based here) is bit `t * 8 + s` of the slot
/// masks; the CCH slots are the lowest bits of TRX 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellState {
    config: CellConfig,
    trx_enabled: u16,
    busy: u128,
    occupied_tch: u32,
}

impl CellState {
    /// All TRXs enabled, no calls.
    pub fn new(config: CellConfig) -> Result<Self> {
        config.validate()?;
        let trx_enabled = ((1u32 << config.num_trx) - 1) as u16;
        Ok(CellState {
            config,
            trx_enabled,
            busy: 0,
            occupied_tch: 0,
        })
    }

    pub fn config(&self) -> &CellConfig {
        &self.config
    }

    pub fn is_enabled(&self, trx: TrxIndex) -> bool {
        trx.0 >= 1 && trx.0 <= self.config.num_trx && self.trx_enabled & (1 << (trx.0 - 1)) != 0
    }

    /// Enable flags, index 0 is TRX 1.
    pub fn trx_enabled(&self) -> Vec<bool> {
        (1..=self.config.num_trx)
            .map(|t| self.is_enabled(TrxIndex(t)))
            .collect()
    }

    pub fn active_trx_count(&self) -> u32 {
        self.trx_enabled.count_ones()
    }

    /// Powered time slots, CCHs included.
    pub fn active_ts(&self) -> u32 {
        self.active_trx_count() * SLOTS_PER_TRX
    }

    pub fn enabled_tch_capacity(&self) -> u32 {
        self.active_ts() - self.config.cch_slots
    }

    pub fn occupied_tch(&self) -> u32 {
        self.occupied_tch
    }

    pub fn idle_tch_count(&self) -> u32 {
        self.enabled_tch_capacity() - self.occupied_tch
    }

    pub fn highest_enabled(&self) -> TrxIndex {
        TrxIndex(16 - self.trx_enabled.leading_zeros())
    }

    pub fn lowest_disabled(&self) -> Option<TrxIndex> {
        (2..=self.config.num_trx)
            .map(TrxIndex)
            .find(|&t| !self.is_enabled(t))
    }

    /// Bit mask of slots that may carry traffic right now.
    pub fn tch_mask(&self) -> u128 {
        let mut mask = 0u128;
        for t in 0..self.config.num_trx {
            if self.trx_enabled & (1 << t) != 0 {
                mask |= 0xffu128 << (t * SLOTS_PER_TRX);
            }
        }
        mask & !self.cch_mask()
    }

    pub fn cch_mask(&self) -> u128 {
        (1u128 << self.config.cch_slots) - 1
    }

    /// Bit mask of slots currently carrying a call.
    pub fn busy_mask(&self) -> u128 {
        self.busy
    }

    /// Whether slot `slot` (0-based) of TRX `trx` carries a call.
    pub fn slot_busy(&self, trx: TrxIndex, slot: u32) -> bool {
        debug_assert!(slot < SLOTS_PER_TRX);
        let bit = (trx.0 - 1) * SLOTS_PER_TRX + slot;
        self.busy & (1u128 << bit) != 0
    }

    /// Re-derives occupancy for `demand` concurrent calls on the enabled
    /// TRXs. Calls beyond the enabled capacity are blocked.
    pub fn place_calls(&mut self, demand: u32, strategy: MappingStrategy) -> Placement {
        let capacity = self.enabled_tch_capacity();
        let occupied = demand.min(capacity);
        let free = self.tch_mask();
        self.busy = match strategy {
            MappingStrategy::Packed => lowest_bits(free, occupied),
            MappingStrategy::Scattered { seed } => random_bits(free, occupied, seed),
        };
        self.occupied_tch = occupied;
        Placement {
            occupied,
            blocked: demand - occupied,
        }
    }

    pub(crate) fn set_enabled(&mut self, trx: TrxIndex, enabled: bool) {
        let bit = 1u16 << (trx.0 - 1);
        if enabled {
            self.trx_enabled |= bit;
        } else {
            self.trx_enabled &= !bit;
        }
        // calls on a switched-off TRX are handed back to the remaining ones
        self.busy &= self.tch_mask();
        let kept = self.busy.count_ones();
        if kept < self.occupied_tch {
            let missing = self.occupied_tch - kept;
            self.busy |= lowest_bits(self.tch_mask() & !self.busy, missing);
        }
    }
}

fn lowest_bits(mask: u128, n: u32) -> u128 {
    let mut out = 0u128;
    let mut rest = mask;
    for _ in 0..n {
        if rest == 0 {
            break;
        }
        let bit = rest & rest.wrapping_neg();
        out |= bit;
        rest &= !bit;
    }
    out
}

fn random_bits(mask: u128, n: u32, seed: u64) -> u128 {
    let mut slots: Vec<u32> = (0..128).filter(|b| mask & (1u128 << b) != 0).collect();
    let take = (n as usize).min(slots.len());
    let mut rng = seed::rng(seed);
    // partial Fisher-Yates
    for i in 0..take {
        let j = rng.random_range(i..slots.len());
        slots.swap(i, j);
    }
    slots[..take]
        .iter()
        .fold(0u128, |acc, &b| acc | (1u128 << b))
}
