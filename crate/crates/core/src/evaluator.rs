//! Network-wide runs with and without power saving, and their comparison.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell_model::{CellConfig, MappingStrategy, SLOTS_PER_TRX};
use crate::error::{Error, Result};
use crate::saving_engine::{run_cell, CellTimeline, PowerSavingParams, RunOptions};
use crate::seed;
use crate::traffic::{DemandModel, TrafficTrace};
use crate::tuner::HysteresisAssignment;

pub const SCHEMA_VERSION: u32 = 1;

/// One hour of 10 s scans.
pub const DEFAULT_SETTLE_SCANS: usize = 360;

/// Cells simulated concurrently before their timelines are handed out.
const CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    pub cells: Vec<CellConfig>,
    /// Matched to cells by `cell_id`.
    pub traces: Vec<TrafficTrace>,
    pub assignment: HysteresisAssignment,
    /// Used for cells missing from the assignment; `None` makes that an error.
    pub default_hysteresis: Option<u32>,
    /// Hysteresis is replaced per cell.
    pub base_params: PowerSavingParams,
    pub strategy: MappingStrategy,
    pub demand: DemandModel,
    /// Leading scans left out of the settled maxima.
    pub settle_scans: usize,
}

impl NetworkScenario {
    pub fn new(
        cells: Vec<CellConfig>,
        traces: Vec<TrafficTrace>,
        assignment: HysteresisAssignment,
    ) -> Self {
        NetworkScenario {
            cells,
            traces,
            assignment,
            default_hysteresis: None,
            base_params: PowerSavingParams::default(),
            strategy: MappingStrategy::Packed,
            demand: DemandModel::Rounded,
            settle_scans: DEFAULT_SETTLE_SCANS,
        }
    }

    /// Resolves every cell to its trace and parameter set.
    fn jobs(&self, ps_enabled: bool) -> Result<Vec<Job<'_>>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, cell)| {
                let trace = self
                    .traces
                    .iter()
                    .find(|t| t.cell_id == cell.cell_id)
                    .ok_or_else(|| {
                        Error::config(format!("no traffic trace for {}", cell.cell_id))
                    })?;
                let params = if ps_enabled {
                    let h = self
                        .assignment
                        .get(&cell.cell_id)
                        .or(self.default_hysteresis)
                        .ok_or_else(|| {
                            Error::config(format!("no hysteresis assigned to {}", cell.cell_id))
                        })?;
                    self.base_params.with_hysteresis(h)
                } else {
                    self.base_params
                };
                let opts = RunOptions {
                    strategy: match self.strategy {
                        MappingStrategy::Packed => MappingStrategy::Packed,
                        MappingStrategy::Scattered { seed } => MappingStrategy::Scattered {
                            seed: seed::derive(seed, &[seed::tag::SCATTER, i as u64]),
                        },
                    },
                    demand: match self.demand {
                        DemandModel::Rounded => DemandModel::Rounded,
                        DemandModel::Poisson { seed } => DemandModel::Poisson {
                            seed: seed::derive(seed, &[seed::tag::POISSON, i as u64]),
                        },
                    },
                    ps_enabled,
                };
                Ok(Job {
                    cell,
                    trace,
                    params,
                    opts,
                })
            })
            .collect()
    }
}

struct Job<'a> {
    cell: &'a CellConfig,
    trace: &'a TrafficTrace,
    params: PowerSavingParams,
    opts: RunOptions,
}

impl Job<'_> {
    fn run(&self) -> Result<CellTimeline> {
        run_cell(self.cell, &self.params, self.trace, self.opts)
    }
}

/// Runs every cell independently, in scenario order. With power saving off
/// the hysteresis assignment is not consulted.
pub fn simulate_network(scenario: &NetworkScenario, ps_enabled: bool) -> Result<Vec<CellTimeline>> {
    scenario
        .jobs(ps_enabled)?
        .par_iter()
        .map(Job::run)
        .collect()
}

/// Per-cell statistics over one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell_id: String,
    pub num_trx: u32,
    pub hysteresis: u32,
    pub scans: usize,
    pub max_active_ts: u32,
    /// Maximum after the settle window.
    pub settled_max_active_ts: u32,
    pub mean_active_ts: f64,
    pub max_active_trx: u32,
    pub settled_max_active_trx: u32,
    pub mean_active_trx: f64,
    pub trx_scans: u64,
    pub offered_calls: u64,
    pub blocked_calls: u64,
}

impl CellReport {
    pub fn from_timeline(t: &CellTimeline, settle_scans: usize) -> Self {
        let n = t.records.len();
        let settled = if settle_scans < n {
            &t.records[settle_scans..]
        } else {
            &t.records[..]
        };
        let trx_scans: u64 = t.records.iter().map(|r| r.active_trx as u64).sum();
        let ts_scans: u64 = t.records.iter().map(|r| r.active_ts as u64).sum();
        CellReport {
            cell_id: t.cell_id.clone(),
            num_trx: t.num_trx,
            hysteresis: t.hysteresis,
            scans: n,
            max_active_ts: t.records.iter().map(|r| r.active_ts).max().unwrap_or(0),
            settled_max_active_ts: settled.iter().map(|r| r.active_ts).max().unwrap_or(0),
            mean_active_ts: if n == 0 {
                0.0
            } else {
                ts_scans as f64 / n as f64
            },
            max_active_trx: t.records.iter().map(|r| r.active_trx).max().unwrap_or(0),
            settled_max_active_trx: settled.iter().map(|r| r.active_trx).max().unwrap_or(0),
            mean_active_trx: if n == 0 {
                0.0
            } else {
                trx_scans as f64 / n as f64
            },
            trx_scans,
            offered_calls: t.records.iter().map(|r| r.demand as u64).sum(),
            blocked_calls: t.records.iter().map(|r| r.blocked as u64).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub ps_enabled: bool,
    pub cells: Vec<CellReport>,
    pub total_trx_scans: u64,
    pub total_blocked_calls: u64,
}

impl NetworkReport {
    pub fn from_cells(ps_enabled: bool, cells: Vec<CellReport>) -> Self {
        NetworkReport {
            ps_enabled,
            total_trx_scans: cells.iter().map(|c| c.trx_scans).sum(),
            total_blocked_calls: cells.iter().map(|c| c.blocked_calls).sum(),
            cells,
        }
    }
}

/// Simulates the network a chunk of cells at a time, handing each timeline
/// to `on_timeline` in scenario order before it is dropped.
pub fn evaluate_network<F>(
    scenario: &NetworkScenario,
    ps_enabled: bool,
    mut on_timeline: F,
) -> Result<NetworkReport>
where
    F: FnMut(&CellTimeline) -> Result<()>,
{
    let jobs = scenario.jobs(ps_enabled)?;
    let mut cells = Vec::with_capacity(jobs.len());
    for chunk in jobs.chunks(CHUNK) {
        let timelines: Vec<CellTimeline> = chunk.par_iter().map(Job::run).collect::<Result<_>>()?;
        for t in &timelines {
            on_timeline(t)?;
            cells.push(CellReport::from_timeline(t, scenario.settle_scans));
        }
    }
    Ok(NetworkReport::from_cells(ps_enabled, cells))
}

/// `(without - with) / without * 100`; zero when nothing was active.
pub fn reduction_pct(without: u64, with: u64) -> f64 {
    if without == 0 {
        0.0
    } else {
        (without as f64 - with as f64) / without as f64 * 100.0
    }
}

/// One row of the before/after table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub cell_id: String,
    pub hysteresis: u32,
    pub ts_before: u32,
    pub max_ts_after: u32,
    pub mean_ts_after: f64,
    pub blocked_before: u64,
    pub blocked_after: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub rows: Vec<ComparisonRow>,
    /// Active TRX summed over every scan of every cell.
    pub trx_scans_without: u64,
    pub trx_scans_with: u64,
    pub reduction_pct: f64,
    /// Per-cell settled maximum of active TRX, summed over cells.
    pub max_trx_without: u64,
    pub max_trx_with: u64,
    pub max_reduction_pct: f64,
    pub blocked_without: u64,
    pub blocked_with: u64,
    pub blocking_delta: i64,
}

impl ComparisonSummary {
    pub fn reduction_pct_1dp(&self) -> String {
        format!("{:.1}", self.reduction_pct)
    }
}

/// Lines up the two runs cell by cell.
pub fn compare(with: &NetworkReport, without: &NetworkReport) -> Result<ComparisonSummary> {
    if with.cells.len() != without.cells.len() {
        return Err(Error::input(format!(
            "reports cover {} and {} cells",
            with.cells.len(),
            without.cells.len()
        )));
    }
    let mut rows = Vec::with_capacity(with.cells.len());
    for (on, off) in with.cells.iter().zip(&without.cells) {
        if on.cell_id != off.cell_id || on.scans != off.scans {
            return Err(Error::input(format!(
                "cell {} ({} scans) does not match {} ({} scans)",
                on.cell_id, on.scans, off.cell_id, off.scans
            )));
        }
        rows.push(ComparisonRow {
            cell_id: on.cell_id.clone(),
            hysteresis: on.hysteresis,
            ts_before: off.settled_max_active_ts,
            max_ts_after: on.settled_max_active_ts,
            mean_ts_after: on.mean_active_ts,
            blocked_before: off.blocked_calls,
            blocked_after: on.blocked_calls,
        });
    }
    let max_trx_without: u64 = without
        .cells
        .iter()
        .map(|c| c.settled_max_active_trx as u64)
        .sum();
    let max_trx_with: u64 = with
        .cells
        .iter()
        .map(|c| c.settled_max_active_trx as u64)
        .sum();
    Ok(ComparisonSummary {
        rows,
        trx_scans_without: without.total_trx_scans,
        trx_scans_with: with.total_trx_scans,
        reduction_pct: reduction_pct(without.total_trx_scans, with.total_trx_scans),
        max_trx_without,
        max_trx_with,
        max_reduction_pct: reduction_pct(max_trx_without, max_trx_with),
        blocked_without: without.total_blocked_calls,
        blocked_with: with.total_blocked_calls,
        blocking_delta: with.total_blocked_calls as i64 - without.total_blocked_calls as i64,
    })
}

/// Seed and parameters a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub params: PowerSavingParams,
    pub strategy: MappingStrategy,
    pub demand: DemandModel,
    pub settle_scans: usize,
    /// Distinct BTSPSHYST values in the assignment, ascending.
    pub assigned_hysteresis: Vec<u32>,
    pub default_hysteresis: Option<u32>,
}

impl RunMetadata {
    pub fn for_scenario(scenario: &NetworkScenario, seed: u64) -> Self {
        RunMetadata {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params: scenario.base_params,
            strategy: scenario.strategy,
            demand: scenario.demand,
            settle_scans: scenario.settle_scans,
            assigned_hysteresis: scenario
                .assignment
                .rows
                .iter()
                .map(|r| r.hysteresis)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect(),
            default_hysteresis: scenario.default_hysteresis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub schema_version: u32,
    pub metadata: RunMetadata,
    pub summary: ComparisonSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const COMPARISON_FILE: &str = "comparison.csv";
pub const CELL_DETAIL_FILE: &str = "cell_details.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const METADATA_FILE: &str = "run_metadata.json";

/// Writes the comparison into `dir` and returns the paths written.
///
/// CSV gives `comparison.csv` (`cell_id,ts_before,max_ts_after`),
/// `cell_details.csv` and `run_metadata.json`; JSON gives `summary.json`
/// holding the metadata and the full summary.
pub fn emit_report(
    summary: &ComparisonSummary,
    metadata: &RunMetadata,
    dir: &Path,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&ReportFormat::Csv) {
        let path = dir.join(COMPARISON_FILE);
        write_comparison_csv(create(&path)?, summary)?;
        written.push(path);
        let path = dir.join(CELL_DETAIL_FILE);
        write_cell_details_csv(create(&path)?, summary)?;
        written.push(path);
        let path = dir.join(METADATA_FILE);
        write_json(&path, metadata)?;
        written.push(path);
    }
    if formats.contains(&ReportFormat::Json) {
        let path = dir.join(SUMMARY_FILE);
        write_json(
            &path,
            &SummaryDocument {
                schema_version: SCHEMA_VERSION,
                metadata: metadata.clone(),
                summary: summary.clone(),
            },
        )?;
        written.push(path);
    }
    Ok(written)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_summary_json<R: Read>(source: R) -> Result<SummaryDocument> {
    let doc: SummaryDocument = serde_json::from_reader(source)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::input(format!(
            "unsupported schema version {}",
            doc.schema_version
        )));
    }
    Ok(doc)
}

pub fn write_comparison_csv<W: Write>(sink: W, summary: &ComparisonSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["cell_id", "ts_before", "max_ts_after"])?;
    for r in &summary.rows {
        w.write_record([
            r.cell_id.clone(),
            r.ts_before.to_string(),
            r.max_ts_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(cell_id, ts_before, max_ts_after)` rows of a comparison CSV.
pub fn read_comparison_csv<R: Read>(source: R) -> Result<Vec<(String, u32, u32)>> {
    let mut rdr = csv::Reader::from_reader(source);
    rdr.deserialize::<(String, u32, u32)>()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::parse(i + 1, e)))
        .collect()
}

fn write_cell_details_csv<W: Write>(sink: W, summary: &ComparisonSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "cell_id",
        "hysteresis",
        "ts_before",
        "max_ts_after",
        "mean_ts_after",
        "blocked_before",
        "blocked_after",
    ])?;
    for r in &summary.rows {
        w.write_record([
            r.cell_id.clone(),
            r.hysteresis.to_string(),
            r.ts_before.to_string(),
            r.max_ts_after.to_string(),
            format!("{:.3}", r.mean_ts_after),
            r.blocked_before.to_string(),
            r.blocked_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready `scan,erlang,active_ts` series.
pub fn write_timeline_csv<W: Write>(sink: W, timeline: &CellTimeline) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["scan", "erlang", "active_ts"])?;
    for (i, r) in timeline.records.iter().enumerate() {
        w.write_record([
            i.to_string(),
            r.offered_erlang.to_string(),
            r.active_ts.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Slots powered when every TRX of `cell` is on.
pub fn full_capacity_ts(cell: &CellConfig) -> u32 {
    cell.num_trx * SLOTS_PER_TRX
}
