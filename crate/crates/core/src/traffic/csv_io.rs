//! KPI and traffic CSV files.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a row
//! read from a file and written back keeps the digits it was printed with.

use std::collections::HashMap;
use std::io::{Read, Write};

use super::{KpiRecord, TrafficTrace};
use crate::error::{Error, Result};

pub const KPI_HEADER: [&str; 6] = [
    "cell_id",
    "tch_traffic_erl",
    "dl_edge_throughput_kbps",
    "pdch_congestion_pct",
    "preempt_pdch",
    "ts_count",
];

pub const TRAFFIC_HEADER: [&str; 3] = ["cell_id", "scan_index", "offered_erlang"];

/// Maps each required column to its position in the header.
fn locate_columns<const N: usize>(
    header: &csv::StringRecord,
    required: [&str; N],
) -> Result<[usize; N]> {
    let mut out = [0usize; N];
    for (slot, name) in out.iter_mut().zip(required) {
        *slot = header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse(0, format!("missing column `{name}`")))?;
    }
    Ok(out)
}

fn field<'r>(rec: &'r csv::StringRecord, idx: usize, name: &str, row: usize) -> Result<&'r str> {
    rec.get(idx)
        .map(str::trim)
        .ok_or_else(|| Error::parse(row, format!("missing value for `{name}`")))
}

fn number(rec: &csv::StringRecord, idx: usize, name: &str, row: usize) -> Result<f64> {
    let text = field(rec, idx, name, row)?;
    let v: f64 = text
        .parse()
        .map_err(|_| Error::parse(row, format!("`{name}` is not a number: {text:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(
            row,
            format!("`{name}` is not finite: {text:?}"),
        ));
    }
    if v < 0.0 {
        return Err(Error::parse(row, format!("`{name}` is negative: {text}")));
    }
    Ok(v)
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source)
}

/// Reads a KPI CSV. Rows are numbered from 1 (the first data row).
pub fn read_kpi_csv<R: Read>(source: R) -> Result<Vec<KpiRecord>> {
    let mut rdr = reader(source);
    let cols = locate_columns(rdr.headers()?, KPI_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let ts_text = field(&rec, cols[5], KPI_HEADER[5], row)?;
        let ts_count: u32 = ts_text
            .parse()
            .map_err(|_| Error::parse(row, format!("`ts_count` is not a count: {ts_text:?}")))?;
        let record = KpiRecord {
            cell_id: field(&rec, cols[0], KPI_HEADER[0], row)?.to_string(),
            tch_traffic_erl: number(&rec, cols[1], KPI_HEADER[1], row)?,
            dl_edge_throughput_kbps: number(&rec, cols[2], KPI_HEADER[2], row)?,
            pdch_congestion_pct: number(&rec, cols[3], KPI_HEADER[3], row)?,
            preempt_pdch: number(&rec, cols[4], KPI_HEADER[4], row)?,
            ts_count,
        };
        record.validate().map_err(|e| Error::parse(row, e))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_kpi_csv<W: Write>(sink: W, records: &[KpiRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(KPI_HEADER)?;
    for r in records {
        w.write_record([
            r.cell_id.clone(),
            r.tch_traffic_erl.to_string(),
            r.dl_edge_throughput_kbps.to_string(),
            r.pdch_congestion_pct.to_string(),
            r.preempt_pdch.to_string(),
            r.ts_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a long-format traffic CSV into one trace per cell, in order of
/// first appearance. Scan indices must run 0, 1, 2, ... per cell.
pub fn read_traffic_csv<R: Read>(source: R, scan_period_s: f64) -> Result<Vec<TrafficTrace>> {
    let mut rdr = reader(source);
    let cols = locate_columns(rdr.headers()?, TRAFFIC_HEADER)?;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut traces: Vec<TrafficTrace> = Vec::new();
    let mut rec = csv::StringRecord::new();
    let mut row = 0;
    while rdr.read_record(&mut rec)? {
        row += 1;
        let cell = field(&rec, cols[0], TRAFFIC_HEADER[0], row)?;
        let scan_text = field(&rec, cols[1], TRAFFIC_HEADER[1], row)?;
        let scan: usize = scan_text.parse().map_err(|_| {
            Error::parse(row, format!("`scan_index` is not an index: {scan_text:?}"))
        })?;
        let erl = number(&rec, cols[2], TRAFFIC_HEADER[2], row)?;
        let slot = match index.get(cell) {
            Some(&slot) => slot,
            None => {
                index.insert(cell.to_string(), traces.len());
                traces.push(TrafficTrace {
                    cell_id: cell.to_string(),
                    scan_period_s,
                    samples: Vec::new(),
                });
                traces.len() - 1
            }
        };
        let trace = &mut traces[slot];
        if scan != trace.samples.len() {
            return Err(Error::parse(
                row,
                format!(
                    "cell {cell}: expected scan_index {} but found {scan}",
                    trace.samples.len()
                ),
            ));
        }
        trace.samples.push(erl);
    }
    Ok(traces)
}

pub fn write_traffic_csv<W: Write>(sink: W, traces: &[TrafficTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(TRAFFIC_HEADER)?;
    let mut scan_buf = String::new();
    let mut erl_buf = String::new();
    for t in traces {
        for (i, v) in t.samples.iter().enumerate() {
            use std::fmt::Write as _;
            scan_buf.clear();
            erl_buf.clear();
            let _ = write!(scan_buf, "{i}");
            let _ = write!(erl_buf, "{v}");
            w.write_record([t.cell_id.as_str(), &scan_buf, &erl_buf])?;
        }
    }
    w.flush()?;
    Ok(())
}
