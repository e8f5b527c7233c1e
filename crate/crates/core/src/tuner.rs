//! Cluster severity ranking and the cluster → BTSPSHYST mapping.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::KpiRecord;

/// Mean KPIs of one cluster, in original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub cluster_id: usize,
    pub tch_traffic_erl: f64,
    pub dl_edge_throughput_kbps: f64,
    pub pdch_congestion_pct: f64,
    pub preempt_pdch: f64,
    pub member_count: usize,
}

/// Per-cluster KPI means. Clusters without members are left out.
pub fn profile_clusters(labels: &[usize], kpis: &[KpiRecord]) -> Result<Vec<ClusterProfile>> {
    if labels.len() != kpis.len() {
        return Err(Error::input(format!(
            "{} cluster labels for {} KPI rows",
            labels.len(),
            kpis.len()
        )));
    }
    let mut groups: BTreeMap<usize, Vec<&KpiRecord>> = BTreeMap::new();
    for (&l, k) in labels.iter().zip(kpis) {
        groups.entry(l).or_default().push(k);
    }
    Ok(groups
        .into_iter()
        .map(|(cluster_id, members)| {
            let n = members.len() as f64;
            let mean = |f: fn(&KpiRecord) -> f64| members.iter().map(|k| f(k)).sum::<f64>() / n;
            ClusterProfile {
                cluster_id,
                tch_traffic_erl: mean(|k| k.tch_traffic_erl),
                dl_edge_throughput_kbps: mean(|k| k.dl_edge_throughput_kbps),
                pdch_congestion_pct: mean(|k| k.pdch_congestion_pct),
                preempt_pdch: mean(|k| k.preempt_pdch),
                member_count: members.len(),
            }
        })
        .collect())
}

/// How clusters are ordered from least to most loaded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum SeverityScore {
    /// Mean busy-hour Erlang.
    #[default]
    Traffic,
    /// Weighted sum of the profiles' z-scores of traffic, PDCH congestion
    /// and PDCH pre-emption.
    Composite {
        traffic: f64,
        congestion: f64,
        preemption: f64,
    },
}

impl SeverityScore {
    pub fn composite() -> Self {
        SeverityScore::Composite {
            traffic: 1.0,
            congestion: 1.0,
            preemption: 1.0,
        }
    }

    pub fn scores(&self, profiles: &[ClusterProfile]) -> Vec<f64> {
        match *self {
            SeverityScore::Traffic => profiles.iter().map(|p| p.tch_traffic_erl).collect(),
            SeverityScore::Composite {
                traffic,
                congestion,
                preemption,
            } => {
                let zt = z_scores(profiles.iter().map(|p| p.tch_traffic_erl));
                let zc = z_scores(profiles.iter().map(|p| p.pdch_congestion_pct));
                let zp = z_scores(profiles.iter().map(|p| p.preempt_pdch));
                (0..profiles.len())
                    .map(|i| traffic * zt[i] + congestion * zc[i] + preemption * zp[i])
                    .collect()
            }
        }
    }
}

fn z_scores(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    v.iter()
        .map(|x| if std > 0.0 { (x - mean) / std } else { 0.0 })
        .collect()
}

/// BTSPSHYST per severity rank, lowest severity first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HysteresisPolicy {
    values: Vec<u32>,
}

impl Default for HysteresisPolicy {
    fn default() -> Self {
        HysteresisPolicy {
            values: vec![4, 6, 12],
        }
    }
}

impl HysteresisPolicy {
    /// Values must lie in 1..=1014 and must not decrease with severity.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::config("hysteresis policy is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(1..=1014).contains(*v)) {
            return Err(Error::Validation {
                name: "BTSPSHYST",
                value: *v as i64,
                min: 1,
                max: 1014,
            });
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config(format!(
                "hysteresis policy {values:?} must not decrease with severity"
            )));
        }
        Ok(HysteresisPolicy { values })
    }

    /// Parses `4,6,12`.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::config(format!("bad policy value {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRow {
    pub cell_id: String,
    pub cluster: usize,
    pub hysteresis: u32,
}

/// One row per clustered cell, in input order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HysteresisAssignment {
    pub rows: Vec<AssignmentRow>,
}

impl HysteresisAssignment {
    pub fn get(&self, cell_id: &str) -> Option<u32> {
        self.rows
            .iter()
            .find(|r| r.cell_id == cell_id)
            .map(|r| r.hysteresis)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Orders clusters by severity (ties: lower cluster id first) and gives the
/// cluster at rank `r` the policy's `r`-th value; every cell inherits its
/// cluster's value.
pub fn rank_and_assign(
    profiles: &[ClusterProfile],
    policy: &HysteresisPolicy,
    score: SeverityScore,
    cell_ids: &[String],
    labels: &[usize],
) -> Result<HysteresisAssignment> {
    if profiles.len() != policy.len() {
        return Err(Error::config(format!(
            "{} clusters but the hysteresis policy has {} values",
            profiles.len(),
            policy.len()
        )));
    }
    if cell_ids.len() != labels.len() {
        return Err(Error::input(format!(
            "{} cells for {} labels",
            cell_ids.len(),
            labels.len()
        )));
    }
    let scores = score.scores(profiles);
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(profiles[a].cluster_id.cmp(&profiles[b].cluster_id))
    });
    let by_cluster: BTreeMap<usize, u32> = order
        .iter()
        .enumerate()
        .map(|(rank, &p)| (profiles[p].cluster_id, policy.values()[rank]))
        .collect();
    let rows = cell_ids
        .iter()
        .zip(labels)
        .map(|(id, &l)| {
            by_cluster
                .get(&l)
                .map(|&h| AssignmentRow {
                    cell_id: id.clone(),
                    cluster: l,
                    hysteresis: h,
                })
                .ok_or_else(|| Error::input(format!("cell {id} is in unprofiled cluster {l}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HysteresisAssignment { rows })
}

pub const ASSIGNMENT_HEADER: [&str; 3] = ["cell_id", "cluster", "hysteresis"];

pub fn write_assignment_csv<W: Write>(sink: W, a: &HysteresisAssignment) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ASSIGNMENT_HEADER)?;
    for r in &a.rows {
        w.write_record([
            r.cell_id.clone(),
            r.cluster.to_string(),
            r.hysteresis.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Operator change-request sheet: `cell_id,BTSPSHYST`.
pub fn write_parameter_push_csv<W: Write>(sink: W, a: &HysteresisAssignment) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["cell_id", "BTSPSHYST"])?;
    for r in &a.rows {
        w.write_record([r.cell_id.clone(), r.hysteresis.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_assignment_csv<R: Read>(source: R) -> Result<HysteresisAssignment> {
    let mut rdr = csv::Reader::from_reader(source);
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<AssignmentRow>().enumerate() {
        let row = rec.map_err(|e| Error::parse(i + 1, e))?;
        if !(1..=1014).contains(&row.hysteresis) {
            return Err(Error::parse(
                i + 1,
                format!("BTSPSHYST {} outside 1..=1014", row.hysteresis),
            ));
        }
        rows.push(row);
    }
    Ok(HysteresisAssignment { rows })
}

/// Reads the `cell_id` and `cluster` columns of a cluster CSV (extra
/// columns such as the KPI values are ignored).
pub fn read_cluster_labels<R: Read>(source: R) -> Result<Vec<(String, usize)>> {
    #[derive(Deserialize)]
    struct Row {
        cell_id: String,
        cluster: usize,
    }
    let mut rdr = csv::Reader::from_reader(source);
    rdr.deserialize::<Row>()
        .enumerate()
        .map(|(i, r)| {
            r.map(|r| (r.cell_id, r.cluster))
                .map_err(|e| Error::parse(i + 1, e))
        })
        .collect()
}

/// KPI rows with their cluster appended as the last column.
pub fn write_cluster_table_csv<W: Write>(
    sink: W,
    kpis: &[KpiRecord],
    labels: &[usize],
) -> Result<()> {
    if kpis.len() != labels.len() {
        return Err(Error::input("label count differs from KPI row count"));
    }
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = crate::traffic::KPI_HEADER.to_vec();
    header.push("cluster");
    w.write_record(&header)?;
    for (k, l) in kpis.iter().zip(labels) {
        w.write_record([
            k.cell_id.clone(),
            k.tch_traffic_erl.to_string(),
            k.dl_edge_throughput_kbps.to_string(),
            k.pdch_congestion_pct.to_string(),
            k.preempt_pdch.to_string(),
            k.ts_count.to_string(),
            l.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
