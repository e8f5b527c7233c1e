use std::path::Path;

use trxsave::evaluator::{compare, emit_report, evaluate_network, ReportFormat, RunMetadata};
use trxsave::traffic::fleet::{materialize, synthetic_fleet, FleetSpec, TrafficClass};
use trxsave::traffic::{
    read_kpi_csv, read_traffic_csv, write_kpi_csv, write_traffic_csv, KpiSynthesis,
};
use trxsave::tuner::{profile_clusters, rank_and_assign, HysteresisPolicy, SeverityScore};
use trxsave::{cluster_kpis, ClusterOptions, NetworkScenario};

const SAMPLE_KPIS: &str = "\
cell_id,tch_traffic_erl,dl_edge_throughput_kbps,pdch_congestion_pct,preempt_pdch,ts_count
Cell_1,2.69845,130.523,0.00579,5.08791,24
Cell_2,1.62493,136.034,0.00596,3.12088,24
Cell_3,7.31606,124.882,0.11292,41.95604,32
Cell_4,5.25773,123.006,0.01373,16,32
Cell_5,4.42022,132.727,0.00066,2.04396,24
";

#[test]
fn sample_rows_survive_ingest_and_emit() {
    let rows = read_kpi_csv(SAMPLE_KPIS.as_bytes()).unwrap();
    assert_eq!(rows.len(), 5);
    let mut out = Vec::new();
    write_kpi_csv(&mut out, &rows).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), SAMPLE_KPIS);
}

#[test]
fn corrupt_kpi_row_reports_its_number() {
    let bad = SAMPLE_KPIS.replace("Cell_3,7.31606", "Cell_3,seven");
    match read_kpi_csv(bad.as_bytes()) {
        Err(trxsave::Error::Parse { row, .. }) => assert_eq!(row, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn traces_round_trip() {
    let fleet = synthetic_fleet(&FleetSpec::new(4, 1, 3)).unwrap();
    let (traces, _) = materialize(&fleet, &KpiSynthesis::default()).unwrap();
    let mut out = Vec::new();
    write_traffic_csv(&mut out, &traces).unwrap();
    assert_eq!(read_traffic_csv(out.as_slice(), 10.0).unwrap(), traces);
}

#[test]
fn sample_clusters_map_to_policy() {
    let mut kpis = read_kpi_csv(SAMPLE_KPIS.as_bytes()).unwrap();
    kpis.extend(read_kpi_csv("cell_id,tch_traffic_erl,dl_edge_throughput_kbps,pdch_congestion_pct,preempt_pdch,ts_count\nCell_6,4.86402,139.305,0.00065,3.91209,24\n".as_bytes()).unwrap());
    let labels = [1, 1, 2, 2, 0, 0];
    let ids: Vec<String> = kpis.iter().map(|k| k.cell_id.clone()).collect();
    let profiles = profile_clusters(&labels, &kpis).unwrap();
    let a = rank_and_assign(
        &profiles,
        &HysteresisPolicy::default(),
        SeverityScore::Traffic,
        &ids,
        &labels,
    )
    .unwrap();
    assert_eq!(a.get("Cell_3"), Some(12));
    assert_eq!(a.get("Cell_6"), Some(6));
    assert_eq!(a.get("Cell_2"), Some(4));
}

fn run_small_study(dir: &Path) {
    let fleet = synthetic_fleet(&FleetSpec::new(20, 1, 11)).unwrap();
    let (traces, kpis) = materialize(&fleet, &KpiSynthesis::default()).unwrap();
    let report = cluster_kpis(
        &kpis,
        &ClusterOptions {
            k: Some(3),
            seed: 11,
            ..ClusterOptions::default()
        },
    )
    .unwrap();
    let ids: Vec<String> = kpis.iter().map(|k| k.cell_id.clone()).collect();
    let profiles = profile_clusters(&report.result.labels, &kpis).unwrap();
    let assignment = rank_and_assign(
        &profiles,
        &HysteresisPolicy::default(),
        SeverityScore::Traffic,
        &ids,
        &report.result.labels,
    )
    .unwrap();
    let scenario = NetworkScenario::new(
        fleet.iter().map(|c| c.config.clone()).collect(),
        traces,
        assignment,
    );
    let on = evaluate_network(&scenario, true, |_| Ok(())).unwrap();
    let off = evaluate_network(&scenario, false, |_| Ok(())).unwrap();
    let summary = compare(&on, &off).unwrap();
    assert!(summary.trx_scans_with <= summary.trx_scans_without);
    assert!((0.0..=100.0).contains(&summary.reduction_pct));
    for (cell, row) in fleet.iter().zip(&summary.rows) {
        if cell.class == TrafficClass::Saturated {
            assert_eq!(row.ts_before, row.max_ts_after);
        }
    }
    emit_report(
        &summary,
        &RunMetadata::for_scenario(&scenario, 11),
        dir,
        &[ReportFormat::Csv, ReportFormat::Json],
    )
    .unwrap();
}

#[test]
fn study_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_small_study(a.path());
    run_small_study(b.path());
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        assert_eq!(
            std::fs::read(a.path().join(&name)).unwrap(),
            std::fs::read(b.path().join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}
