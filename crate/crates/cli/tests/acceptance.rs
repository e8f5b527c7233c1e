//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every tolerance and budget is a named constant below.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trxsave::analytics::{
    kmeans, kmeanspp_seed, lloyd, nearest_centroid, pca_reduce, select_k, silhouette_score,
    standardize, FeatureMatrix, LloydOptions,
};
use trxsave::cell_model::{CellConfig, MappingStrategy, TrxIndex, SLOTS_PER_TRX};
use trxsave::evaluator::{
    compare, emit_report, evaluate_network, read_comparison_csv, simulate_network,
    ComparisonSummary, ReportFormat, RunMetadata, COMPARISON_FILE,
};
use trxsave::saving_engine::{run_cell, PowerSavingParams, RunOptions, ScanAction};
use trxsave::traffic::fleet::{materialize, synthetic_fleet, FleetCell, FleetSpec, TrafficClass};
use trxsave::traffic::{read_kpi_csv, write_kpi_csv, DemandModel, KpiSynthesis, TrafficTrace};
use trxsave::tuner::{
    profile_clusters, rank_and_assign, AssignmentRow, HysteresisAssignment, HysteresisPolicy,
    SeverityScore,
};
use trxsave::{cluster_kpis, ClusterOptions, NetworkScenario};

// 1: state-machine timing
const TIMING_BUDGET: Duration = Duration::from_secs(1);
const TIMING_SCANS: usize = 1_000;
// 2: counter algebra
const COUNTER_SEQUENCES: usize = 10_000;
const COUNTER_SEQUENCE_MAX_SCANS: usize = 400;
// 3: dominance
const DOMINANCE_SCENARIOS: usize = 60;
// 4 and 5: headline study
const FLEET_CELLS: usize = 100;
const FLEET_DAYS: u32 = 6;
const FLEET_SEED: u64 = 7;
const REDUCTION_BAND_PCT: (f64, f64) = (15.0, 30.0);
const STUDY_BUDGET: Duration = Duration::from_secs(60);
// 6: clustering oracles
const SILHOUETTE_SETS: usize = 60;
const SILHOUETTE_MAX_POINTS: usize = 200;
const LLOYD_SETS: usize = 200;
const EXHAUSTIVE_SETS: usize = 300;
const EXHAUSTIVE_MAX_POINTS: usize = 10;
const EXHAUSTIVE_MAX_K: usize = 3;
const EXHAUSTIVE_RESTARTS: usize = 20;
const EXHAUSTIVE_TOL: f64 = 1e-9;
// 7: PCA
const PCA_SETS: usize = 60;
const PCA_TOL: f64 = 1e-8;
// 8: model selection
const BLOB_TRIALS: u64 = 100;
const BLOB_MIN_HITS: usize = 95;
// 9: determinism
const CLI_CELLS: &str = "12";
const CLI_DAYS: &str = "1";
const CLI_SEED: &str = "42";

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timing() -> Outcome {
    let start = Instant::now();
    let cell = CellConfig::new("Cell_1", 3, 3).map_err(|e| e.to_string())?;
    let idle =
        TrafficTrace::new("Cell_1", 10.0, vec![0.0; TIMING_SCANS]).map_err(|e| e.to_string())?;
    let run = |h: u32| {
        run_cell(
            &cell,
            &PowerSavingParams::default().with_hysteresis(h),
            &idle,
            RunOptions::default(),
        )
        .map_err(|e| e.to_string())
    };
    let h3 = run(3)?;
    let actions: Vec<(usize, ScanAction)> = h3
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.action != ScanAction::None)
        .map(|(i, r)| (i + 1, r.action))
        .collect();
    let expected = vec![
        (50, ScanAction::DisableTrx(TrxIndex(3))),
        (130, ScanAction::DisableTrx(TrxIndex(2))),
    ];
    check(actions == expected, || format!("h=3 actions {actions:?}"))?;
    let steady3 = h3.records.last().unwrap().active_trx;
    check(steady3 == 1, || format!("h=3 steady state {steady3} TRX"))?;

    let h5 = run(5)?;
    let steady5 = h5.records.last().unwrap().active_trx;
    check(steady5 == 2, || format!("h=5 steady state {steady5} TRX"))?;
    check(h5.records[130..].iter().all(|r| r.active_trx == 2), || {
        "h=5 left 2 TRX after settling".into()
    })?;

    let elapsed = start.elapsed();
    check(elapsed < TIMING_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "TRX3 off at scan 50, TRX2 at 130, h=3 -> 1 TRX, h=5 -> 2 TRX, {elapsed:.0?}"
    ))
}

fn counter_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut violations = 0usize;
    let mut scans = 0usize;
    for _ in 0..COUNTER_SEQUENCES {
        let num_trx = rng.random_range(1..=6);
        let cell = CellConfig::new("c", num_trx, rng.random_range(1..=3)).unwrap();
        let p = PowerSavingParams {
            trx_off_target: rng.random_range(20..=100),
            trx_on_target: rng.random_range(20..=100),
            trx_off_delay: rng.random_range(6..=90),
            hysteresis: rng.random_range(1..=30),
            on_offset: rng.random_range(0..=9),
            ..PowerSavingParams::default()
        };
        let len = rng.random_range(1..=COUNTER_SEQUENCE_MAX_SCANS);
        let mut samples = Vec::with_capacity(len);
        while samples.len() < len {
            let level = rng.random_range(0.0..(cell.total_tch() as f64 * 1.3));
            let run = rng.random_range(1..120);
            samples.extend(std::iter::repeat_n(level, run));
        }
        samples.truncate(len);
        let opts = RunOptions {
            strategy: if rng.random_bool(0.5) {
                MappingStrategy::Packed
            } else {
                MappingStrategy::Scattered { seed: rng.random() }
            },
            demand: if rng.random_bool(0.5) {
                DemandModel::Rounded
            } else {
                DemandModel::Poisson { seed: rng.random() }
            },
            ps_enabled: true,
        };
        let trace = TrafficTrace::new("c", 10.0, samples).unwrap();
        let run = run_cell(&cell, &p, &trace, opts).unwrap();
        let (mut off, mut on, mut delay) = (0u32, 0u32, 0u32);
        for r in &run.records {
            scans += 1;
            let step_ok = |prev: u32, next: u32| {
                next == prev + 1 || next == prev.saturating_sub(3) || next == 0
            };
            let bad = !step_ok(off, r.off_counter)
                || !step_ok(on, r.on_counter)
                || (delay > 0 && matches!(r.action, ScanAction::DisableTrx(_)))
                || r.action == ScanAction::DisableTrx(TrxIndex::BCCH)
                || r.active_trx < 1;
            violations += bad as usize;
            (off, on, delay) = (r.off_counter, r.on_counter, r.delay_remaining);
        }
    }
    check(violations == 0, || format!("{violations} violations"))?;
    Ok(format!(
        "{COUNTER_SEQUENCES} sequences, {scans} scans, 0 violations"
    ))
}

fn dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0);
    let mut scans = 0usize;
    let mut violations = 0usize;
    for s in 0..DOMINANCE_SCENARIOS {
        let n = rng.random_range(1..=6);
        let mut cells = Vec::new();
        let mut traces = Vec::new();
        let mut rows = Vec::new();
        for c in 0..n {
            let id = format!("S{s}C{c}");
            let cfg = CellConfig::new(id.clone(), rng.random_range(1..=5), rng.random_range(1..=3))
                .unwrap();
            let len = rng.random_range(50..1500);
            let mut level: f64 = rng.random_range(0.0..cfg.total_tch() as f64);
            let samples = (0..len)
                .map(|_| {
                    level = (level + rng.random_range(-0.6..0.6)).max(0.0);
                    level
                })
                .collect();
            traces.push(TrafficTrace::new(id.clone(), 10.0, samples).unwrap());
            rows.push(AssignmentRow {
                cell_id: id,
                cluster: 0,
                hysteresis: rng.random_range(1..=15),
            });
            cells.push(cfg);
        }
        let mut scenario = NetworkScenario::new(cells, traces, HysteresisAssignment { rows });
        scenario.demand = DemandModel::Poisson { seed: rng.random() };
        let with = simulate_network(&scenario, true).map_err(|e| e.to_string())?;
        let without = simulate_network(&scenario, false).map_err(|e| e.to_string())?;
        for (a, b) in with.iter().zip(&without) {
            for (x, y) in a.records.iter().zip(&b.records) {
                scans += 1;
                violations += (x.active_ts > y.active_ts) as usize;
            }
        }
    }
    check(violations == 0, || {
        format!("{violations} scans with more slots powered")
    })?;
    Ok(format!(
        "{DOMINANCE_SCENARIOS} scenarios, {scans} cell-scans, 0 violations"
    ))
}

struct Study {
    fleet: Vec<FleetCell>,
    traces: Vec<TrafficTrace>,
    k: usize,
    summary: ComparisonSummary,
    comparison_csv: Vec<(String, u32, u32)>,
    elapsed: Duration,
}

fn run_study() -> Result<Study, String> {
    let start = Instant::now();
    let fleet = synthetic_fleet(&FleetSpec::new(FLEET_CELLS, FLEET_DAYS, FLEET_SEED))
        .map_err(|e| e.to_string())?;
    let (traces, kpis) =
        materialize(&fleet, &KpiSynthesis::default()).map_err(|e| e.to_string())?;
    let report = cluster_kpis(
        &kpis,
        &ClusterOptions {
            seed: FLEET_SEED,
            ..ClusterOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let labels = &report.result.labels;
    let ids: Vec<String> = kpis.iter().map(|k| k.cell_id.clone()).collect();
    let profiles = profile_clusters(labels, &kpis).map_err(|e| e.to_string())?;
    let assignment = rank_and_assign(
        &profiles,
        &HysteresisPolicy::default(),
        SeverityScore::Traffic,
        &ids,
        labels,
    )
    .map_err(|e| e.to_string())?;
    let scenario = NetworkScenario::new(
        fleet.iter().map(|c| c.config.clone()).collect(),
        traces.clone(),
        assignment,
    );
    let on = evaluate_network(&scenario, true, |_| Ok(())).map_err(|e| e.to_string())?;
    let off = evaluate_network(&scenario, false, |_| Ok(())).map_err(|e| e.to_string())?;
    let summary = compare(&on, &off).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    emit_report(
        &summary,
        &RunMetadata::for_scenario(&scenario, FLEET_SEED),
        dir.path(),
        &[ReportFormat::Csv],
    )
    .map_err(|e| e.to_string())?;
    let file = std::fs::File::open(dir.path().join(COMPARISON_FILE)).map_err(|e| e.to_string())?;
    let comparison_csv = read_comparison_csv(file).map_err(|e| e.to_string())?;
    Ok(Study {
        fleet,
        traces,
        k: report.k,
        summary,
        comparison_csv,
        elapsed,
    })
}

fn headline(study: &Result<Study, String>) -> Outcome {
    let s = study.as_ref().map_err(Clone::clone)?;
    let pct = s.summary.reduction_pct;
    check(s.k == 3, || format!("silhouette selected k = {}", s.k))?;
    check(
        pct >= REDUCTION_BAND_PCT.0 && pct <= REDUCTION_BAND_PCT.1,
        || format!("reduction {pct:.1}% outside {REDUCTION_BAND_PCT:?}"),
    )?;
    check(s.elapsed < STUDY_BUDGET, || {
        format!("study took {:?}", s.elapsed)
    })?;
    Ok(format!(
        "k = 3, TRX-scans {} -> {} = {:.1}% (max-based {:.1}%), {:.1?} for {FLEET_CELLS} cells x {FLEET_DAYS} days",
        s.summary.trx_scans_without, s.summary.trx_scans_with, pct, s.summary.max_reduction_pct, s.elapsed
    ))
}

fn before_after_shape(study: &Result<Study, String>) -> Outcome {
    let s = study.as_ref().map_err(Clone::clone)?;
    let rows: BTreeMap<&str, (u32, u32)> = s
        .comparison_csv
        .iter()
        .map(|(id, before, after)| (id.as_str(), (*before, *after)))
        .collect();
    check(rows.len() == s.fleet.len(), || {
        "comparison CSV row count".into()
    })?;
    let mut reduced = 0;
    let mut saturated = 0;
    for (cell, trace) in s.fleet.iter().zip(&s.traces) {
        let (before, after) = rows[cell.config.cell_id.as_str()];
        let cap = cell.config.total_tch() as f64;
        let always_full = trace.samples.iter().all(|&e| e.round() >= cap);
        match cell.class {
            TrafficClass::Low | TrafficClass::Medium => {
                check(after < before, || {
                    format!("{}: {before} -> {after}", cell.config.cell_id)
                })?;
                reduced += 1;
            }
            _ if always_full => {
                check(after == before, || {
                    format!("saturated {}: {before} -> {after}", cell.config.cell_id)
                })?;
                saturated += 1;
            }
            _ => {}
        }
        check(before == cell.config.num_trx * SLOTS_PER_TRX, || {
            format!("{} ts_before {before}", cell.config.cell_id)
        })?;
    }
    check(saturated > 0, || {
        "no cell with demand above capacity throughout".into()
    })?;
    Ok(format!(
        "{reduced} low/medium cells reduced, {saturated} saturated cells unchanged"
    ))
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn brute_silhouette(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = points.len();
    let k = labels.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        if labels.iter().filter(|&&l| l == own).count() == 1 {
            continue;
        }
        let mean_to = |c: usize| {
            let (mut s, mut m) = (0.0, 0usize);
            for j in (0..n).filter(|&j| j != i && labels[j] == c) {
                s += euclid(&points[i], &points[j]);
                m += 1;
            }
            s / m as f64
        };
        let a = mean_to(own);
        let b = (0..k)
            .filter(|&c| c != own)
            .map(mean_to)
            .fold(f64::INFINITY, f64::min);
        if a.max(b) > 0.0 {
            total += (b - a) / a.max(b);
        }
    }
    total / n as f64
}

fn exhaustive_sse(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        if counts.iter().all(|&c| c > 0) {
            let sse: f64 = points
                .iter()
                .zip(&labels)
                .map(|(p, &l)| {
                    p.iter()
                        .zip(&sums[l])
                        .map(|(x, s)| (x - s / counts[l] as f64).powi(2))
                        .sum::<f64>()
                })
                .sum();
            best = best.min(sse);
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, spread: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-spread..spread)).collect())
        .collect()
}

fn clustering_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..SILHOUETTE_SETS {
        let k = rng.random_range(2..=5);
        let n = rng.random_range(k.max(4)..=SILHOUETTE_MAX_POINTS);
        let d = rng.random_range(1..=4);
        let pts = random_points(&mut rng, n, d, 50.0);
        let mut labels: Vec<usize> = (0..n)
            .map(|i| if i < k { i } else { rng.random_range(0..k) })
            .collect();
        labels.rotate_left(rng.random_range(0..n));
        let m = FeatureMatrix::from_points(pts.clone()).unwrap();
        let ours = silhouette_score(&m, &labels).unwrap();
        let brute = brute_silhouette(&pts, &labels);
        check(ours == brute, || {
            format!("silhouette {ours} vs brute force {brute}")
        })?;
    }
    for _ in 0..LLOYD_SETS {
        let n = rng.random_range(6..120);
        let m = FeatureMatrix::from_points(random_points(&mut rng, n, 2, 10.0)).unwrap();
        let k = rng.random_range(1..=6);
        let fit = lloyd(
            &m,
            kmeanspp_seed(&m, k, rng.random()).unwrap(),
            LloydOptions::default(),
        )
        .unwrap();
        check(fit.sse_history.windows(2).all(|w| w[1] <= w[0]), || {
            format!("SSE rose: {:?}", fit.sse_history)
        })?;
        let stable = m
            .rows()
            .enumerate()
            .all(|(i, r)| nearest_centroid(r, &fit.centroids).0 == fit.labels[i]);
        check(stable, || "Lloyd output changes on reassignment".into())?;
    }
    let mut worst: f64 = 0.0;
    for case in 0..EXHAUSTIVE_SETS {
        let n = rng.random_range(3..=EXHAUSTIVE_MAX_POINTS);
        let d = rng.random_range(1..=3);
        let pts = random_points(&mut rng, n, d, 5.0);
        let m = FeatureMatrix::from_points(pts.clone()).unwrap();
        for k in 1..=EXHAUSTIVE_MAX_K.min(n) {
            let gap = (kmeans(&m, k, EXHAUSTIVE_RESTARTS, case as u64).unwrap().sse
                - exhaustive_sse(&pts, k))
            .abs();
            worst = worst.max(gap);
            check(gap <= EXHAUSTIVE_TOL, || {
                format!("case {case}, k={k}: SSE off optimum by {gap}")
            })?;
        }
    }
    Ok(format!(
        "silhouette exact on {SILHOUETTE_SETS} sets, {LLOYD_SETS} Lloyd fixed points, exhaustive gap {worst:.1e} over {EXHAUSTIVE_SETS} sets"
    ))
}

fn pca_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut orth, mut var, mut vec_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..PCA_SETS {
        let n = rng.random_range(5..80);
        let d = rng.random_range(2..=6);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let z: f64 = rng.random_range(-3.0..3.0);
                (0..d)
                    .map(|j| z * (j as f64 + 1.0) + rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let (s, _) = standardize(&FeatureMatrix::from_points(rows).unwrap()).unwrap();
        let (_, model) = pca_reduce(&s, d).unwrap();
        let c = DMatrix::from_fn(d, d, |i, j| model.components[i][j]);
        orth = orth.max((c.transpose() * &c - DMatrix::identity(d, d)).abs().max());

        let x = DMatrix::from_fn(n, d, |i, j| s.get(i, j));
        let means: Vec<f64> = (0..d).map(|j| x.column(j).mean()).collect();
        let xc = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - means[j]);
        let cov = xc.transpose() * &xc / (n as f64 - 1.0);
        var = var.max((model.explained_variance.iter().sum::<f64>() - cov.trace()).abs());

        let oracle = cov.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| oracle.eigenvalues[b].total_cmp(&oracle.eigenvalues[a]));
        for (col, &o) in order.iter().enumerate() {
            vec_err = vec_err.max((model.eigenvalues[col] - oracle.eigenvalues[o]).abs());
            let separated = order
                .iter()
                .filter(|&&x| x != o)
                .all(|&x| (oracle.eigenvalues[x] - oracle.eigenvalues[o]).abs() > 1e-6);
            if separated {
                let dot: f64 = (0..d)
                    .map(|r| c[(r, col)] * oracle.eigenvectors[(r, o)])
                    .sum();
                vec_err = vec_err.max((dot.abs() - 1.0).abs());
            }
        }
    }
    check(orth < PCA_TOL, || format!("|C^T C - I|_inf = {orth:e}"))?;
    check(var < PCA_TOL, || format!("variance gap {var:e}"))?;
    check(vec_err < PCA_TOL, || {
        format!("oracle disagreement {vec_err:e}")
    })?;
    Ok(format!("orthonormality {orth:.1e}, variance gap {var:.1e}, oracle gap {vec_err:.1e} over {PCA_SETS} sets"))
}

fn blobs(seed: u64) -> FeatureMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [0.0, 10.0, 0.0]];
    let rows = centers
        .iter()
        .flat_map(|c| {
            (0..20)
                .map(|_| c.iter().map(|x| x + rng.random_range(-1.0..1.0)).collect())
                .collect::<Vec<_>>()
        })
        .collect();
    FeatureMatrix::from_points(rows).unwrap()
}

fn model_selection() -> Outcome {
    let hits = (0..BLOB_TRIALS)
        .filter(|&t| {
            select_k(&blobs(t), 2..=9, 5, t)
                .map(|s| s.best_k == 3)
                .unwrap_or(false)
        })
        .count();
    check(hits >= BLOB_MIN_HITS, || {
        format!("k = 3 in {hits}/{BLOB_TRIALS}")
    })?;
    Ok(format!("k = 3 in {hits}/{BLOB_TRIALS} seeded trials"))
}

fn run_cli(out: &Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_trxsave");
    let out_s = out.to_str().unwrap();
    let steps: [&[&str]; 5] = [
        &["generate", "--cells", CLI_CELLS, "--days", CLI_DAYS],
        &["cluster", "--k", "3"],
        &["assign", "--policy", "4,6,12"],
        &["simulate", "--timelines"],
        &["report", "--summary", &format!("{out_s}/summary.json")],
    ];
    for args in steps {
        let status = Command::new(bin)
            .args(["--seed", CLI_SEED, "--out", out_s])
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!(
                "{args:?} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            ));
        }
    }
    Ok(())
}

fn files_under(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_cli(a.path())?;
    run_cli(b.path())?;
    let files = files_under(a.path());
    check(files == files_under(b.path()), || {
        "different file sets".into()
    })?;
    for f in &files {
        let same =
            std::fs::read(a.path().join(f)).unwrap() == std::fs::read(b.path().join(f)).unwrap();
        check(same, || format!("{} differs", f.display()))?;
    }
    Ok(format!(
        "{} CSV/JSON artifacts byte-identical across two runs",
        files.len()
    ))
}

const SAMPLE_KPIS: &str = "\
cell_id,tch_traffic_erl,dl_edge_throughput_kbps,pdch_congestion_pct,preempt_pdch,ts_count
Cell_1,2.69845,130.523,0.00579,5.08791,24
Cell_2,1.62493,136.034,0.00596,3.12088,24
Cell_3,7.31606,124.882,0.11292,41.95604,32
Cell_4,5.25773,123.006,0.01373,16,32
Cell_5,4.42022,132.727,0.00066,2.04396,24
";

fn format_fidelity() -> Outcome {
    let rows = read_kpi_csv(SAMPLE_KPIS.as_bytes()).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    write_kpi_csv(&mut out, &rows).map_err(|e| e.to_string())?;
    let text = String::from_utf8(out).unwrap();
    check(text == SAMPLE_KPIS, || format!("emitted:\n{text}"))?;
    check(
        rows[3].preempt_pdch == 16.0 && rows[2].preempt_pdch == 41.95604,
        || "values changed".into(),
    )?;
    Ok(format!(
        "{} sample rows re-emitted digit for digit",
        rows.len()
    ))
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default())
    });
    match outcome {
        Ok(detail) => {
            println!("PASS  {label}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL  {label}: {why}");
            false
        }
    }
}

fn main() {
    let study = run_study();
    let results = [
        run("1 state-machine timing", timing),
        run("2 counter algebra", counter_algebra),
        run("3 dominance", dominance),
        run("4 headline reduction", || headline(&study)),
        run("5 before/after table shape", || before_after_shape(&study)),
        run("6 clustering oracles", clustering_oracles),
        run("7 PCA checks", pca_checks),
        run("8 model selection", model_selection),
        run("9 determinism", determinism),
        run("10 format fidelity", format_fidelity),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
