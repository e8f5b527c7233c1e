use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use trxsave::analytics::{write_elbow_csv, write_silhouette_csv};
use trxsave::cell_model::{CellConfig, MappingStrategy, DEFAULT_CCH_SLOTS};
use trxsave::evaluator::{self, write_timeline_csv, ReportFormat, RunMetadata, SCHEMA_VERSION};
use trxsave::traffic::fleet::{materialize, synthetic_fleet, FleetSpec, TrafficClass};
use trxsave::traffic::{
    read_kpi_csv, read_traffic_csv, write_kpi_csv, write_traffic_csv, KpiSynthesis,
};
use trxsave::tuner::{
    read_assignment_csv, read_cluster_labels, write_assignment_csv, write_cluster_table_csv,
    write_parameter_push_csv,
};
use trxsave::{
    cluster_kpis, compare, emit_report, evaluate_network, profile_clusters, rank_and_assign, seed,
    ClusterOptions, DemandModel, Error, HysteresisAssignment, HysteresisPolicy, NetworkReport,
    NetworkScenario, PowerSavingParams, Result, SeverityScore,
};

use crate::config::{pick, RunConfig};
use crate::{
    AssignArgs, ClusterArgs, Demand, GenerateArgs, PsMode, ReportArgs, Score, SimulateArgs,
    Strategy,
};

pub const TRAFFIC_FILE: &str = "traffic.csv";
pub const KPI_FILE: &str = "kpis.csv";
pub const CLUSTER_FILE: &str = "clusters.csv";
pub const ASSIGNMENT_FILE: &str = "assignment.csv";

pub struct Context {
    pub seed: u64,
    pub out: PathBuf,
    pub cfg: RunConfig,
}

impl Context {
    fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Flag, then config, then `<out>/<name>`.
    fn input(&self, flag: &Option<PathBuf>, config: &Option<PathBuf>, name: &str) -> PathBuf {
        flag.clone()
            .or_else(|| config.clone())
            .unwrap_or_else(|| self.out_file(name))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Parses an enum value that came from the config file.
fn config_enum<E: ValueEnum>(value: &Option<String>, key: &str) -> Result<Option<E>> {
    value
        .as_deref()
        .map(|v| {
            E::from_str(v, true)
                .map_err(|_| Error::Config(format!("config key {key}: unknown value {v:?}")))
        })
        .transpose()
}

#[derive(Serialize)]
struct GenerateMeta {
    schema_version: u32,
    synthetic: bool,
    seed: u64,
    cells: usize,
    days: u32,
    scan_period_s: u32,
    fleet: Vec<FleetEntry>,
}

#[derive(Serialize)]
struct FleetEntry {
    cell_id: String,
    class: TrafficClass,
    num_trx: u32,
    peak_hour: u32,
}

pub fn generate(ctx: &Context, a: &GenerateArgs) -> Result<()> {
    let spec = FleetSpec::new(
        pick(a.cells, ctx.cfg.cells, 100),
        pick(a.days, ctx.cfg.days, 6),
        ctx.seed,
    );
    let fleet = synthetic_fleet(&spec)?;
    let (traces, kpis) = materialize(&fleet, &KpiSynthesis::default())?;
    write_traffic_csv(create(&ctx.out_file(TRAFFIC_FILE))?, &traces)?;
    write_kpi_csv(create(&ctx.out_file(KPI_FILE))?, &kpis)?;
    write_json(
        &ctx.out_file("generate_meta.json"),
        &GenerateMeta {
            schema_version: SCHEMA_VERSION,
            synthetic: true,
            seed: spec.seed,
            cells: spec.cells,
            days: spec.days,
            scan_period_s: spec.scan_period_s,
            fleet: fleet
                .iter()
                .map(|c| FleetEntry {
                    cell_id: c.config.cell_id.clone(),
                    class: c.class,
                    num_trx: c.config.num_trx,
                    peak_hour: c.profile.peak_hour,
                })
                .collect(),
        },
    )?;
    println!(
        "generated {} cells x {} days into {}",
        spec.cells,
        spec.days,
        ctx.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ClusterMeta {
    schema_version: u32,
    seed: u64,
    k: usize,
    k_fixed: bool,
    restarts: usize,
    components: usize,
    explained_variance: Vec<f64>,
    total_variance: f64,
    sse: f64,
    elbow_knee: Option<usize>,
}

pub fn cluster(ctx: &Context, a: &ClusterArgs) -> Result<()> {
    let kpis = read_kpi_csv(open(&ctx.input(&a.kpis, &ctx.cfg.kpis, KPI_FILE))?)?;
    let opts = ClusterOptions {
        k: a.k.or(ctx.cfg.k),
        restarts: pick(a.restarts, ctx.cfg.restarts, 10),
        n_components: pick(a.components, ctx.cfg.components, 3),
        seed: ctx.seed,
        ..ClusterOptions::default()
    };
    if opts.restarts == 0 {
        return Err(Error::Config("--restarts must be at least 1".into()));
    }
    let report = cluster_kpis(&kpis, &opts)?;
    write_cluster_table_csv(
        create(&ctx.out_file(CLUSTER_FILE))?,
        &kpis,
        &report.result.labels,
    )?;
    write_elbow_csv(create(&ctx.out_file("elbow.csv"))?, &report.elbow.points)?;
    if !report.silhouettes.is_empty() {
        write_silhouette_csv(
            create(&ctx.out_file("silhouette.csv"))?,
            &report.silhouettes,
        )?;
    }
    write_json(
        &ctx.out_file("cluster_meta.json"),
        &ClusterMeta {
            schema_version: SCHEMA_VERSION,
            seed: ctx.seed,
            k: report.k,
            k_fixed: opts.k.is_some(),
            restarts: opts.restarts,
            components: report.pca.n_components(),
            explained_variance: report.pca.explained_variance.clone(),
            total_variance: report.pca.total_variance(),
            sse: report.result.sse,
            elbow_knee: report.elbow.knee,
        },
    )?;
    println!("k = {}", report.k);
    for (k, s) in &report.silhouettes {
        println!("  silhouette k={k}: {s:.4}");
    }
    Ok(())
}

pub fn assign(ctx: &Context, a: &AssignArgs) -> Result<()> {
    let path = ctx.input(&a.clusters, &ctx.cfg.clusters, CLUSTER_FILE);
    let kpis = read_kpi_csv(open(&path)?)?;
    let labelled = read_cluster_labels(open(&path)?)?;
    let labels: Vec<usize> = labelled.iter().map(|(_, l)| *l).collect();
    let ids: Vec<String> = labelled.into_iter().map(|(id, _)| id).collect();

    let policy = match (&a.policy, &ctx.cfg.policy) {
        (Some(text), _) => HysteresisPolicy::parse(text)?,
        (None, Some(values)) => HysteresisPolicy::new(values.clone())?,
        (None, None) => HysteresisPolicy::default(),
    };
    let score = match a.score.or(config_enum(&ctx.cfg.score, "score")?) {
        None | Some(Score::Traffic) => SeverityScore::Traffic,
        Some(Score::Composite) => SeverityScore::composite(),
    };
    let profiles = profile_clusters(&labels, &kpis)?;
    let assignment = rank_and_assign(&profiles, &policy, score, &ids, &labels)?;
    write_assignment_csv(create(&ctx.out_file(ASSIGNMENT_FILE))?, &assignment)?;
    write_parameter_push_csv(create(&ctx.out_file("btspshyst_push.csv"))?, &assignment)?;

    let mut w = csv_profile_writer(&ctx.out_file("cluster_profiles.csv"))?;
    println!(
        "cluster  cells  traffic_erl  throughput_kbps  congestion_pct  preempt_pdch  BTSPSHYST"
    );
    for p in &profiles {
        let h = assignment
            .rows
            .iter()
            .find(|r| r.cluster == p.cluster_id)
            .map(|r| r.hysteresis)
            .unwrap_or_default();
        println!(
            "{:>7}  {:>5}  {:>11.3}  {:>15.3}  {:>14.5}  {:>12.3}  {:>9}",
            p.cluster_id,
            p.member_count,
            p.tch_traffic_erl,
            p.dl_edge_throughput_kbps,
            p.pdch_congestion_pct,
            p.preempt_pdch,
            h
        );
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.cluster_id,
            p.member_count,
            p.tch_traffic_erl,
            p.dl_edge_throughput_kbps,
            p.pdch_congestion_pct,
            p.preempt_pdch,
            h
        )?;
    }
    w.flush()?;
    Ok(())
}

fn csv_profile_writer(path: &Path) -> Result<BufWriter<File>> {
    let mut w = create(path)?;
    writeln!(
        w,
        "cluster,cells,tch_traffic_erl,dl_edge_throughput_kbps,pdch_congestion_pct,preempt_pdch,hysteresis"
    )?;
    Ok(w)
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<()> {
    let cfg = &ctx.cfg;
    let defaults = PowerSavingParams::default();
    let params = PowerSavingParams {
        trx_off_target: pick(a.off_target, cfg.off_target, defaults.trx_off_target),
        trx_on_target: pick(a.on_target, cfg.on_target, defaults.trx_on_target),
        trx_off_delay: pick(a.off_delay, cfg.off_delay, defaults.trx_off_delay),
        on_offset: pick(a.on_offset, cfg.on_offset, defaults.on_offset),
        hysteresis: pick(a.hysteresis, cfg.hysteresis, defaults.hysteresis),
        ..defaults
    }
    .validate()?;
    let ps = pick(a.ps, config_enum(&cfg.ps, "ps")?, PsMode::Both);
    let cch = pick(a.cch, cfg.cch, DEFAULT_CCH_SLOTS);

    let kpis = read_kpi_csv(open(&ctx.input(&a.kpis, &cfg.kpis, KPI_FILE))?)?;
    let cells = kpis
        .iter()
        .map(|k| CellConfig::from_ts_count(k.cell_id.clone(), k.ts_count, cch))
        .collect::<Result<Vec<_>>>()?;
    let traces = read_traffic_csv(
        open(&ctx.input(&a.traffic, &cfg.traffic, TRAFFIC_FILE))?,
        params.scan_period_s,
    )?;

    let explicit_assignment = a.assignment.clone().or_else(|| cfg.assignment.clone());
    let default_hysteresis = a.hysteresis.or(cfg.hysteresis);
    let assignment = match explicit_assignment {
        Some(p) => read_assignment_csv(open(&p)?)?,
        None if ps == PsMode::Off || default_hysteresis.is_some() => {
            HysteresisAssignment::default()
        }
        None => read_assignment_csv(open(&ctx.out_file(ASSIGNMENT_FILE))?)?,
    };

    let mut scenario = NetworkScenario::new(cells, traces, assignment);
    scenario.base_params = params;
    scenario.default_hysteresis = default_hysteresis;
    scenario.settle_scans = pick(
        a.settle_scans,
        cfg.settle_scans,
        evaluator::DEFAULT_SETTLE_SCANS,
    );
    scenario.demand = match pick(
        a.demand,
        config_enum(&cfg.demand, "demand")?,
        Demand::Rounded,
    ) {
        Demand::Rounded => DemandModel::Rounded,
        Demand::Poisson => DemandModel::Poisson {
            seed: seed::derive(ctx.seed, &[seed::tag::POISSON]),
        },
    };
    scenario.strategy = match pick(
        a.strategy,
        config_enum(&cfg.strategy, "strategy")?,
        Strategy::Packed,
    ) {
        Strategy::Packed => MappingStrategy::Packed,
        Strategy::Scattered => MappingStrategy::Scattered {
            seed: seed::derive(ctx.seed, &[seed::tag::SCATTER]),
        },
    };
    let metadata = RunMetadata::for_scenario(&scenario, ctx.seed);

    let timeline_dir = ctx.out_file("timelines");
    let run = |enabled: bool, keep_timelines: bool| -> Result<NetworkReport> {
        let suffix = if enabled { "on" } else { "off" };
        evaluate_network(&scenario, enabled, |t| {
            if keep_timelines {
                let path = timeline_dir.join(format!("{}_{suffix}.csv", t.cell_id));
                write_timeline_csv(create(&path)?, t)?;
            }
            Ok(())
        })
    };

    match ps {
        PsMode::Both => {
            let off = run(false, a.timelines)?;
            let on = run(true, a.timelines)?;
            let summary = compare(&on, &off)?;
            emit_report(
                &summary,
                &metadata,
                &ctx.out,
                &[ReportFormat::Csv, ReportFormat::Json],
            )?;
            print_summary(&summary);
        }
        PsMode::On | PsMode::Off => {
            let enabled = ps == PsMode::On;
            let report = run(enabled, true)?;
            let name = if enabled {
                "network_on.json"
            } else {
                "network_off.json"
            };
            write_json(&ctx.out_file(name), &report)?;
            write_json(&ctx.out_file(evaluator::METADATA_FILE), &metadata)?;
            println!(
                "{} cells, {} TRX-scans, {} blocked calls (power saving {})",
                report.cells.len(),
                report.total_trx_scans,
                report.total_blocked_calls,
                if enabled { "on" } else { "off" }
            );
        }
    }
    Ok(())
}

fn print_summary(s: &evaluator::ComparisonSummary) {
    println!("cell_id     ts_before  max_ts_after");
    for r in &s.rows {
        println!(
            "{:<10}  {:>9}  {:>12}",
            r.cell_id, r.ts_before, r.max_ts_after
        );
    }
    println!(
        "active TRX-scans: {} -> {}",
        s.trx_scans_without, s.trx_scans_with
    );
    println!(
        "settled max TRX: {} -> {} ({:.1}%)",
        s.max_trx_without, s.max_trx_with, s.max_reduction_pct
    );
    println!(
        "blocked calls: {} -> {} (delta {})",
        s.blocked_without, s.blocked_with, s.blocking_delta
    );
    println!("reduction_pct: {}", s.reduction_pct_1dp());
}

pub fn report(ctx: &Context, a: &ReportArgs) -> Result<()> {
    let doc = evaluator::read_summary_json(open(&ctx.input(
        &a.summary,
        &None,
        evaluator::SUMMARY_FILE,
    ))?)?;
    println!(
        "seed {}  TRXOFFTARGET {}  TRXONTARGET {}  TRXOFFDELAY {}",
        doc.metadata.seed,
        doc.metadata.params.trx_off_target,
        doc.metadata.params.trx_on_target,
        doc.metadata.params.trx_off_delay
    );
    print_summary(&doc.summary);
    Ok(())
}
