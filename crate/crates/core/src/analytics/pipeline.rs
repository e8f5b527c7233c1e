use std::ops::RangeInclusive;

use super::{
    elbow_curve, kmeans, pca_reduce, select_k, standardize, ClusteringResult, ColumnStats,
    ElbowCurve, FeatureMatrix, PcaModel,
};
use crate::error::{Error, Result};
use crate::seed;
use crate::traffic::KpiRecord;

/// Feature columns taken from each KPI row, in order.
pub const KPI_FEATURES: [&str; 5] = [
    "tch_traffic_erl",
    "dl_edge_throughput_kbps",
    "pdch_congestion_pct",
    "preempt_pdch",
    "ts_count",
];

pub fn kpi_feature_matrix(kpis: &[KpiRecord]) -> Result<FeatureMatrix<f64>> {
    FeatureMatrix::from_rows(
        kpis.iter().map(|k| k.cell_id.clone()).collect(),
        kpis.iter().map(|k| k.features().to_vec()).collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOptions {
    /// Fixed k; skips silhouette selection.
    pub k: Option<usize>,
    pub select_range: RangeInclusive<usize>,
    pub elbow_range: RangeInclusive<usize>,
    pub restarts: usize,
    pub n_components: usize,
    pub seed: u64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            k: None,
            select_range: 2..=9,
            elbow_range: 1..=10,
            restarts: 10,
            n_components: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub stats: ColumnStats<f64>,
    pub pca: PcaModel<f64>,
    pub reduced: FeatureMatrix<f64>,
    pub elbow: ElbowCurve<f64>,
    /// Empty when k was fixed.
    pub silhouettes: Vec<(usize, f64)>,
    pub k: usize,
    pub result: ClusteringResult<f64>,
}

fn clamp(range: &RangeInclusive<usize>, n: usize) -> RangeInclusive<usize> {
    *range.start()..=(*range.end()).min(n)
}

/// Standardize, reduce to `n_components`, pick k by silhouette (unless
/// fixed) and fit the final clustering. k ranges are capped at the number
/// of cells.
pub fn cluster_kpis(kpis: &[KpiRecord], opts: &ClusterOptions) -> Result<ClusterReport> {
    if kpis.len() < 2 {
        return Err(Error::input(format!(
            "clustering needs at least 2 cells, got {}",
            kpis.len()
        )));
    }
    let raw = kpi_feature_matrix(kpis)?;
    let (standardized, stats) = standardize(&raw)?;
    let n_components = opts.n_components.min(standardized.n_cols());
    let (reduced, pca) = pca_reduce(&standardized, n_components)?;
    let n = reduced.n_rows();

    let elbow = elbow_curve(
        &reduced,
        clamp(&opts.elbow_range, n),
        opts.restarts,
        seed::derive(opts.seed, &[seed::tag::ELBOW]),
    )?;
    let (k, silhouettes) = match opts.k {
        Some(k) => {
            if k == 0 || k > n {
                return Err(Error::input(format!("k = {k} is not in 1..={n}")));
            }
            (k, Vec::new())
        }
        None => {
            let sel = select_k(
                &reduced,
                clamp(&opts.select_range, n),
                opts.restarts,
                seed::derive(opts.seed, &[seed::tag::SELECT_K]),
            )?;
            (sel.best_k, sel.silhouettes)
        }
    };
    let result = kmeans(
        &reduced,
        k,
        opts.restarts,
        seed::derive(opts.seed, &[seed::tag::FINAL_FIT]),
    )?;
    Ok(ClusterReport {
        stats,
        pca,
        reduced,
        elbow,
        silhouettes,
        k,
        result,
    })
}
