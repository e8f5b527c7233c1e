//! Simulator of the cyclic BTS power-saving TRX on/off algorithm together
//! with a KPI clustering pipeline that picks a per-cell hysteresis
//! (BTSPSHYST) and an evaluator that measures the resulting TRX reduction.
//!
//! ```
//! use trxsave::{run_cell, CellConfig, PowerSavingParams, RunOptions, TrafficTrace};
//!
//! let cell = CellConfig::new("Cell_1", 3, 3).unwrap();
//! let trace = TrafficTrace::new("Cell_1", 10.0, vec![0.0; 200]).unwrap();
//! let params = PowerSavingParams::default().with_hysteresis(3);
//! let run = run_cell(&cell, &params, &trace, RunOptions::default()).unwrap();
//! assert_eq!(run.records[0].active_trx, 3);
//! assert_eq!(run.records[199].active_trx, 1);
//! ```

pub mod analytics;
pub mod cell_model;
pub mod error;
pub mod evaluator;
pub mod saving_engine;
pub mod scalar;
pub mod seed;
pub mod traffic;
pub mod tuner;

pub use analytics::{
    cluster_kpis, elbow_curve, kmeans, pca_reduce, select_k, silhouette_score, standardize,
    ClusterOptions, ClusterReport, ClusteringResult, ElbowCurve, FeatureMatrix, KSelection,
    PcaModel, Stage,
};
pub use cell_model::{CellConfig, CellState, MappingStrategy, TrxIndex};
pub use error::{Error, Result};
pub use evaluator::{
    compare, emit_report, evaluate_network, simulate_network, ComparisonSummary, NetworkReport,
    NetworkScenario, ReportFormat, RunMetadata,
};
pub use saving_engine::{
    run_cell, scan_step, CellTimeline, PowerSavingParams, RunOptions, SavingState, ScanAction,
};
pub use scalar::Scalar;
pub use traffic::{DemandModel, KpiRecord, TrafficTrace};
pub use tuner::{
    profile_clusters, rank_and_assign, HysteresisAssignment, HysteresisPolicy, SeverityScore,
};

pub type FeatureMatrixF64 = FeatureMatrix<f64>;
pub type FeatureMatrixF32 = FeatureMatrix<f32>;
pub type ClusteringResultF64 = ClusteringResult<f64>;
pub type PcaModelF64 = PcaModel<f64>;
pub type ElbowCurveF64 = ElbowCurve<f64>;
pub type KSelectionF64 = KSelection<f64>;
