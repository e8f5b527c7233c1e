//! Clustering pipeline over per-cell KPI features: z-score standardization,
//! PCA, k-means++ seeded Lloyd iterations, elbow curve and silhouette-based
//! choice of k. Everything is generic over [`Scalar`].

mod export;
mod kmeans;
mod pca;
mod pipeline;
mod selection;
mod silhouette;
mod standardize;

pub use export::{write_elbow_csv, write_labels_csv, write_silhouette_csv};
pub use kmeans::{
    assign_nearest, hartigan_refine, kmeans, kmeanspp_seed, lloyd, nearest_centroid,
    seeding_weights, ClusteringResult, LloydOptions,
};
pub use pca::{jacobi_eigen, pca_reduce, PcaModel, SymmetricEigen};
pub use pipeline::{cluster_kpis, kpi_feature_matrix, ClusterOptions, ClusterReport, KPI_FEATURES};
pub use selection::{elbow_curve, select_k, ElbowCurve, KSelection};
pub use silhouette::silhouette_score;
pub use standardize::{standardize, ColumnStats};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Processing stage of a [`FeatureMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Raw,
    Standardized,
    Reduced,
}

/// Rectangular, finite, row-major feature table with one id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    row_ids: Vec<String>,
    values: Vec<T>,
    n_cols: usize,
    stage: Stage,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn from_rows(row_ids: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        if row_ids.len() != rows.len() {
            return Err(Error::input(format!(
                "{} row ids for {} rows",
                row_ids.len(),
                rows.len()
            )));
        }
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::input(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::input(format!("row {i} holds non-finite value {v}")));
            }
            values.extend(row);
        }
        Ok(FeatureMatrix {
            row_ids,
            values,
            n_cols,
            stage: Stage::Raw,
        })
    }

    /// Unnamed rows, ids `0..n`.
    pub fn from_points(rows: Vec<Vec<T>>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_rows(ids, rows)
    }

    pub(crate) fn from_parts(
        row_ids: Vec<String>,
        values: Vec<T>,
        n_cols: usize,
        stage: Stage,
    ) -> Self {
        debug_assert_eq!(values.len(), row_ids.len() * n_cols);
        FeatureMatrix {
            row_ids,
            values,
            n_cols,
            stage,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        // chunks_exact(0) panics, so zero-width matrices yield empty rows
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.n_cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        self.rows().map(|r| r[col]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }
}
