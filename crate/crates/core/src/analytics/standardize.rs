use super::{FeatureMatrix, Stage};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-column moments used by [`standardize`].
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats<T> {
    pub means: Vec<T>,
    /// Population standard deviations.
    pub stds: Vec<T>,
    /// Columns with zero spread, mapped to all zeros.
    pub constant: Vec<bool>,
}

impl<T: Scalar> ColumnStats<T> {
    /// Applies the stored transform to one raw row.
    pub fn transform_row(&self, row: &[T]) -> Vec<T> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.constant[j] {
                    T::zero()
                } else {
                    (v - self.means[j]) / self.stds[j]
                }
            })
            .collect()
    }
}

/// Z-scores every column: `(x - mean) / std` with the population std.
pub fn standardize<T: Scalar>(m: &FeatureMatrix<T>) -> Result<(FeatureMatrix<T>, ColumnStats<T>)> {
    if m.stage() != Stage::Raw {
        return Err(Error::input("standardize expects a raw feature matrix"));
    }
    let n = m.n_rows();
    if n < 2 {
        return Err(Error::input(format!(
            "standardize needs at least 2 rows, got {n}"
        )));
    }
    let nf = T::of_usize(n);
    let cols = m.n_cols();
    let mut means = vec![T::zero(); cols];
    let mut stds = vec![T::zero(); cols];
    let mut constant = vec![false; cols];
    for j in 0..cols {
        let col = m.column(j);
        let mean = col.iter().copied().sum::<T>() / nf;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / nf;
        let std = var.sqrt();
        // spread below rounding noise of the column's magnitude counts as constant
        let scale = col.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
        constant[j] = std <= scale * T::epsilon() * T::of(4.0) || std == T::zero();
        means[j] = mean;
        stds[j] = std;
    }
    let stats = ColumnStats {
        means,
        stds,
        constant,
    };
    let values: Vec<T> = m.rows().flat_map(|r| stats.transform_row(r)).collect();
    let out = FeatureMatrix::from_parts(m.row_ids().to_vec(), values, cols, Stage::Standardized);
    Ok((out, stats))
}
