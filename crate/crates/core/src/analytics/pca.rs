use super::{FeatureMatrix, Stage};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column `j` of this row-major `n x n` matrix is the eigenvector of
    /// `values[j]`.
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Cyclic Jacobi eigensolver for a small symmetric matrix.
///
/// Sweeps rotate every off-diagonal pair `(p, q)` to zero in row order until
/// the off-diagonal Frobenius norm drops below `1e-12` (or a few ulps of the
/// matrix norm in single precision). Eigenvectors are sign-normalized so the
/// largest-magnitude entry of each is positive.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen<T: Scalar>(matrix: &[Vec<T>]) -> Result<SymmetricEigen<T>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::input("eigen-decomposition needs a square matrix"));
    }
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();

    let frobenius = a.iter().flatten().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::of(OFF_DIAGONAL_TOL).max(T::epsilon() * T::of(4.0) * frobenius);
    let two = T::of(2.0);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off < tol {
            break;
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // A <- A J
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                // A <- J^T A
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = T::zero();
                a[q][p] = T::zero();
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if off_diagonal_norm(&a) >= tol {
        return Err(Error::invariant(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j][j]
            .partial_cmp(&a[i][i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Vec<T> = order.iter().map(|&i| a[i][i]).collect();
    let mut vectors = vec![vec![T::zero(); n]; n];
    for (dst, &src) in order.iter().enumerate() {
        let col: Vec<T> = (0..n).map(|k| v[k][src]).collect();
        let sign = sign_of_dominant(&col);
        for k in 0..n {
            vectors[k][dst] = col[k] * sign;
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm<T: Scalar>(a: &[Vec<T>]) -> T {
    let mut sum = T::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if i != j {
                sum = sum + x * x;
            }
        }
    }
    sum.sqrt()
}

/// +1 if the largest-magnitude entry (first one on ties) is non-negative.
fn sign_of_dominant<T: Scalar>(col: &[T]) -> T {
    let mut best = T::zero();
    let mut sign = T::one();
    for &x in col {
        if x.abs() > best {
            best = x.abs();
            sign = if x < T::zero() { -T::one() } else { T::one() };
        }
    }
    sign
}

/// Fitted principal-component projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    pub means: Vec<T>,
    /// `n_features x n_components`, orthonormal columns.
    pub components: Vec<Vec<T>>,
    /// Variance along each kept component, descending.
    pub explained_variance: Vec<T>,
    /// All covariance eigenvalues, descending.
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> PcaModel<T> {
    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn total_variance(&self) -> T {
        self.eigenvalues.iter().copied().sum()
    }

    pub fn project_row(&self, row: &[T]) -> Vec<T> {
        (0..self.n_components())
            .map(|c| {
                row.iter()
                    .zip(&self.means)
                    .zip(&self.components)
                    .map(|((&x, &m), comp)| (x - m) * comp[c])
                    .sum()
            })
            .collect()
    }

    pub fn reconstruct_row(&self, projected: &[T]) -> Vec<T> {
        self.components
            .iter()
            .zip(&self.means)
            .map(|(comp, &m)| m + comp.iter().zip(projected).map(|(&c, &p)| c * p).sum::<T>())
            .collect()
    }
}

/// Sample covariance (divisor `n - 1`) of the columns.
#[allow(clippy::needless_range_loop)]
pub(crate) fn covariance<T: Scalar>(m: &FeatureMatrix<T>, means: &[T]) -> Vec<Vec<T>> {
    let d = m.n_cols();
    let denom = T::of_usize(m.n_rows().saturating_sub(1).max(1));
    let mut cov = vec![vec![T::zero(); d]; d];
    for row in m.rows() {
        for i in 0..d {
            let di = row[i] - means[i];
            for j in i..d {
                cov[i][j] = cov[i][j] + di * (row[j] - means[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] = cov[i][j] / denom;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// Projects standardized features onto the top `n_components` eigenvectors
/// of their sample covariance.
pub fn pca_reduce<T: Scalar>(
    m: &FeatureMatrix<T>,
    n_components: usize,
) -> Result<(FeatureMatrix<T>, PcaModel<T>)> {
    if m.stage() != Stage::Standardized {
        return Err(Error::input("PCA expects standardized features"));
    }
    if n_components == 0 || n_components > m.n_cols() {
        return Err(Error::input(format!(
            "cannot keep {n_components} components of {} features",
            m.n_cols()
        )));
    }
    if m.n_rows() < 2 {
        return Err(Error::input("PCA needs at least 2 rows"));
    }
    let nf = T::of_usize(m.n_rows());
    let means: Vec<T> = (0..m.n_cols())
        .map(|j| m.column(j).into_iter().sum::<T>() / nf)
        .collect();
    let eig = jacobi_eigen(&covariance(m, &means))?;
    let components: Vec<Vec<T>> = eig
        .vectors
        .iter()
        .map(|row| row[..n_components].to_vec())
        .collect();
    let model = PcaModel {
        means,
        components,
        explained_variance: eig.values[..n_components]
            .iter()
            .map(|&v| v.max(T::zero()))
            .collect(),
        eigenvalues: eig.values,
    };
    let values: Vec<T> = m.rows().flat_map(|r| model.project_row(r)).collect();
    let reduced =
        FeatureMatrix::from_parts(m.row_ids().to_vec(), values, n_components, Stage::Reduced);
    Ok((reduced, model))
}
