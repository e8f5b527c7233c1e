use super::FeatureMatrix;
use crate::error::{Error, Result};
use crate::scalar::{dist, Scalar};

/// Mean silhouette over all points.
///
/// For point `i` with mean distance `a` to the other members of its cluster
/// and smallest mean distance `b` to any other cluster,
/// `s(i) = (b - a) / max(a, b)`. Points alone in their cluster, and points
/// with `a = b = 0`, score 0.
pub fn silhouette_score<T: Scalar>(points: &FeatureMatrix<T>, labels: &[usize]) -> Result<T> {
    let n = points.n_rows();
    if labels.len() != n {
        return Err(Error::input(format!(
            "{} labels for {n} points",
            labels.len()
        )));
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    if k < 2 {
        return Err(Error::input("silhouette needs at least 2 clusters"));
    }
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    if let Some(j) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::input(format!("cluster {j} is empty")));
    }

    let mut total = T::zero();
    let mut sums = vec![T::zero(); k];
    for i in 0..n {
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = T::zero());
        let pi = points.row(i);
        for j in 0..n {
            if j != i {
                sums[labels[j]] = sums[labels[j]] + dist(pi, points.row(j));
            }
        }
        let a = sums[own] / T::of_usize(sizes[own] - 1);
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / T::of_usize(sizes[c]))
            .fold(T::infinity(), T::min);
        let denom = a.max(b);
        if denom > T::zero() {
            total = total + (b - a) / denom;
        }
    }
    Ok(total / T::of_usize(n))
}
