use rand::Rng;
use rayon::prelude::*;

use super::FeatureMatrix;
use crate::error::{Error, Result};
use crate::scalar::{sq_dist, Scalar};
use crate::seed;

/// Outcome of a Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult<T> {
    pub k: usize,
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    /// Sum of squared distances from each point to its centroid.
    pub sse: T,
    pub iterations: usize,
    pub seed: u64,
    /// SSE after each assignment step, last entry equals `sse`.
    pub sse_history: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl Default for LloydOptions {
    fn default() -> Self {
        LloydOptions {
            max_iter: 300,
            tol: 1e-9,
        }
    }
}

/// Index and squared distance of the closest centroid; ties go to the lower
/// index.
pub fn nearest_centroid<T: Scalar>(point: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Labels every point with its nearest centroid and returns the SSE.
pub fn assign_nearest<T: Scalar>(
    points: &FeatureMatrix<T>,
    centroids: &[Vec<T>],
    labels: &mut Vec<usize>,
) -> T {
    labels.clear();
    let mut sse = T::zero();
    for row in points.rows() {
        let (j, d) = nearest_centroid(row, centroids);
        labels.push(j);
        sse = sse + d;
    }
    sse
}

/// Squared distance from each point to the closest of `centroids`: the
/// k-means++ sampling weights before normalization.
pub fn seeding_weights<T: Scalar>(points: &FeatureMatrix<T>, centroids: &[Vec<T>]) -> Vec<T> {
    points
        .rows()
        .map(|r| nearest_centroid(r, centroids).1)
        .collect()
}

/// k-means++ seeding: the first centroid is a uniformly drawn point, each
/// next one a point drawn with probability `D(x)^2 / sum D(x)^2`, where
/// `D(x)` is the distance to the nearest centroid chosen so far. If every
/// remaining weight is zero the draw is uniform over unchosen points.
pub fn kmeanspp_seed<T: Scalar>(
    points: &FeatureMatrix<T>,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>> {
    let n = points.n_rows();
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if k > n {
        return Err(Error::input(format!(
            "k = {k} exceeds the {n} available points"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points.row(first).to_vec()];
    let mut weights: Vec<T> = points.rows().map(|r| sq_dist(r, &centroids[0])).collect();

    while centroids.len() < k {
        let total: T = weights.iter().copied().sum();
        let pick = if total > T::zero() {
            let target = T::of(rng.random::<f64>()) * total;
            let mut acc = T::zero();
            let mut pick = None;
            for (i, &w) in weights.iter().enumerate() {
                if w <= T::zero() {
                    continue;
                }
                acc = acc + w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = points.row(pick).to_vec();
        for (w, row) in weights.iter_mut().zip(points.rows()) {
            let d = sq_dist(row, &c);
            if d < *w {
                *w = d;
            }
        }
        centroids.push(c);
    }
    Ok(centroids)
}

/// Lloyd iterations from the given centroids.
///
/// A cluster that loses all its points is moved onto the point lying
/// farthest from its own centroid. On return every label is the nearest
/// centroid of its point.
pub fn lloyd<T: Scalar>(
    points: &FeatureMatrix<T>,
    init: Vec<Vec<T>>,
    opts: LloydOptions,
) -> Result<ClusteringResult<T>> {
    if init.is_empty() {
        return Err(Error::input("Lloyd needs at least one initial centroid"));
    }
    if let Some(c) = init.iter().find(|c| c.len() != points.n_cols()) {
        return Err(Error::input(format!(
            "centroid of dimension {} for {}-dimensional points",
            c.len(),
            points.n_cols()
        )));
    }
    let k = init.len();
    let dim = points.n_cols();
    let tol = T::of(opts.tol);
    let mut centroids = init;
    let mut labels = Vec::with_capacity(points.n_rows());
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < opts.max_iter {
        history.push(assign_nearest(points, &centroids, &mut labels));
        iterations += 1;

        let mut sums = vec![vec![T::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (row, &l) in points.rows().zip(&labels) {
            counts[l] += 1;
            for (s, &x) in sums[l].iter_mut().zip(row) {
                *s = *s + x;
            }
        }
        let mut next: Vec<Vec<T>> = sums
            .into_iter()
            .zip(&counts)
            .zip(&centroids)
            .map(|((s, &c), old)| {
                if c == 0 {
                    old.clone()
                } else {
                    let cf = T::of_usize(c);
                    s.into_iter().map(|v| v / cf).collect()
                }
            })
            .collect();

        let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
        if !empty.is_empty() {
            let mut spread: Vec<(T, usize)> = points
                .rows()
                .zip(&labels)
                .enumerate()
                .map(|(i, (row, &l))| (sq_dist(row, &centroids[l]), i))
                .collect();
            // farthest first, lower index on ties
            spread.sort_by(|a, b| {
                b.0.partial_cmp(&a.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
            for (&j, &(_, i)) in empty.iter().zip(&spread) {
                next[j] = points.row(i).to_vec();
            }
        }

        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(T::zero(), T::max);
        centroids = next;
        if shift < tol {
            break;
        }
    }

    let sse = assign_nearest(points, &centroids, &mut labels);
    history.push(sse);
    Ok(ClusteringResult {
        k,
        labels,
        centroids,
        sse,
        iterations,
        seed: 0,
        sse_history: history,
    })
}

/// Hartigan single-point moves on top of a Lloyd solution.
///
/// Moving `x` from cluster `a` to `b` changes the SSE by
/// `n_b/(n_b+1) |x-c_b|^2 - n_a/(n_a-1) |x-c_a|^2`; every strictly improving
/// move is taken with exact centroid updates. Lloyd is rerun after each pass
/// that moved something, so the result is still a Lloyd fixed point.
pub fn hartigan_refine<T: Scalar>(
    points: &FeatureMatrix<T>,
    mut fit: ClusteringResult<T>,
    opts: LloydOptions,
) -> Result<ClusteringResult<T>> {
    let k = fit.k;
    let dim = points.n_cols();
    let slack = T::epsilon() * T::of(64.0);
    for _ in 0..opts.max_iter {
        let mut labels = fit.labels.clone();
        let mut counts = vec![0usize; k];
        let mut centroids = vec![vec![T::zero(); dim]; k];
        for (row, &l) in points.rows().zip(&labels) {
            counts[l] += 1;
            for (c, &x) in centroids[l].iter_mut().zip(row) {
                *c = *c + x;
            }
        }
        for (c, &n) in centroids.iter_mut().zip(&counts) {
            if n > 0 {
                c.iter_mut().for_each(|v| *v = *v / T::of_usize(n));
            }
        }

        let mut moved = false;
        for (i, row) in points.rows().enumerate() {
            let a = labels[i];
            let na = counts[a];
            if na <= 1 {
                continue;
            }
            let remove_gain = T::of_usize(na) / T::of_usize(na - 1) * sq_dist(row, &centroids[a]);
            let mut best: Option<(usize, T)> = None;
            for b in (0..k).filter(|&b| b != a) {
                let nb = counts[b];
                let add_cost = T::of_usize(nb) / T::of_usize(nb + 1) * sq_dist(row, &centroids[b]);
                if best.is_none_or(|(_, c)| add_cost < c) {
                    best = Some((b, add_cost));
                }
            }
            let Some((b, add_cost)) = best else { continue };
            if add_cost < remove_gain - slack * remove_gain.max(T::one()) {
                let nb = counts[b];
                for (d, &x) in row.iter().enumerate() {
                    centroids[a][d] = (centroids[a][d] * T::of_usize(na) - x) / T::of_usize(na - 1);
                    centroids[b][d] = (centroids[b][d] * T::of_usize(nb) + x) / T::of_usize(nb + 1);
                }
                counts[a] -= 1;
                counts[b] += 1;
                labels[i] = b;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        let mut next = lloyd(points, centroids, opts)?;
        if next.sse >= fit.sse {
            break;
        }
        let mut history = std::mem::take(&mut fit.sse_history);
        history.append(&mut next.sse_history);
        next.sse_history = history;
        next.iterations += fit.iterations;
        next.seed = fit.seed;
        fit = next;
    }
    Ok(fit)
}

/// Best (lowest SSE) of `restarts` k-means++ initialized Lloyd runs, each
/// polished by [`hartigan_refine`]. Ties keep the earlier restart, so
/// parallel execution never changes the answer.
pub fn kmeans<T: Scalar>(
    points: &FeatureMatrix<T>,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusteringResult<T>> {
    let runs: Vec<Result<ClusteringResult<T>>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let run_seed = seed::derive(seed, &[seed::tag::KMEANS_RESTART, k as u64, r as u64]);
            let init = kmeanspp_seed(points, k, run_seed)?;
            let mut res = lloyd(points, init, LloydOptions::default())?;
            res.seed = run_seed;
            hartigan_refine(points, res, LloydOptions::default())
        })
        .collect();
    best_of(runs)
}

pub(crate) fn best_of<T: Scalar>(
    runs: Vec<Result<ClusteringResult<T>>>,
) -> Result<ClusteringResult<T>> {
    let mut best: Option<ClusteringResult<T>> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::input("no k-means runs"))
}
