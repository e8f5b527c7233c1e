use rayon::prelude::*;
use std::ops::RangeInclusive;

use super::kmeans::{
    best_of, hartigan_refine, kmeans, lloyd, nearest_centroid, ClusteringResult, LloydOptions,
};
use super::{silhouette_score, FeatureMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

/// Best SSE per k and the suggested bend.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve<T> {
    pub points: Vec<(usize, T)>,
    /// k farthest from the chord joining the curve's end points, with both
    /// axes scaled to [0, 1]. Advisory only.
    pub knee: Option<usize>,
}

fn check_range(range: &RangeInclusive<usize>, n: usize, min_k: usize) -> Result<()> {
    if range.is_empty() || *range.start() < min_k {
        return Err(Error::input(format!("invalid k range {range:?}")));
    }
    if *range.end() > n {
        return Err(Error::input(format!(
            "k up to {} requested for {n} points",
            range.end()
        )));
    }
    Ok(())
}

/// SSE for each k in `k_range`, best over `restarts` k-means++ runs.
///
/// For every k after the first, one extra candidate starts from the
/// previous k's best centroids plus the point farthest from them, so the
/// curve never rises with k.
pub fn elbow_curve<T: Scalar>(
    points: &FeatureMatrix<T>,
    k_range: RangeInclusive<usize>,
    restarts: usize,
    seed: u64,
) -> Result<ElbowCurve<T>> {
    check_range(&k_range, points.n_rows(), 1)?;
    let mut curve = Vec::new();
    let mut previous: Option<ClusteringResult<T>> = None;
    for k in k_range {
        let k_seed = seed::derive(seed, &[seed::tag::ELBOW, k as u64]);
        let mut candidates = vec![kmeans(points, k, restarts, k_seed)];
        if let Some(prev) = previous.as_ref().filter(|p| p.k + 1 == k) {
            let far = points
                .rows()
                .enumerate()
                .map(|(i, r)| (nearest_centroid(r, &prev.centroids).1, i))
                .fold((T::neg_infinity(), 0), |best, cur| {
                    if cur.0 > best.0 {
                        cur
                    } else {
                        best
                    }
                });
            let mut init = prev.centroids.clone();
            init.push(points.row(far.1).to_vec());
            candidates.push(
                lloyd(points, init, LloydOptions::default())
                    .and_then(|f| hartigan_refine(points, f, LloydOptions::default())),
            );
        }
        let best = best_of(candidates)?;
        curve.push((k, best.sse));
        previous = Some(best);
    }
    let knee = knee_of(&curve);
    Ok(ElbowCurve {
        points: curve,
        knee,
    })
}

fn knee_of<T: Scalar>(curve: &[(usize, T)]) -> Option<usize> {
    if curve.len() < 3 {
        return None;
    }
    let (k0, s0) = (curve[0].0 as f64, curve[0].1.to_f64_lossy());
    let (k1, s1) = {
        let last = curve[curve.len() - 1];
        (last.0 as f64, last.1.to_f64_lossy())
    };
    let span = s0 - s1;
    if span <= 0.0 || !span.is_finite() {
        return None;
    }
    // normalized coordinates: x in [0,1] left to right, y in [0,1] top to bottom
    // chord runs from (0,1) to (1,0); distance is proportional to x + y - 1
    let mut best: Option<(f64, usize)> = None;
    for &(k, sse) in &curve[1..curve.len() - 1] {
        let x = (k as f64 - k0) / (k1 - k0);
        let y = (sse.to_f64_lossy() - s1) / span;
        let d = 1.0 - x - y;
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, k));
        }
    }
    best.filter(|(d, _)| *d > 0.0).map(|(_, k)| k)
}

/// Silhouette-based choice of k.
#[derive(Debug, Clone, PartialEq)]
pub struct KSelection<T> {
    pub best_k: usize,
    pub silhouettes: Vec<(usize, T)>,
    pub fits: Vec<ClusteringResult<T>>,
}

impl<T: Scalar> KSelection<T> {
    pub fn best_fit(&self) -> &ClusteringResult<T> {
        self.fits
            .iter()
            .find(|f| f.k == self.best_k)
            .expect("best k is one of the fitted k")
    }
}

/// Runs best-of-restarts k-means for every k in `k_range` and keeps the k
/// with the highest mean silhouette, the smaller k on ties. A fit that
/// leaves a cluster empty (possible only with repeated points) scores 0.
pub fn select_k<T: Scalar>(
    points: &FeatureMatrix<T>,
    k_range: RangeInclusive<usize>,
    restarts: usize,
    seed: u64,
) -> Result<KSelection<T>> {
    check_range(&k_range, points.n_rows(), 2)?;
    let fits: Vec<Result<(ClusteringResult<T>, T)>> = k_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let k_seed = seed::derive(seed, &[seed::tag::SELECT_K, k as u64]);
            let fit = kmeans(points, k, restarts, k_seed)?;
            let score = match silhouette_score(points, &fit.labels) {
                Ok(s) => s,
                Err(_) => T::zero(),
            };
            Ok((fit, score))
        })
        .collect();
    let mut silhouettes = Vec::new();
    let mut out = Vec::new();
    let mut best: Option<(usize, T)> = None;
    for f in fits {
        let (fit, score) = f?;
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((fit.k, score));
        }
        silhouettes.push((fit.k, score));
        out.push(fit);
    }
    let (best_k, _) = best.expect("non-empty range");
    Ok(KSelection {
        best_k,
        silhouettes,
        fits: out,
    })
}
