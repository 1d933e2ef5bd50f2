//! Benchmark clustering methods: exhaustive search and geographic k-means.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::network::Point;
use crate::partitions::{enumerate_partitions, CoalitionStructure};
use crate::rate_model::RateContext;
use crate::{Error, Result};

/// Clustering methods compared by the harness, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MethodId {
    /// Coalition formation from the grand coalition.
    Formation,
    /// Exhaustive search over all partitions.
    Exhaustive,
    /// Everyone in one coalition.
    Grand,
    /// No cooperation.
    Singletons,
    /// A uniformly random partition.
    Random,
    /// Geographic k-means with the best cluster count.
    Kmeans,
}

impl MethodId {
    /// Every method.
    pub const ALL: [MethodId; 6] = [
        MethodId::Formation,
        MethodId::Exhaustive,
        MethodId::Grand,
        MethodId::Singletons,
        MethodId::Random,
        MethodId::Kmeans,
    ];

    /// Name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            MethodId::Formation => "formation",
            MethodId::Exhaustive => "exhaustive",
            MethodId::Grand => "grand",
            MethodId::Singletons => "singletons",
            MethodId::Random => "random",
            MethodId::Kmeans => "kmeans",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// The partition with the largest sum throughput, first in enumeration
/// order among ties.
pub fn exhaustive_best(ctx: &RateContext) -> Result<(CoalitionStructure, f64)> {
    let mut best: Option<(CoalitionStructure, f64)> = None;
    for s in enumerate_partitions(ctx.num_users())? {
        let sum = ctx.sum_throughput(&s)?;
        if best.as_ref().is_none_or(|(_, b)| sum > *b) {
            best = Some((s, sum));
        }
    }
    Ok(best.expect("at least one partition"))
}

/// Lloyd restarts per call; the first uses farthest-point seeding, the rest k-means++.
pub const KMEANS_RESTARTS: usize = 8;
const KMEANS_MAX_ITERS: usize = 100;

fn dist2(a: Point, b: Point) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

fn nearest(p: Point, centers: &[Point]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &c) in centers.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn farthest_point_seeds<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Vec<Point> {
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    while centers.len() < k {
        let (idx, _) = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, nearest(p, &centers).1))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        centers.push(points[idx]);
    }
    centers
}

fn plus_plus_seeds<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Vec<Point> {
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    while centers.len() < k {
        let weights: Vec<f64> = points.iter().map(|&p| nearest(p, &centers).1).collect();
        let total: f64 = weights.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 && u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[idx]);
    }
    centers
}

/// Lloyd iterations from `centers`; returns labels and inertia.
fn lloyd(points: &[Point], mut centers: Vec<Point>) -> (Vec<usize>, f64) {
    let k = centers.len();
    let mut labels: Vec<usize> = points.iter().map(|&p| nearest(p, &centers).0).collect();
    for _ in 0..KMEANS_MAX_ITERS {
        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (&p, &l) in points.iter().zip(&labels) {
            sums[l][0] += p[0];
            sums[l][1] += p[1];
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64];
            } else {
                // Reseed an empty cluster at the point worst served by its center,
                // taken from a cluster that can spare it.
                let worst = points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| counts[labels[*i]] > 1)
                    .map(|(i, &p)| (i, dist2(p, centers[labels[i]])))
                    .fold(None, |acc: Option<(usize, f64)>, x| match acc {
                        Some(a) if a.1 >= x.1 => Some(a),
                        _ => Some(x),
                    });
                if let Some((i, d)) = worst {
                    if d > 0.0 {
                        counts[labels[i]] -= 1;
                        counts[c] = 1;
                        labels[i] = c;
                        centers[c] = points[i];
                    }
                }
            }
        }
        let next: Vec<usize> = points.iter().map(|&p| nearest(p, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(&p, &l)| dist2(p, centers[l]))
        .sum();
    (labels, inertia)
}

/// Cluster BS positions into at most `num_clusters` groups with k-means.
///
/// Runs [`KMEANS_RESTARTS`] seeded Lloyd restarts and keeps the lowest
/// inertia (earliest restart on ties). Deterministic given the RNG state.
pub fn kmeans_clusters<R: Rng + ?Sized>(
    positions: &[Point],
    num_clusters: usize,
    rng: &mut R,
) -> Result<CoalitionStructure> {
    let n = positions.len();
    if num_clusters == 0 || num_clusters > n {
        return Err(Error::Config(format!(
            "num_clusters must be in 1..={n}, got {num_clusters}"
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let seeds = if restart == 0 {
            farthest_point_seeds(positions, num_clusters, rng)
        } else {
            plus_plus_seeds(positions, num_clusters, rng)
        };
        let (labels, inertia) = lloyd(positions, seeds);
        if best.as_ref().is_none_or(|(_, b)| inertia < *b) {
            best = Some((labels, inertia));
        }
    }
    let (labels, _) = best.expect("at least one restart");
    CoalitionStructure::from_labels(&labels)
}

/// k-means clustering for every cluster count `1..=K`, keeping the one with
/// the largest model sum throughput (smallest count on ties).
pub fn kmeans_best<R: Rng + ?Sized>(
    ctx: &RateContext,
    positions: &[Point],
    rng: &mut R,
) -> Result<CoalitionStructure> {
    if positions.len() != ctx.num_users() {
        return Err(Error::Config(format!(
            "{} positions for {} users",
            positions.len(),
            ctx.num_users()
        )));
    }
    let mut best: Option<(CoalitionStructure, f64)> = None;
    for count in 1..=positions.len() {
        let s = kmeans_clusters(positions, count, rng)?;
        let sum = ctx.sum_throughput(&s)?;
        if best.as_ref().is_none_or(|(_, b)| sum > *b) {
            best = Some((s, sum));
        }
    }
    Ok(best.expect("at least one cluster count").0)
}
