//! Clustering cost, summary statistics and the identities used as test oracles.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sq_dist, Dataset, RoundLimit, SeedingConfig};
use crate::seeding::rs_kmeanspp;
use crate::sqtree::SampleTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// `Δ(X, C) = Σ_x min_c ‖x − c‖²`.
    pub cost: f64,
    pub per_cluster_costs: Vec<f64>,
    /// Nearest center per point; ties go to the lowest center index.
    pub assignment: Vec<usize>,
}

/// Exact cost and assignment of row-major `points` against row-major `centers`.
pub fn clustering_cost(points: &[f64], centers: &[f64], d: usize) -> Result<CostReport> {
    if d == 0 || centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let k = centers.len() / d;
    let mut per_cluster_costs = vec![0.0; k];
    let mut assignment = Vec::with_capacity(points.len() / d);
    for x in points.chunks_exact(d) {
        let (best, dist) = nearest(x, centers.chunks_exact(d));
        per_cluster_costs[best] += dist;
        assignment.push(best);
    }
    Ok(CostReport {
        cost: per_cluster_costs.iter().sum(),
        per_cluster_costs,
        assignment,
    })
}

fn nearest<'a>(x: &[f64], centers: impl Iterator<Item = &'a [f64]>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.enumerate() {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Cost report for centers given as dataset indices.
pub fn index_cost_report(data: &Dataset, centers: &[usize]) -> Result<CostReport> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let mut flat = Vec::with_capacity(centers.len() * data.d());
    for &c in centers {
        flat.extend_from_slice(data.point(c));
    }
    clustering_cost(data.points(), &flat, data.d())
}

/// `Δ(X, S)` for centers given as dataset indices; infinite for an empty set.
pub fn index_cost(data: &Dataset, centers: &[usize]) -> f64 {
    (0..data.n()).map(|i| data.min_sq_dist(i, centers)).sum()
}

/// Both sides of `Δ(P, z) = Δ(P, µ(P)) + |P| ‖z − µ(P)‖²`.
pub fn bias_variance_check(points: &[f64], d: usize, z: &[f64]) -> Result<(f64, f64)> {
    if d == 0 || points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = points.len() / d;
    let mut mu = vec![0.0; d];
    for x in points.chunks_exact(d) {
        mu.iter_mut().zip(x).for_each(|(m, v)| *m += v);
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);
    let lhs = points.chunks_exact(d).map(|x| sq_dist(x, z)).sum();
    let spread: f64 = points.chunks_exact(d).map(|x| sq_dist(x, &mu)).sum();
    let rhs = spread + n as f64 * sq_dist(z, &mu);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Bessel-corrected sample standard deviation.
    pub std: f64,
    /// `1.96 · std / √count`.
    pub ci95: f64,
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    let std = libm::sqrt(ss / (count - 1.0));
    Ok(Summary {
        mean,
        std,
        ci95: 1.96 * std / libm::sqrt(count),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    /// `Δ₁(X)`, the 1-means cost.
    pub delta1: f64,
    pub mean_cost: f64,
    pub repeats: usize,
}

/// `β ≈ Δ₁(X) / mean Δ(X, S)` over `repeats` unbounded RS-k-means++ runs.
///
/// `data` must be centered so that `Δ₁(X) = ‖X‖²`.
pub fn estimate_beta<R: Rng + ?Sized>(
    data: &Dataset,
    tree: &SampleTree,
    k: usize,
    repeats: usize,
    safety_cap: u64,
    rng: &mut R,
) -> Result<BetaEstimate> {
    if repeats == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut cfg = SeedingConfig::new(k);
    cfg.m = RoundLimit::Unbounded;
    cfg.safety_cap = safety_cap;
    let mut total = 0.0;
    for _ in 0..repeats {
        let sel = rs_kmeanspp(data, tree, &cfg, rng)?;
        total += index_cost(data, &sel.centers);
    }
    let mean_cost = total / repeats as f64;
    if mean_cost.is_nan() || mean_cost <= 0.0 {
        return Err(Error::ZeroCost);
    }
    let delta1 = data.total_sq_norm();
    Ok(BetaEstimate {
        beta: delta1 / mean_cost,
        delta1,
        mean_cost,
        repeats,
    })
}

/// Conditional law of a mixture draw given that it lands in a subset, with
/// the two-sided bounds it is known to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalBounds {
    /// `P[draw = z | draw ∈ Q]` under `(1 − δ) D² + δ U`.
    pub exact: f64,
    /// `Δ(z)/Δ(Q) − δ/(1−δ) · |Q|/|P| · Δ(z) Δ(P) / Δ(Q)²`.
    pub lower: f64,
    /// `Δ(z)/Δ(Q) + δ/(1−δ) · 1/|P| · Δ(P)/Δ(Q)`.
    pub upper: f64,
}

/// `dists[i] = Δ(x_i, S)` over the whole set `P`; `subset` indexes `Q ⊂ P`; `z ∈ Q`.
///
/// Requires `Δ(Q) > 0` and `δ ∈ [0, 1)`.
pub fn conditional_bounds(dists: &[f64], subset: &[usize], z: usize, delta: f64) -> Result<ConditionalBounds> {
    if subset.is_empty() {
        return Err(Error::EmptyCenters);
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::BadDelta(delta));
    }
    let n = dists.len() as f64;
    let q = subset.len() as f64;
    let total: f64 = dists.iter().sum();
    let in_q: f64 = subset.iter().map(|&i| dists[i]).sum();
    if in_q.is_nan() || in_q <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let dz = dists[z];
    let point = |d: f64| (1.0 - delta) * d / total + delta / n;
    let subset_mass = (1.0 - delta) * in_q / total + delta * q / n;
    let ratio = delta / (1.0 - delta);
    Ok(ConditionalBounds {
        exact: point(dz) / subset_mass,
        lower: dz / in_q - ratio * (q / n) * dz * total / (in_q * in_q),
        upper: dz / in_q + ratio / n * total / in_q,
    })
}
