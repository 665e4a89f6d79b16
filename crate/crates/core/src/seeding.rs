//! Seeding algorithms: the rejection-sampling fast path and its reference samplers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::model::{sq_dist, Dataset, DrawBudget, SeedingConfig, SeedingResult, SeedingTrace};
use crate::sampling::{d2_sample, ProposalSampler, RejectionOutcome};
use crate::sqtree::SampleTree;

/// A centered dataset together with the norm tree built over it.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub data: Dataset,
    pub tree: SampleTree,
}

/// Centers a row-major `n × d` buffer and builds the norm tree over it.
pub fn preprocess(points: Vec<f64>, d: usize) -> Result<Prepared> {
    prepare(Dataset::from_flat(points, d)?)
}

pub fn prepare(data: Dataset) -> Result<Prepared> {
    let data = data.centered();
    let tree = SampleTree::from_weights(data.sq_norms())?;
    Ok(Prepared { data, tree })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedingVariant {
    /// Rejection-sampling k-means++ with the config's round budget.
    Rs,
    /// Exact sampling from `(1 − δ) D² + δ U`.
    Delta,
    /// Textbook k-means++.
    Exact,
    /// `k` independent uniform picks.
    Uniform,
}

impl SeedingVariant {
    pub const ALL: [SeedingVariant; 4] = [Self::Rs, Self::Delta, Self::Exact, Self::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rs => "rs",
            Self::Delta => "delta",
            Self::Exact => "exact",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for SeedingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownVariant;

impl fmt::Display for UnknownVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of rs, delta, exact, uniform")
    }
}

impl FromStr for SeedingVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or(UnknownVariant)
    }
}

/// Chosen centers plus rejection-sampling counters, before the cost is evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    pub centers: Vec<usize>,
    pub fallback_count: u64,
    pub total_rejection_rounds: u64,
}

/// Evaluates `Δ(X, S)` for a selection. Timings are left at zero for the caller to fill.
pub fn finish(data: &Dataset, selection: Selection) -> SeedingResult {
    let cost = metrics::index_cost(data, &selection.centers);
    SeedingResult {
        centers: selection.centers,
        cost,
        preprocess_time_s: 0.0,
        seeding_time_s: 0.0,
        fallback_count: selection.fallback_count,
        total_rejection_rounds: selection.total_rejection_rounds,
    }
}

/// RS-k-means++: a uniform first center, then `k − 1` rejection-sampled D² draws.
///
/// The proposal stays bound to the first center for the whole run. `data`
/// should be centered (see [`prepare`]); the output law does not depend on it,
/// only the expected number of rounds does.
pub fn rs_kmeanspp<R: Rng + ?Sized>(
    data: &Dataset,
    tree: &SampleTree,
    cfg: &SeedingConfig,
    rng: &mut R,
) -> Result<Selection> {
    cfg.validate(data.n())?;
    if tree.len() != data.n() {
        return Err(Error::IndexOutOfRange {
            index: tree.len(),
            len: data.n(),
        });
    }
    let budget = cfg.draw_budget();
    let n = data.n();
    let c1 = rng.random_range(0..n);
    let mut selection = Selection {
        centers: Vec::with_capacity(cfg.k),
        ..Selection::default()
    };
    selection.centers.push(c1);

    // All points at the origin leaves D₂ without mass; every proposal would be
    // rejected anyway since Δ(X, S) = 0.
    let proposal = match ProposalSampler::for_center(tree, data, c1) {
        Ok(p) => Some(p),
        Err(Error::ZeroMass) => None,
        Err(e) => return Err(e),
    };

    for _ in 1..cfg.k {
        let outcome = match &proposal {
            Some(p) => d2_sample(data, &selection.centers, budget, p, rng)?,
            None => massless_draw(budget, n, rng)?,
        };
        selection.total_rejection_rounds += outcome.rounds_used;
        selection.fallback_count += u64::from(outcome.fell_back);
        selection.centers.push(outcome.index);
    }
    Ok(selection)
}

fn massless_draw<R: Rng + ?Sized>(budget: DrawBudget, n: usize, rng: &mut R) -> Result<RejectionOutcome> {
    match budget {
        DrawBudget::Rounds(m) => Ok(RejectionOutcome {
            index: rng.random_range(0..n),
            rounds_used: m,
            fell_back: true,
        }),
        DrawBudget::Unbounded { safety_cap } => Err(Error::SafetyCapExceeded(safety_cap)),
    }
}

/// Per-point probabilities `(1 − δ) Δ(x, S) / Δ(X, S) + δ / n`.
///
/// When `Δ(X, S) = 0` the D² term is dropped and the law is uniform.
pub fn mixture_probabilities(min_dists: &[f64], delta: f64) -> Vec<f64> {
    let n = min_dists.len() as f64;
    let total: f64 = min_dists.iter().sum();
    if total > 0.0 {
        min_dists
            .iter()
            .map(|d| (1.0 - delta) * d / total + delta / n)
            .collect()
    } else {
        vec![1.0 / n; min_dists.len()]
    }
}

/// Inverse-CDF draw proportional to `weights`; zero weights are never returned.
fn sample_proportional<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}

fn refresh_min_dists(data: &Dataset, center: usize, min_dists: &mut [f64]) {
    let c = data.point(center);
    for (md, x) in min_dists.iter_mut().zip(data.rows()) {
        let d = sq_dist(x, c);
        if d < *md {
            *md = d;
        }
    }
}

/// δ-k-means++: every step samples exactly from `(1 − δ) D² + δ U` by
/// materializing all `n` probabilities. `O(nkd)`; a reference sampler.
pub fn delta_kmeanspp<R: Rng + ?Sized>(
    data: &Dataset,
    cfg: &SeedingConfig,
    rng: &mut R,
) -> Result<Selection> {
    cfg.validate(data.n())?;
    let n = data.n();
    let first = rng.random_range(0..n);
    let mut centers = Vec::with_capacity(cfg.k);
    centers.push(first);
    let mut min_dists = vec![f64::INFINITY; n];
    refresh_min_dists(data, first, &mut min_dists);
    for _ in 1..cfg.k {
        let probs = mixture_probabilities(&min_dists, cfg.delta);
        let next = sample_proportional(&probs, rng)?;
        refresh_min_dists(data, next, &mut min_dists);
        centers.push(next);
    }
    Ok(Selection {
        centers,
        ..Selection::default()
    })
}

/// Textbook k-means++ with maintained nearest-center distances, `O(nkd)`.
///
/// If every remaining point already coincides with a center, the rest are
/// drawn uniformly.
pub fn exact_kmeanspp<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Result<Selection> {
    SeedingConfig::new(k).validate(data.n())?;
    let n = data.n();
    let first = rng.random_range(0..n);
    let mut centers = Vec::with_capacity(k);
    centers.push(first);
    let mut min_dists = vec![f64::INFINITY; n];
    refresh_min_dists(data, first, &mut min_dists);
    for _ in 1..k {
        let next = match sample_proportional(&min_dists, rng) {
            Ok(i) => i,
            Err(Error::ZeroMass) => rng.random_range(0..n),
            Err(e) => return Err(e),
        };
        refresh_min_dists(data, next, &mut min_dists);
        centers.push(next);
    }
    Ok(Selection {
        centers,
        ..Selection::default()
    })
}

/// `k` i.i.d. uniform indices (with replacement).
pub fn uniform_seeding<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Result<Selection> {
    SeedingConfig::new(k).validate(data.n())?;
    Ok(Selection {
        centers: (0..k).map(|_| rng.random_range(0..data.n())).collect(),
        ..Selection::default()
    })
}

pub fn run_variant<R: Rng + ?Sized>(
    variant: SeedingVariant,
    prepared: &Prepared,
    cfg: &SeedingConfig,
    rng: &mut R,
) -> Result<Selection> {
    cfg.validate(prepared.data.n())?;
    match variant {
        SeedingVariant::Rs => rs_kmeanspp(&prepared.data, &prepared.tree, cfg, rng),
        SeedingVariant::Delta => delta_kmeanspp(&prepared.data, cfg, rng),
        SeedingVariant::Exact => exact_kmeanspp(&prepared.data, cfg.k, rng),
        SeedingVariant::Uniform => uniform_seeding(&prepared.data, cfg.k, rng),
    }
}

/// Runs `variant` and records coverage of a `cfg.k`-cluster reference partition.
pub fn trace_seeding<R: Rng + ?Sized>(
    variant: SeedingVariant,
    prepared: &Prepared,
    cfg: &SeedingConfig,
    partition: &[usize],
    rng: &mut R,
) -> Result<(SeedingResult, SeedingTrace)> {
    if partition.len() != prepared.data.n() {
        return Err(Error::PartitionMismatch {
            got: partition.len(),
            expected: prepared.data.n(),
        });
    }
    let selection = run_variant(variant, prepared, cfg, rng)?;
    let trace = SeedingTrace::from_centers(&prepared.data, &selection.centers, partition, cfg.k)?;
    Ok((finish(&prepared.data, selection), trace))
}
