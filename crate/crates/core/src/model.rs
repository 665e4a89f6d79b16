//! Shared data types: datasets, run configuration, results and traces.

use alloc::vec::Vec;
use core::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default per-draw round ceiling for unbounded rejection sampling.
pub const DEFAULT_SAFETY_CAP: u64 = 1_000_000;

/// A dense `n × d` point matrix with cached per-point squared norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    n: usize,
    d: usize,
    nnz: usize,
    sq_norms: Vec<f64>,
    total_sq_norm: f64,
    centered: bool,
}

impl Dataset {
    /// Wraps a row-major buffer of `n * d` values.
    pub fn from_flat(points: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !points.len().is_multiple_of(d) {
            return Err(Error::ShapeMismatch {
                len: points.len(),
                d,
            });
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(pos));
        }
        Ok(Self::build(points, d, false))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut flat = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::ShapeMismatch {
                    len: row.len(),
                    d,
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(flat, d)
    }

    fn build(points: Vec<f64>, d: usize, centered: bool) -> Self {
        let n = points.len() / d;
        let nnz = points.iter().filter(|&&v| v != 0.0).count();
        let sq_norms: Vec<f64> = points
            .chunks_exact(d)
            .map(|row| row.iter().map(|v| v * v).sum())
            .collect();
        let total_sq_norm = sq_norms.iter().sum();
        Self {
            points,
            n,
            d,
            nnz,
            sq_norms,
            total_sq_norm,
            centered,
        }
    }

    /// Translates every point by the coordinate-wise mean.
    pub fn centered(self) -> Self {
        if self.centered {
            return self;
        }
        let mean = self.mean();
        let mut points = self.points;
        for row in points.chunks_exact_mut(self.d) {
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
        Self::build(points, self.d, true)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = alloc::vec![0.0; self.d];
        for row in self.points.chunks_exact(self.d) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.n as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.d)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of entries not exactly equal to `0.0`.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    #[inline]
    pub fn sq_norm(&self, i: usize) -> f64 {
        self.sq_norms[i]
    }

    pub fn sq_norms(&self) -> &[f64] {
        &self.sq_norms
    }

    /// `‖X‖²`, the sum of all squared norms. Equals the 1-means cost once centered.
    pub fn total_sq_norm(&self) -> f64 {
        self.total_sq_norm
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Squared distance from point `i` to the nearest of `centers` (point indices).
    #[inline]
    pub fn min_sq_dist(&self, i: usize, centers: &[usize]) -> f64 {
        let x = self.point(i);
        centers
            .iter()
            .map(|&c| sq_dist(x, self.point(c)))
            .fold(f64::INFINITY, f64::min)
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-draw round budget `m`: a positive count or unbounded.
///
/// Serializes as a JSON integer or the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundLimit {
    Rounds(u64),
    Unbounded,
}

impl fmt::Display for RoundLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundLimit::Rounds(m) => write!(f, "{m}"),
            RoundLimit::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for RoundLimit {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            RoundLimit::Rounds(m) => s.serialize_u64(*m),
            RoundLimit::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for RoundLimit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        struct LimitVisitor;

        impl Visitor<'_> for LimitVisitor {
            type Value = RoundLimit;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or \"unbounded\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> core::result::Result<RoundLimit, E> {
                Ok(RoundLimit::Rounds(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> core::result::Result<RoundLimit, E> {
                u64::try_from(v)
                    .map(RoundLimit::Rounds)
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> core::result::Result<RoundLimit, E> {
                if v.eq_ignore_ascii_case("unbounded") {
                    Ok(RoundLimit::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(LimitVisitor)
    }
}

/// The round budget actually applied to each rejection-sampling draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawBudget {
    /// At most this many proposals, then a uniform fallback.
    Rounds(u64),
    /// Keep proposing; fail after `safety_cap` proposals.
    Unbounded { safety_cap: u64 },
}

/// Parameters of one seeding run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingConfig {
    /// Number of centers to choose.
    pub k: usize,
    /// Rejection rounds per draw before falling back to a uniform point.
    pub m: RoundLimit,
    /// Multiplier `c` in `m' = ⌈c · m · ln(max(k, 2))⌉`.
    pub c_mult: f64,
    /// Apply the `c · ln k` scaling to `m`.
    pub scale_by_ln_k: bool,
    /// Uniform mixture weight for the δ-k-means++ variant.
    pub delta: f64,
    pub rng_seed: u64,
    /// Hard per-draw round ceiling used when `m` is unbounded.
    pub safety_cap: u64,
}

impl SeedingConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            m: RoundLimit::Unbounded,
            c_mult: 1.0,
            scale_by_ln_k: false,
            delta: 0.0,
            rng_seed: 0,
            safety_cap: DEFAULT_SAFETY_CAP,
        }
    }

    /// Checks the configuration against a dataset of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if self.k > n {
            return Err(Error::KTooLarge { k: self.k, n });
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(Error::BadDelta(self.delta));
        }
        if self.m == RoundLimit::Rounds(0) {
            return Err(Error::BadM);
        }
        if self.scale_by_ln_k && !(self.c_mult.is_finite() && self.c_mult > 0.0) {
            return Err(Error::BadCMult(self.c_mult));
        }
        if self.safety_cap == 0 {
            return Err(Error::BadSafetyCap);
        }
        Ok(())
    }

    /// The per-draw budget after optional `c · ln k` scaling.
    pub fn draw_budget(&self) -> DrawBudget {
        match self.m {
            RoundLimit::Unbounded => DrawBudget::Unbounded {
                safety_cap: self.safety_cap,
            },
            RoundLimit::Rounds(m) if self.scale_by_ln_k => {
                let ln_k = libm::log(self.k.max(2) as f64);
                let scaled = libm::ceil(self.c_mult * m as f64 * ln_k);
                DrawBudget::Rounds((scaled as u64).max(1))
            }
            RoundLimit::Rounds(m) => DrawBudget::Rounds(m),
        }
    }
}

/// Output of one seeding run. Centers are indices into the dataset and may repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingResult {
    pub centers: Vec<usize>,
    /// `Δ(X, S)`, the k-means cost of the chosen centers.
    pub cost: f64,
    pub preprocess_time_s: f64,
    pub seeding_time_s: f64,
    /// Draws that exhausted the round budget and fell back to a uniform point.
    pub fallback_count: u64,
    /// Proposals examined across all `k − 1` rejection-sampled draws.
    pub total_rejection_rounds: u64,
}

/// Coverage bookkeeping after the `t`-th center, relative to a reference partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: usize,
    pub chosen: usize,
    /// Reference clusters holding at least one chosen center (`H_t`), ascending.
    pub covered: Vec<usize>,
    /// Reference clusters with no center yet (`U_t`), ascending.
    pub uncovered: Vec<usize>,
    /// Iterations that covered no new cluster: `t − |H_t|`.
    pub wasted: usize,
    /// `Δᵗ(U_t)`: cost of the points in uncovered clusters against `S_t`.
    pub uncovered_cost: f64,
    /// `Δᵗ(H_t)`: cost of the points in covered clusters against `S_t`.
    pub covered_cost: f64,
    /// `Ψ_t = W_t / |U_t| · Δᵗ(U_t)`, zero when every cluster is covered.
    pub potential: f64,
    /// Whether this iteration covered a previously uncovered cluster.
    pub covered_new: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SeedingTrace {
    pub clusters: usize,
    pub steps: Vec<TraceStep>,
}

impl SeedingTrace {
    /// Replays a center sequence against `partition` (one label per point, each `< clusters`).
    pub fn from_centers(
        data: &Dataset,
        centers: &[usize],
        partition: &[usize],
        clusters: usize,
    ) -> Result<Self> {
        if partition.len() != data.n() {
            return Err(Error::PartitionMismatch {
                got: partition.len(),
                expected: data.n(),
            });
        }
        if let Some(&label) = partition.iter().find(|&&l| l >= clusters) {
            return Err(Error::PartitionLabel { label, clusters });
        }
        for &c in centers {
            if c >= data.n() {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    len: data.n(),
                });
            }
        }

        let mut min_dist = alloc::vec![f64::INFINITY; data.n()];
        let mut is_covered = alloc::vec![false; clusters];
        let mut steps = Vec::with_capacity(centers.len());
        for (idx, &chosen) in centers.iter().enumerate() {
            let c = data.point(chosen);
            for (i, md) in min_dist.iter_mut().enumerate() {
                let dist = sq_dist(data.point(i), c);
                if dist < *md {
                    *md = dist;
                }
            }
            let label = partition[chosen];
            let covered_new = !is_covered[label];
            is_covered[label] = true;

            let mut cluster_cost = alloc::vec![0.0; clusters];
            for (i, &l) in partition.iter().enumerate() {
                cluster_cost[l] += min_dist[i];
            }
            let (covered, uncovered): (Vec<usize>, Vec<usize>) =
                (0..clusters).partition(|&j| is_covered[j]);
            let uncovered_cost: f64 = uncovered.iter().map(|&j| cluster_cost[j]).sum();
            let covered_cost: f64 = covered.iter().map(|&j| cluster_cost[j]).sum();
            let t = idx + 1;
            let wasted = t - covered.len();
            let potential = if uncovered.is_empty() {
                0.0
            } else {
                wasted as f64 / uncovered.len() as f64 * uncovered_cost
            };
            steps.push(TraceStep {
                t,
                chosen,
                covered,
                uncovered,
                wasted,
                uncovered_cost,
                covered_cost,
                potential,
                covered_new,
            });
        }
        Ok(Self { clusters, steps })
    }
}
