//! The proposal distribution and the rejection loop that corrects it to D².
//!
//! For a centered dataset and first center `c₁`, the proposal
//!
//! ```text
//! D₂(x) = (‖x‖² + ‖c₁‖²) / (‖X‖² + n‖c₁‖²)
//! ```
//!
//! is a mixture of the norm distribution held by the [`SampleTree`] and the
//! uniform distribution, so it costs one tree descent to sample. Since
//! `Δ(x, S) ≤ ‖x − c₁‖² ≤ 2(‖x‖² + ‖c₁‖²)`, accepting a proposal with
//! probability `ρ(x) = ½ Δ(x, S) / (‖x‖² + ‖c₁‖²)` yields an exact D² sample
//! after a geometric number of rounds with mean
//! `τ = 2(‖X‖² + n‖c₁‖²) / Δ(X, S)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Dataset, DrawBudget};
use crate::sqtree::SampleTree;

/// Sampler for `D₂` bound to a fixed first center.
#[derive(Debug, Clone, Copy)]
pub struct ProposalSampler<'a> {
    tree: &'a SampleTree,
    c1_sq_norm: f64,
    n: usize,
    mix_threshold: f64,
}

impl<'a> ProposalSampler<'a> {
    /// `tree` holds the squared norms of the `n` points; `c1_sq_norm` is `‖c₁‖²`.
    pub fn new(tree: &'a SampleTree, c1_sq_norm: f64) -> Result<Self> {
        let n = tree.len();
        let norm_mass = tree.total();
        let mass = norm_mass + n as f64 * c1_sq_norm;
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::ZeroMass);
        }
        Ok(Self {
            tree,
            c1_sq_norm,
            n,
            mix_threshold: norm_mass / mass,
        })
    }

    /// Binds the sampler to point `c1` of a dataset whose norms `tree` holds.
    pub fn for_center(tree: &'a SampleTree, data: &Dataset, c1: usize) -> Result<Self> {
        if c1 >= data.n() {
            return Err(Error::IndexOutOfRange {
                index: c1,
                len: data.n(),
            });
        }
        Self::new(tree, data.sq_norm(c1))
    }

    /// `‖X‖² / (‖X‖² + n‖c₁‖²)`: the chance a draw goes to the norm tree.
    pub fn mix_threshold(&self) -> f64 {
        self.mix_threshold
    }

    pub fn c1_sq_norm(&self) -> f64 {
        self.c1_sq_norm
    }

    /// `‖X‖² + n‖c₁‖²`, the normaliser of `D₂`.
    pub fn mass(&self) -> f64 {
        self.tree.total() + self.n as f64 * self.c1_sq_norm
    }

    /// Exact `D₂(i)`, using the same leaf weights the sampler draws from.
    pub fn probability(&self, i: usize) -> f64 {
        (self.tree.weight(i) + self.c1_sq_norm) / self.mass()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let r: f64 = rng.random();
        // r is uniform on [0, 1), so P(r < threshold) = threshold exactly.
        if r < self.mix_threshold {
            self.tree.sample(rng)
        } else {
            Ok(rng.random_range(0..self.n))
        }
    }
}

/// `ρ(x) = ½ Δ(x, S) / (‖x‖² + ‖c₁‖²)`, clamped to `[0, 1]` against rounding.
///
/// When both norms vanish `x = c₁ = 0`, so `Δ(x, S)` is zero too and `ρ = 0`.
pub fn acceptance_ratio(x_sq_norm: f64, c1_sq_norm: f64, dist_sq_to_s: f64) -> Result<f64> {
    let denom = x_sq_norm + c1_sq_norm;
    if denom <= 0.0 {
        return if dist_sq_to_s <= 0.0 {
            Ok(0.0)
        } else {
            Err(Error::ZeroDenominator)
        };
    }
    Ok((0.5 * dist_sq_to_s / denom).clamp(0.0, 1.0))
}

/// `τ = 2(‖X‖² + n‖c₁‖²) / Δ(X, S)`: the mean number of proposals per accepted sample.
pub fn oversampling_factor(total_sq_norm: f64, n: usize, c1_sq_norm: f64, cost: f64) -> f64 {
    2.0 * (total_sq_norm + n as f64 * c1_sq_norm) / cost
}

/// Result of one rejection-sampled draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RejectionOutcome {
    pub index: usize,
    /// Proposals examined, at least 1.
    pub rounds_used: u64,
    /// The budget ran out and `index` came from the fallback distribution.
    pub fell_back: bool,
}

/// Generic rejection sampling.
///
/// Repeatedly draws `x = propose(rng)` and `r ~ U[0, 1)`, accepting `x` when
/// `r < ratio(x)`. With a bounded budget, the draw falls back to
/// `fallback(rng)` after that many rejections; unbounded draws fail with
/// [`Error::SafetyCapExceeded`] once the cap is reached.
pub fn rejection_sample<R, P, A, F>(
    budget: DrawBudget,
    rng: &mut R,
    mut propose: P,
    mut ratio: A,
    mut fallback: F,
) -> Result<RejectionOutcome>
where
    R: Rng + ?Sized,
    P: FnMut(&mut R) -> Result<usize>,
    A: FnMut(usize) -> Result<f64>,
    F: FnMut(&mut R) -> usize,
{
    let limit = match budget {
        DrawBudget::Rounds(m) => m,
        DrawBudget::Unbounded { safety_cap } => safety_cap,
    };
    let mut rounds = 0;
    while rounds < limit {
        rounds += 1;
        let x = propose(rng)?;
        let r: f64 = rng.random();
        // Strict comparison: a point with ρ = 0 must never be accepted.
        if r < ratio(x)? {
            return Ok(RejectionOutcome {
                index: x,
                rounds_used: rounds,
                fell_back: false,
            });
        }
    }
    match budget {
        DrawBudget::Rounds(_) => Ok(RejectionOutcome {
            index: fallback(rng),
            rounds_used: rounds,
            fell_back: true,
        }),
        DrawBudget::Unbounded { safety_cap } => Err(Error::SafetyCapExceeded(safety_cap)),
    }
}

/// Draws the next center from `D²(X, S)` (or its uniform mixture under a bounded budget).
///
/// `centers[0]` must be the first center that `proposal` is bound to.
/// `Δ(x, S)` is computed against every current center for each proposal.
pub fn d2_sample<R: Rng + ?Sized>(
    data: &Dataset,
    centers: &[usize],
    budget: DrawBudget,
    proposal: &ProposalSampler<'_>,
    rng: &mut R,
) -> Result<RejectionOutcome> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let n = data.n();
    let c1_sq = proposal.c1_sq_norm();
    rejection_sample(
        budget,
        rng,
        |rng| proposal.sample(rng),
        |x| acceptance_ratio(data.sq_norm(x), c1_sq, data.min_sq_dist(x, centers)),
        |rng| rng.random_range(0..n),
    )
}

/// Upper bound `e^{pM} / (e^{pM} − 1)` on the expected number of batches when
/// `M` workers each run one round per batch with acceptance probability `p`.
pub fn expected_parallel_rounds(p: f64, workers: u32) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::BadProbability(p));
    }
    if workers == 0 {
        return Err(Error::BadWorkerCount);
    }
    let x = p * workers as f64;
    // e^x / (e^x − 1) = 1 / (1 − e^{−x}), stable for large x.
    Ok(1.0 / -libm::expm1(-x))
}
