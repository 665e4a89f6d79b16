//! Planted Gaussian mixtures for benchmarks and statistical tests.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct Planted {
    /// Row-major `n × d` points.
    pub points: Vec<f64>,
    pub d: usize,
    /// Cluster label of each point.
    pub labels: Vec<usize>,
    /// Row-major `k × d` cluster means.
    pub means: Vec<f64>,
}

impl Planted {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Cost of the planted partition around its empirical cluster means.
    pub fn planted_cost(&self) -> f64 {
        let k = self.means.len() / self.d;
        let mut sums = vec![0.0; k * self.d];
        let mut counts = vec![0usize; k];
        for (row, &c) in self.points.chunks_exact(self.d).zip(&self.labels) {
            counts[c] += 1;
            for (s, v) in sums[c * self.d..(c + 1) * self.d].iter_mut().zip(row) {
                *s += v;
            }
        }
        for (c, &count) in counts.iter().enumerate() {
            for s in &mut sums[c * self.d..(c + 1) * self.d] {
                *s /= count.max(1) as f64;
            }
        }
        self.points
            .chunks_exact(self.d)
            .zip(&self.labels)
            .map(|(row, &c)| {
                row.iter()
                    .zip(&sums[c * self.d..(c + 1) * self.d])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// `n` points in `d` dimensions split round-robin over `k` clusters.
///
/// Means are drawn uniformly from `[-spread, spread]^d`; each point adds
/// isotropic noise with standard deviation `sigma`.
pub fn gaussian_mixture<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    k: usize,
    spread: f64,
    sigma: f64,
    rng: &mut R,
) -> Planted {
    assert!(k >= 1 && d >= 1, "need at least one cluster and one dimension");
    let means: Vec<f64> = (0..k * d).map(|_| rng.random_range(-spread..=spread)).collect();
    let mut points = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % k;
        labels.push(c);
        for j in 0..d {
            let z: f64 = StandardNormal.sample(rng);
            points.push(means[c * d + j] + sigma * z);
        }
    }
    Planted {
        points,
        d,
        labels,
        means,
    }
}
