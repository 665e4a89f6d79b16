//! Wall-clock timed wrappers around the core seeding routines.
//!
//! Seeding time covers center selection only. The final cost is evaluated
//! after the clock stops, and preprocessing is timed separately.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rskpp_core::seeding::{finish, preprocess, run_variant, Prepared, SeedingVariant};
use rskpp_core::{Result, SeedingConfig, SeedingResult};

/// Centers the points and builds the norm tree, returning the elapsed seconds.
pub fn preprocess_timed(points: Vec<f64>, d: usize) -> Result<(Prepared, f64)> {
    let start = Instant::now();
    let prepared = preprocess(points, d)?;
    Ok((prepared, start.elapsed().as_secs_f64()))
}

/// One seeding run with a fresh `ChaCha8Rng` seeded from `cfg.rng_seed`.
pub fn run_timed(
    variant: SeedingVariant,
    prepared: &Prepared,
    cfg: &SeedingConfig,
    preprocess_time_s: f64,
) -> Result<SeedingResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let start = Instant::now();
    let selection = run_variant(variant, prepared, cfg, &mut rng)?;
    let seeding_time_s = start.elapsed().as_secs_f64();
    let mut result = finish(&prepared.data, selection);
    result.preprocess_time_s = preprocess_time_s;
    result.seeding_time_s = seeding_time_s;
    Ok(result)
}
