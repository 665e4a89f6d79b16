//! Repeated seeding runs over a (k, m, variant) grid, reduced to one row per cell.

use std::io::Write;

use rskpp_core::seeding::{Prepared, SeedingVariant};
use rskpp_core::{summarize, Result, RoundLimit, SeedingConfig};
use serde::{Deserialize, Serialize};

use crate::runner::run_timed;

/// Column order here is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub variant: String,
    pub k: usize,
    /// Round budget, `unbounded`, or `-` for variants without one.
    pub m: String,
    pub repeats: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub ci95_cost: f64,
    pub mean_seed_time_s: f64,
    pub mean_preprocess_time_s: f64,
    pub mean_fallback_count: f64,
    pub rng_seed: u64,
}

pub const HEADER: [&str; 12] = [
    "dataset",
    "variant",
    "k",
    "m",
    "repeats",
    "mean_cost",
    "std_cost",
    "ci95_cost",
    "mean_seed_time_s",
    "mean_preprocess_time_s",
    "mean_fallback_count",
    "rng_seed",
];

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub dataset: String,
    pub variants: Vec<SeedingVariant>,
    pub k_list: Vec<usize>,
    pub m_list: Vec<RoundLimit>,
    pub repeats: usize,
    /// `k`, `m` and `rng_seed` are overwritten per cell and repeat.
    pub base: SeedingConfig,
}

impl BenchPlan {
    /// Cells in output order. Only `rs` is expanded over `m_list`.
    pub fn cells(&self) -> Vec<(usize, Option<RoundLimit>, SeedingVariant)> {
        let mut cells = Vec::new();
        for &k in &self.k_list {
            for &variant in &self.variants {
                if variant == SeedingVariant::Rs {
                    cells.extend(self.m_list.iter().map(|&m| (k, Some(m), variant)));
                } else {
                    cells.push((k, None, variant));
                }
            }
        }
        cells
    }
}

/// Runs one cell. Repeat `r` seeds its generator with `base.rng_seed ^ r`.
pub fn run_cell(
    prepared: &Prepared,
    plan: &BenchPlan,
    k: usize,
    m: Option<RoundLimit>,
    variant: SeedingVariant,
    preprocess_time_s: f64,
) -> Result<BenchRecord> {
    let repeats = plan.repeats.max(1);
    let mut cfg = plan.base.clone();
    cfg.k = k;
    if let Some(m) = m {
        cfg.m = m;
    }
    let mut costs = Vec::with_capacity(repeats);
    let mut seed_time = 0.0;
    let mut fallbacks = 0.0;
    for r in 0..repeats as u64 {
        cfg.rng_seed = plan.base.rng_seed ^ r;
        let result = run_timed(variant, prepared, &cfg, preprocess_time_s)?;
        costs.push(result.cost);
        seed_time += result.seeding_time_s;
        fallbacks += result.fallback_count as f64;
    }
    let (mean_cost, std_cost, ci95_cost) = if repeats >= 2 {
        let s = summarize(&costs)?;
        (s.mean, s.std, s.ci95)
    } else {
        (costs[0], 0.0, 0.0)
    };
    Ok(BenchRecord {
        dataset: plan.dataset.clone(),
        variant: variant.name().to_string(),
        k,
        m: m.map_or_else(|| "-".to_string(), |m| m.to_string()),
        repeats,
        mean_cost,
        std_cost,
        ci95_cost,
        mean_seed_time_s: seed_time / repeats as f64,
        mean_preprocess_time_s: preprocess_time_s,
        mean_fallback_count: fallbacks / repeats as f64,
        rng_seed: plan.base.rng_seed,
    })
}

pub fn run_bench(prepared: &Prepared, plan: &BenchPlan, preprocess_time_s: f64) -> Result<Vec<BenchRecord>> {
    plan.cells()
        .into_iter()
        .map(|(k, m, v)| run_cell(prepared, plan, k, m, v, preprocess_time_s))
        .collect()
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    if records.is_empty() {
        wtr.write_record(HEADER)?;
    }
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Space-aligned table for terminals.
pub fn write_table<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    let rows: Vec<[String; 12]> = records
        .iter()
        .map(|r| {
            [
                r.dataset.clone(),
                r.variant.clone(),
                r.k.to_string(),
                r.m.clone(),
                r.repeats.to_string(),
                format!("{:.6e}", r.mean_cost),
                format!("{:.4e}", r.std_cost),
                format!("{:.4e}", r.ci95_cost),
                format!("{:.6}", r.mean_seed_time_s),
                format!("{:.6}", r.mean_preprocess_time_s),
                format!("{:.3}", r.mean_fallback_count),
                r.rng_seed.to_string(),
            ]
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(&HEADER))?;
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        writeln!(out, "{}", line(&cells))?;
    }
    Ok(())
}
