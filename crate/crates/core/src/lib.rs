//! Rejection-sampling accelerated k-means++ seeding.
//!
//! After a one-time pass that centers the data and builds a [`SampleTree`]
//! over per-point squared norms, each new center is drawn by proposing points
//! from a cheap mixture distribution and accepting them with a ratio that
//! corrects the proposal to the exact D² law. The expensive `O(nd)` scan of
//! classic k-means++ is never performed during seeding.
//!
//! The crate is `no_std` (it needs `alloc`) and never touches a clock or a
//! file. Timing, file formats and the command line live in the `rskpp` crate.
//!
//! ```
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//! use rskpp_core::{preprocess, rs_kmeanspp, finish, RoundLimit, SeedingConfig};
//!
//! let rows = [0.0, 0.0, 0.1, 0.0, 10.0, 10.0, 10.1, 10.0];
//! let prepared = preprocess(rows.to_vec(), 2).unwrap();
//! let mut cfg = SeedingConfig::new(2);
//! cfg.m = RoundLimit::Unbounded;
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! let selection = rs_kmeanspp(&prepared.data, &prepared.tree, &cfg, &mut rng).unwrap();
//! let result = finish(&prepared.data, selection);
//! assert_eq!(result.centers.len(), 2);
//! ```
#![no_std]

extern crate alloc;

mod error;
pub mod metrics;
pub mod model;
pub mod sampling;
pub mod seeding;
pub mod sqtree;

pub use error::{Error, Result};
pub use metrics::{clustering_cost, summarize, CostReport, Summary};
pub use model::{
    Dataset, DrawBudget, RoundLimit, SeedingConfig, SeedingResult, SeedingTrace, TraceStep,
    DEFAULT_SAFETY_CAP,
};
pub use sampling::{d2_sample, ProposalSampler, RejectionOutcome};
pub use seeding::{
    delta_kmeanspp, exact_kmeanspp, finish, preprocess, rs_kmeanspp, run_variant, trace_seeding,
    uniform_seeding, Prepared, SeedingVariant, Selection,
};
pub use sqtree::SampleTree;
