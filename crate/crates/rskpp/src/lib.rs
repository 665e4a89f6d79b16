//! Dataset loading, timed seeding runs, benchmark grids and the `rskpp`
//! command line, built on [`rskpp_core`].

pub mod bench;
pub mod cli;
pub mod ingest;
pub mod runner;
pub mod synth;
