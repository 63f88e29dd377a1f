//! Library half of the `tcomp` command-line tool.
//!
//! The binary in `main.rs` is a thin wrapper around [`commands`]; everything
//! else lives here so integration tests can drive the exact code paths the
//! executable uses:
//!
//! * [`rng`] — the seeded random number generator behind masks and synthetic
//!   data, pinned to published algorithms so streams are reproducible from
//!   any language.
//! * [`formats`] — the `TNS1` tensor and `MSK1` mask binary file formats.
//! * [`data`] — image/frame/tensor ingestion, mask generation, and synthetic
//!   low-tubal-rank instances.
//! * [`report`] — the key/value run report, its residual-history CSV, and the
//!   rank-sweep CSV.
//! * [`commands`] — argument definitions and the implementation of each
//!   subcommand.

pub mod commands;
pub mod data;
pub mod formats;
pub mod report;
pub mod rng;
