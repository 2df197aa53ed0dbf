//! Upward-looking conspicuous consumption on homophilic perception networks.
//!
//! Agents draw incomes, pick the agents they observe with a preference for
//! similar incomes, and then consume a mix of their isolated consumption and
//! a catch-up term towards the highest consumption they see. The crate covers
//! the full pipeline from income sampling to the stylised-facts battery and
//! the inequality–savings sweep, plus CSV/SVG emission for every dataset.
//!
//! ```no_run
//! use netconsume::experiment::{run_single, SimConfig};
//!
//! let result = run_single(&SimConfig::default()).unwrap();
//! println!("saving rate {:.4}", result.saving_rate);
//! ```
//!
//! The `examples/` directory has one runnable program per capability, and the
//! `netconsume` binary wraps the same functionality as a batch CLI.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod consumption;
pub mod error;
pub mod experiment;
pub mod income;
pub mod network;
pub mod output;
pub mod seed;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
