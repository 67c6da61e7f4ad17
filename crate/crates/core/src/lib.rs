//! Partial structural vector autoregressions for the transmission of
//! monetary policy to a single sector.
//!
//! The macro block (price level and policy instrument) evolves on its own
//! lags; sector output additionally responds to the macro block and to an
//! exogenous European aggregate. Estimation is two-step SUR, shocks are
//! identified recursively, and the crate reports impulse responses,
//! cumulative multipliers and variance decompositions per country.
//!
//! ```no_run
//! use partialvar::pipeline::{run_pipeline, RunConfig};
//!
//! let config = RunConfig::load("data/config.toml".as_ref())?;
//! let outcome = run_pipeline(&config, 4)?;
//! for a in &outcome.analyses {
//!     println!("{}: {:.3}", a.country_id, a.result.metrics.max_abs_cumulative);
//! }
//! # Ok::<(), partialvar::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod design;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod fevd;
pub mod identification;
pub mod ingestion;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod role;
pub mod synthetic;

pub use error::{Error, Result};
pub use role::Role;
