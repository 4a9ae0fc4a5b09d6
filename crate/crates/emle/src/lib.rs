//! File formats, bundled datasets, reports and the command-line driver for
//! [`emle_core`].
//!
//! ```no_run
//! use emle::cli::{run, DataSource, RunConfig};
//!
//! let config = RunConfig::new(DataSource::Builtin("haberman".into()), "freq ~ a*b + a*c + b*c");
//! let out = run(&config).unwrap();
//! print!("{}", emle::report::render_text(&out.report));
//! ```

pub mod cli;
pub mod datasets;
pub mod io;
pub mod report;

pub use emle_core as core;
