//! Command-line pipelines around `spinprep-core`: state listing, circuit
//! preparation, variational optimization, mitigated measurement, tomography
//! and gate-count tables.

pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod pipeline;
