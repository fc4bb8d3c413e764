//! Batch front-end for the admittance-controller design toolkit: config
//! handling, the sweep/front/select/bundle pipeline, file formats and the
//! bundle server.

pub mod artifacts;
pub mod bundle;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod serve;

pub use config::ToolkitConfig;
pub use error::{CliError, CliResult};
pub use pipeline::Pipeline;
