//! Command-line companion of `explore-core`: configuration, floor-plan
//! files, single and batch episode runs, metrics CSV and SVG plots.

pub mod batch;
pub mod commands;
pub mod config;
mod error;
pub mod maps;
pub mod plot;

pub use error::CliError;
