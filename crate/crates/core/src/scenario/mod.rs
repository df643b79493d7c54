//! Scenario files and the commands of the `antires` front end.

mod commands;
mod config;

pub use commands::*;
pub use config::*;
