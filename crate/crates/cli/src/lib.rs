//! Command-line front end: one subcommand per study, each writing a CSV
//! table and a JSON sidecar into the output directory.

pub mod args;
pub mod commands;
pub mod run_config;

pub use run_config::{RunConfig, RunConfigOverrides};

/// Process exit code for an error category.
pub fn exit_code(category: drivenjc::ErrorCategory) -> i32 {
    match category {
        drivenjc::ErrorCategory::Validation => 2,
        drivenjc::ErrorCategory::Numerical => 3,
        drivenjc::ErrorCategory::Io => 4,
    }
}
