//! Configuration, experiment orchestration and the CLI commands.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_bounds, cmd_constants, cmd_simulate, cmd_sweep, cmd_validate, cmd_verify, CommandArgs,
    CommandError, CommandResult, EXIT_FAILURE, EXIT_OK, EXIT_USAGE,
};
pub use config::ExperimentConfig;
