//! Configuration files, presets and parallel sweeps on top of `ssqc-core`.

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;

pub use config::{
    emit_run, emit_sweep, parse_config, AxisSpec, ConfigDoc, ConfigError, ConfigErrors,
    InitialState, OutputSpec, RunConfig, SteadyConfig, SweepAxis, SweepSpec, SweepValues,
};
pub use error::{exit, CliError};
pub use runner::{
    run_json, run_single, run_sweep, sweep_json, write_failures_csv, write_sweep_csv,
    write_trajectory_csv, RunOutput, SweepFailure, SweepOutcome, SweepRow,
};
