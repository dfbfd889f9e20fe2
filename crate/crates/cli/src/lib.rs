//! Scenario files, experiment commands and CSV output for `swarm-guide`.

pub mod commands;
pub mod scenario_file;

pub use commands::{
    cmd_compare, cmd_export_matrix, cmd_run, cmd_verify, compare_to_dir, load_scenario, run_to_dir, Fixture,
    VerifyTarget,
};
pub use scenario_file::{parse_scenario, render_scenario, ParseError};
