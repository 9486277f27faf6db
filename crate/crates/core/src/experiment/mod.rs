//! Sweep configuration, runners and output for the command-line tool.

pub mod config;
pub mod oracle;
pub mod output;
pub mod report;
pub mod sweep;

pub use config::{ConfigError, Format, Mode, Overrides, SweepConfig};
pub use oracle::{run_selftest, OracleCheck, ORACLE_TOL};
pub use output::{fmt_num, write_csv, write_json, write_json_value};
pub use report::{run_single, SingleReport};
pub use sweep::{run_sweep, SweepRow, Trajectory};
