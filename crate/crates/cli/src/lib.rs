//! Trace files, evaluation suites, and plot-data export for the
//! zone-crossing detection toolkit.

pub mod error;
pub mod eval;
pub mod export;
pub mod io;

pub use error::{CliError, Result};
pub use eval::{
    aggregate, parse_log_line, parse_suite_config, render_report, render_trial_log, run_eval,
    run_frontier_sweep, run_trial, EvalReport, SuiteConfig, TrialKind, TrialRecord, TrialSpec,
};
pub use export::{
    export_accuracy_by_condition, export_agc, export_extrema, export_phase_sum, PlotKind,
};
pub use io::{read_trace, trace_from_str, trace_to_string, write_trace, TRACE_FORMAT};
