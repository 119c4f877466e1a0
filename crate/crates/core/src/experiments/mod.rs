//! Scenario registry, trajectory runs, sweeps, first-maximum extraction,
//! power-law scaling fits and CSV/JSON output.

mod fit;
mod records;
mod scenarios;

pub use fit::{
    amplitude, default_fit_window, first_maximum, fit_power_law, scaling, scaling_from_runs,
    Amplitude, FirstMaximum, PowerFit, Quantity, ScalingFit, MIN_FIT_POINTS,
};
pub use records::{
    read_config, read_records, run_file_name, sidecar_path, summarize, write_atomic, write_json,
    write_records, write_run, write_summary, SummaryRow, RECORD_HEADER,
};
pub use scenarios::{
    analytic_trajectory, builtin, builtin_scenarios, check_invariants, oracle_check, oracle_grid,
    records_from, run_scenario, run_trajectory, sweep, InitialState, InvariantReport, OracleReport,
    ScenarioConfig, ScenarioName, DEFAULT_SAMPLES, ISOLATED_TOLERANCES, ORACLE_MAX_K,
    ORACLE_TOLERANCES,
};
