//! Experiment configuration, episode execution, sweeps and reports.

mod config;
mod episode;
mod report;
mod sweep;

pub use config::{default_p_grid, ExperimentConfig, SelectorSpec, StrategySpec};
pub use episode::{
    drive_episode, episode_streams, mix64, run_episode, splitmix64, strategy_names, RunRecord,
};
pub use report::{
    emit_report, read_runs_csv, report_from_dir, selector_tag, summarize_rows, write_runs_csv,
    write_series, write_spread, write_steps_csv, write_summary_csv, ReportFormat, RUNS_HEADER,
    SUMMARY_HEADER,
};
pub use sweep::{
    mean_std, run_selectors, summarize, sweep, usage_curves, EpisodeSummary, RunRow,
    SelectorSummary, SummaryStats, USAGE_HALF_WINDOW,
};
