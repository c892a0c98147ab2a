use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use divsel::adapt::AdaptConfig;
use divsel::harness::{
    emit_report, mix64, report_from_dir, run_episode, summarize, sweep, write_spread,
    write_steps_csv, EpisodeSummary, ExperimentConfig, ReportFormat, RunRow, SelectorSpec,
    SummaryStats,
};
use divsel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "divsel",
    version,
    about = "Diversity-driven selection of exploration strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured selector for `repetitions` episodes.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configuration's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv", value_parser = ["csv", "json", "plotdata"])]
        format: String,
    },
    /// Fixed mixtures over a p grid plus the adaptive selector, for each d.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated perturbation ratios; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        d: Vec<f64>,
        /// Comma-separated mixture probabilities; defaults to the configured grid.
        #[arg(long = "p-grid", value_delimiter = ',')]
        p_grid: Vec<f64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv", value_parser = ["csv", "json", "plotdata"])]
        format: String,
    },
    /// Summarize a `runs.csv` produced by `sweep` or `run`.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            format,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            run(&cfg, &out, format.parse()?)
        }
        Command::Sweep {
            config,
            d,
            p_grid,
            reps,
            seed,
            out,
            format,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(reps) = reps {
                cfg.repetitions = reps;
            }
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let ds = if d.is_empty() {
                vec![cfg
                    .rgb_d()
                    .ok_or_else(|| Error::Config("roster has no rgb strategy".into()))?]
            } else {
                d
            };
            let p_grid = if p_grid.is_empty() {
                cfg.p_grid.clone()
            } else {
                p_grid
            };
            let adapt_cfg = match cfg.selector {
                SelectorSpec::Adapt(a) => a,
                _ => AdaptConfig {
                    tau: cfg.eval_tau,
                    ..Default::default()
                },
            };
            let mut stats = SummaryStats::default();
            for d in ds {
                let dcfg = cfg.with_rgb_d(d);
                dcfg.validate()?;
                stats.extend(sweep(&dcfg, &p_grid, adapt_cfg)?);
            }
            warn_degenerate(&stats);
            for path in emit_report(&stats, format.parse()?, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Report { input, out } => {
            for path in report_from_dir(&input, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn run(cfg: &ExperimentConfig, out: &std::path::Path, format: ReportFormat) -> Result<()> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let label = cfg.selector.label();
    let p = match cfg.selector {
        SelectorSpec::Mixture { p } => Some(p),
        _ => None,
    };
    let d = cfg.rgb_d();
    let mut stats = SummaryStats::default();
    let mut episodes = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let record = run_episode(cfg, mix64(cfg.master_seed, 0, rep as u64))?;
        match format {
            ReportFormat::Csv => write_steps_csv(&record, &out.join(format!("steps_{rep}.csv")))?,
            ReportFormat::Plotdata => {
                write_spread(&record, out, &format!("run{rep}"))?;
            }
            ReportFormat::Json => {}
        }
        stats.strategy_names = record.strategy_names.clone();
        stats.runs.push(RunRow {
            selector: label.to_string(),
            p,
            d,
            repetition: rep,
            final_coverage: record.final_coverage,
        });
        episodes.push(EpisodeSummary::from_record(&record));
    }
    stats
        .selectors
        .push(summarize(label, p, d, cfg.strategies.len(), &episodes));
    warn_degenerate(&stats);
    for path in emit_report(&stats, format, out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn warn_degenerate(stats: &SummaryStats) {
    if stats.selectors.iter().any(|s| s.std_degenerate) {
        eprintln!("warning: fewer than two repetitions; standard deviations reported as 0");
    }
}
