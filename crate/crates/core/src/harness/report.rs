//! Report files: run tables, per-step traces and plot series.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::harness::episode::RunRecord;
use crate::harness::sweep::{mean_std, RunRow, SelectorSummary, SummaryStats};

pub const RUNS_HEADER: [&str; 5] = ["selector", "p", "d", "repetition", "final_coverage"];
pub const SUMMARY_HEADER: [&str; 7] = [
    "selector",
    "p",
    "d",
    "repetitions",
    "mean",
    "std",
    "std_degenerate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Plotdata,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "plotdata" => Ok(Self::Plotdata),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// File-name fragment identifying a selector summary.
pub fn selector_tag(selector: &str, p: Option<f64>, d: Option<f64>) -> String {
    let mut tag = selector.to_string();
    if let Some(p) = p {
        tag.push_str(&format!("_p{p}"));
    }
    if let Some(d) = d {
        tag.push_str(&format!("_d{d}"));
    }
    tag
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

pub fn write_runs_csv(rows: &[RunRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RUNS_HEADER)?;
    for r in rows {
        w.write_record([
            r.selector.clone(),
            opt(r.p),
            opt(r.d),
            r.repetition.to_string(),
            r.final_coverage.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct RawRunRow {
    selector: String,
    p: Option<f64>,
    d: Option<f64>,
    repetition: usize,
    final_coverage: f64,
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(RUNS_HEADER) {
        return Err(Error::Config(format!(
            "{} does not have the run-table header",
            path.display()
        )));
    }
    r.deserialize::<RawRunRow>()
        .map(|row| {
            let row = row?;
            Ok(RunRow {
                selector: row.selector,
                p: row.p,
                d: row.d,
                repetition: row.repetition,
                final_coverage: row.final_coverage,
            })
        })
        .collect()
}

/// Groups run rows by `(selector, p, d)` in first-seen order and computes
/// mean and standard deviation of the final coverage. Curves stay empty.
pub fn summarize_rows(rows: &[RunRow]) -> Vec<SelectorSummary> {
    type Key = (String, Option<f64>, Option<f64>);
    let mut groups: Vec<(Key, Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.selector.clone(), r.p, r.d);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r.final_coverage),
            None => groups.push((key, vec![r.final_coverage])),
        }
    }
    groups
        .into_iter()
        .map(|((selector, p, d), finals)| {
            let (mean, std) = mean_std(&finals);
            SelectorSummary {
                selector,
                p,
                d,
                repetitions: finals.len(),
                mean,
                std: std.unwrap_or(0.0),
                std_degenerate: std.is_none(),
                usage: Vec::new(),
                diversity: Vec::new(),
            }
        })
        .collect()
}

pub fn write_summary_csv(selectors: &[SelectorSummary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for s in selectors {
        w.write_record([
            s.selector.clone(),
            opt(s.p),
            opt(s.d),
            s.repetitions.to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            s.std_degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `t value` series.
pub fn write_series(values: &[f64], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (t, v) in values.iter().enumerate() {
        writeln!(w, "{t} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step trace of one run.
pub fn write_steps_csv(record: &RunRecord, path: &Path) -> Result<()> {
    let s = record.steps.first().map_or(2, |l| l.effect.dim());
    let mut header = vec!["t".to_string(), "strategy".into(), "was_random".into()];
    header.extend((0..s).map(|i| format!("y{i}")));
    header.extend(["diversity".to_string(), "cumulative_coverage".into()]);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&header)?;
    for log in &record.steps {
        let mut row = vec![
            log.t.to_string(),
            record
                .strategy_names
                .get(log.chosen)
                .cloned()
                .unwrap_or_else(|| log.chosen.to_string()),
            log.was_random.to_string(),
        ];
        row.extend(log.effect.coords().iter().map(|c| c.to_string()));
        row.push(log.diversity.to_string());
        row.push(log.cumulative_coverage.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Effect scatter (`y0 y1` per line) and cumulative coverage series of one run.
pub fn write_spread(record: &RunRecord, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let scatter = dir.join(format!("{stem}_spread.dat"));
    let mut w = BufWriter::new(File::create(&scatter)?);
    for log in &record.steps {
        let line: Vec<String> = log.effect.coords().iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    let coverage = dir.join(format!("{stem}_coverage.dat"));
    let series: Vec<f64> = record.steps.iter().map(|l| l.cumulative_coverage).collect();
    write_series(&series, &coverage)?;
    Ok(vec![scatter, coverage])
}

/// Writes `stats` into directory `dir` and returns the files created.
///
/// * csv: `runs.csv` and `summary.csv`
/// * json: `summary.json`
/// * plotdata: one `t value` file per selector, curve kind and strategy
pub fn emit_report(stats: &SummaryStats, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    match format {
        ReportFormat::Csv => {
            let runs = dir.join("runs.csv");
            write_runs_csv(&stats.runs, &runs)?;
            let summary = dir.join("summary.csv");
            write_summary_csv(&stats.selectors, &summary)?;
            out.extend([runs, summary]);
        }
        ReportFormat::Json => {
            let path = dir.join("summary.json");
            let mut w = BufWriter::new(File::create(&path)?);
            serde_json::to_writer_pretty(&mut w, stats)?;
            w.flush()?;
            out.push(path);
        }
        ReportFormat::Plotdata => {
            for sel in &stats.selectors {
                let tag = selector_tag(&sel.selector, sel.p, sel.d);
                for (kind, curves) in [("usage", &sel.usage), ("diversity", &sel.diversity)] {
                    for (j, curve) in curves.iter().enumerate() {
                        let name = stats
                            .strategy_names
                            .get(j)
                            .map(|n| sanitize(n))
                            .unwrap_or_else(|| j.to_string());
                        let path = dir.join(format!("{tag}_{kind}_{name}.dat"));
                        write_series(curve, &path)?;
                        out.push(path);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rebuilds summary tables and coverage-versus-p series from a `runs.csv`
/// found in `in_dir`.
pub fn report_from_dir(in_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_runs_csv(&in_dir.join("runs.csv"))?;
    let summaries = summarize_rows(&rows);
    fs::create_dir_all(out_dir)?;
    let summary = out_dir.join("summary.csv");
    write_summary_csv(&summaries, &summary)?;
    let mut out = vec![summary];

    let mut ds: Vec<Option<f64>> = Vec::new();
    for s in &summaries {
        if !ds.contains(&s.d) {
            ds.push(s.d);
        }
    }
    for d in ds {
        let suffix = d.map(|d| format!("_d{d}")).unwrap_or_default();
        let mut mixtures: Vec<&SelectorSummary> = summaries
            .iter()
            .filter(|s| s.d == d && s.selector == "mixture" && s.p.is_some())
            .collect();
        if !mixtures.is_empty() {
            mixtures.sort_by(|a, b| a.p.partial_cmp(&b.p).expect("p is finite"));
            let path = out_dir.join(format!("mixtures{suffix}.dat"));
            let mut w = BufWriter::new(File::create(&path)?);
            for m in mixtures {
                writeln!(w, "{} {} {}", m.p.unwrap_or_default(), m.mean, m.std)?;
            }
            w.flush()?;
            out.push(path);
        }
        if let Some(a) = summaries.iter().find(|s| s.d == d && s.selector == "adapt") {
            let path = out_dir.join(format!("adapt{suffix}.dat"));
            fs::write(&path, format!("{} {}\n", a.mean, a.std))?;
            out.push(path);
        }
    }
    Ok(out)
}
