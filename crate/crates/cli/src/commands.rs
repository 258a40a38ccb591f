//! The three run modes. Each writes its file(s) and returns a short summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;

use kerrwalk::{
    fit_power_law, probability_distribution, run_sweep, LongTimeAverages, PowerLawFit, SweepTable,
    TimeSeriesRecord, WindowAccumulator, Walker,
};
use serde::Serialize;

use crate::config::{metadata_path, Mode, RunConfig};
use crate::error::{CliError, Result};
use crate::formats::{ProfileRow, RecordWriter, SweepMetadata, SweepRow, WalkRow};

/// Lower cut-off of the survival-probability power-law fit.
pub const FIT_T_MIN: f64 = 100.0;

#[derive(Debug, Clone, Serialize)]
pub struct WalkSummary {
    pub rows: usize,
    pub last: TimeSeriesRecord,
    pub max_norm_error: f64,
    pub averages: LongTimeAverages,
    /// Power-law fit of SP over even steps `t ≥ 100`, when enough points exist.
    pub sp_fit: Option<PowerLawFit>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

fn expect_mode(config: &RunConfig, mode: Mode) -> Result<()> {
    if config.mode != mode {
        return Err(CliError::config("mode", format!("expected `{mode}`, config says `{}`", config.mode)));
    }
    config.validate()
}

/// Evolves one walk and writes `t,ipr,sp,norm` for every `record_stride`-th step.
pub fn run_walk(config: &RunConfig) -> Result<WalkSummary> {
    expect_mode(config, Mode::Walk)?;
    let walk = config.walk.as_ref().expect("validated");
    let params = walk.params();
    let window = walk.window.resolve(walk.steps)?;
    let path = &config.output_path;
    let mut out = RecordWriter::new::<WalkRow>(create(path)?, config.format).map_err(CliError::io(path))?;

    let mut acc = WindowAccumulator::new(window);
    let mut fit_points = Vec::new();
    let mut rows = 0;
    let mut last = None;
    let mut max_norm_error: f64 = 0.0;
    let mut failure = None;
    kerrwalk::evolve(&params, |view| {
        let result = view.record().map_err(CliError::from).and_then(|record| {
            acc.push(&record);
            max_norm_error = max_norm_error.max((record.norm - 1.0).abs());
            if record.t.is_multiple_of(2) && record.sp > 0.0 {
                fit_points.push((record.t as f64, record.sp));
            }
            if record.t % config.record_stride == 0 {
                out.write(&WalkRow::from(record)).map_err(CliError::io(path))?;
                rows += 1;
            }
            last = Some(record);
            Ok(())
        });
        match result {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    out.finish().and_then(|mut w| w.flush()).map_err(CliError::io(path))?;

    Ok(WalkSummary {
        rows,
        last: last.expect("at least one step"),
        max_norm_error,
        averages: acc.finish()?,
        sp_fit: fit_power_law(&fit_points, FIT_T_MIN).ok(),
    })
}

/// Site probabilities inside the light cone at each snapshot time.
pub fn profile_rows(config: &RunConfig) -> Result<Vec<ProfileRow>> {
    expect_mode(config, Mode::Profile)?;
    let walk = config.walk.as_ref().expect("validated");
    let mut times = config.snapshot_times.clone();
    times.sort_unstable();
    times.dedup();

    let mut walker = Walker::new(&walk.params())?;
    let origin = walker.field().origin() as i64;
    let mut rows = Vec::new();
    for &t in &times {
        while walker.t() < t {
            walker.step()?;
        }
        let p = probability_distribution(walker.field());
        let reach = t as i64;
        let lo = (origin - reach).max(0);
        let hi = (origin + reach).min(p.len() as i64 - 1);
        rows.extend((lo..=hi).map(|n| ProfileRow {
            t,
            n: n - origin,
            p: p[n as usize],
        }));
    }
    Ok(rows)
}

/// Writes the `t,n,p` profile file and returns the number of rows.
pub fn run_profile(config: &RunConfig) -> Result<usize> {
    let rows = profile_rows(config)?;
    let path = &config.output_path;
    let mut out = RecordWriter::new::<ProfileRow>(create(path)?, config.format).map_err(CliError::io(path))?;
    for row in &rows {
        out.write(row).map_err(CliError::io(path))?;
    }
    out.finish().and_then(|mut w| w.flush()).map_err(CliError::io(path))?;
    Ok(rows.len())
}

/// Runs the diagram and writes the cell table plus its `.meta.json` sidecar.
pub fn run_sweep_cmd(config: &RunConfig, workers: usize) -> Result<SweepTable> {
    expect_mode(config, Mode::Sweep)?;
    if workers == 0 {
        return Err(CliError::config("workers", "must be at least 1"));
    }
    let spec = config.sweep.as_ref().expect("validated").spec();
    let table = run_sweep(&spec, workers)?;

    let path = &config.output_path;
    let mut out = RecordWriter::new::<SweepRow>(create(path)?, config.format).map_err(CliError::io(path))?;
    for cell in &table.cells {
        out.write(&SweepRow::from(cell)).map_err(CliError::io(path))?;
    }
    out.finish().and_then(|mut w| w.flush()).map_err(CliError::io(path))?;

    let meta_path = metadata_path(path);
    let meta = SweepMetadata::new(config, &table);
    std::fs::write(&meta_path, meta.to_json()).map_err(CliError::io(&meta_path))?;
    Ok(table)
}
