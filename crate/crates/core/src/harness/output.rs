//! CSV writers.
//!
//! Floats use Rust's shortest round-trip formatting, so identical values always
//! print identically.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::aggregate::BinStat;
use super::run::{EpisodeRecord, StepTraceRecord};
use crate::error::{Error, Result};

pub const EPISODES_HEADER: &str = "seed,episode,return,steps,explore_fraction,mean_abs_vpd,mean_bonus,mean_p_bar";
pub const TRACE_HEADER: &str = "seed,global_step,episode,episode_step,y,p_bar,vpd,bonus";
pub const SUMMARY_HEADER: &str = "bin,mean_return,ci_low,ci_high,n_seeds";
pub const RASTER_HEADER: &str = "episode,step_offset,y";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_rows<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut out = create(path)?;
    let go = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for row in rows {
            writeln!(out, "{row}")?;
        }
        out.flush()
    };
    go().map_err(|e| Error::io(path, e))
}

fn opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

pub fn write_episodes<'a>(path: &Path, records: impl IntoIterator<Item = &'a EpisodeRecord>) -> Result<()> {
    write_rows(
        path,
        EPISODES_HEADER,
        records.into_iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.seed,
                r.episode,
                r.episode_return,
                r.steps,
                r.explore_fraction,
                r.mean_abs_vpd,
                r.mean_bonus,
                r.mean_p_bar
            )
        }),
    )
}

pub fn write_trace<'a>(path: &Path, records: impl IntoIterator<Item = &'a StepTraceRecord>) -> Result<()> {
    write_rows(
        path,
        TRACE_HEADER,
        records.into_iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.seed,
                r.global_step,
                r.episode,
                r.episode_step,
                u8::from(r.explore),
                r.p_bar,
                r.vpd.map(|v| v.to_string()).unwrap_or_default(),
                r.bonus
            )
        }),
    )
}

pub fn write_raster<'a>(path: &Path, records: impl IntoIterator<Item = &'a StepTraceRecord>) -> Result<()> {
    write_rows(
        path,
        RASTER_HEADER,
        records.into_iter().map(|r| format!("{},{},{}", r.episode, r.episode_step, u8::from(r.explore))),
    )
}

pub fn write_summary(path: &Path, stats: &[BinStat]) -> Result<()> {
    write_rows(
        path,
        SUMMARY_HEADER,
        stats.iter().map(|s| format!("{},{},{},{},{}", s.bin, opt(s.mean), opt(s.ci_low), opt(s.ci_high), s.n)),
    )
}
