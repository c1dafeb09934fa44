//! CSV and JSON output. CSV files are opened for appending and get their
//! header only when empty, so repeated runs into one directory accumulate
//! rows instead of clobbering earlier ones.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::experiment::{EvalPath, RunSummary};
use crate::market::MarketPath;
use crate::{Error, Result};

pub const REWARD_CURVE: &str = "reward_curve.csv";
pub const TERMINAL_PNL: &str = "terminal_pnl.csv";
pub const ACTIONS: &str = "actions.csv";
pub const SUMMARY: &str = "summary.json";
pub const PATHS: &str = "paths.csv";
pub const SNAPSHOT: &str = "agent.json";

/// Decimal rendering with 12 significant digits, switching to exponent form
/// for very large or small magnitudes.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent form") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return sci;
    }
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

pub struct CsvAppender {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvAppender {
    pub fn open(path: &Path, header: &str) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let empty = file.metadata().map_err(|e| Error::io(path, e))?.len() == 0;
        let mut appender = CsvAppender {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        if empty {
            appender.line(header)?;
        }
        Ok(appender)
    }

    fn line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.line(&fields.join(","))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_reward_curve(dir: &Path, curve: &[f64]) -> Result<()> {
    ensure_dir(dir)?;
    let mut csv = CsvAppender::open(&dir.join(REWARD_CURVE), "episode,accumulated_reward")?;
    for (episode, r) in curve.iter().enumerate() {
        csv.row(&[episode.to_string(), format_float(*r)])?;
    }
    csv.finish()
}

pub fn write_terminal_pnl(dir: &Path, paths: &[EvalPath]) -> Result<()> {
    ensure_dir(dir)?;
    let mut csv = CsvAppender::open(&dir.join(TERMINAL_PNL), "path_id,agent_pnl,oracle_pnl")?;
    for (id, p) in paths.iter().enumerate() {
        csv.row(&[
            id.to_string(),
            format_float(p.agent.terminal_pnl),
            format_float(p.oracle_pnl),
        ])?;
    }
    csv.finish()
}

pub fn write_actions(dir: &Path, paths: &[EvalPath]) -> Result<()> {
    ensure_dir(dir)?;
    let mut csv = CsvAppender::open(
        &dir.join(ACTIONS),
        "path_id,step,spot,delta,action_level,reward",
    )?;
    for (id, p) in paths.iter().enumerate() {
        let e = &p.agent;
        for step in 0..e.actions.len() {
            csv.row(&[
                id.to_string(),
                step.to_string(),
                format_float(e.spots[step]),
                format_float(e.deltas[step]),
                format_float(e.levels[step]),
                format_float(e.rewards[step]),
            ])?;
        }
    }
    csv.finish()
}

pub fn write_paths(dir: &Path, paths: &[MarketPath]) -> Result<()> {
    ensure_dir(dir)?;
    let mut csv = CsvAppender::open(&dir.join(PATHS), "path_id,step,time,spot")?;
    for (id, p) in paths.iter().enumerate() {
        for (step, s) in p.spots.iter().enumerate() {
            csv.row(&[
                id.to_string(),
                step.to_string(),
                format_float(step as f64 * p.grid.dt),
                format_float(*s),
            ])?;
        }
    }
    csv.finish()
}

/// All per-run artifacts: the three CSVs plus `summary.json` (overwritten).
pub fn write_run(dir: &Path, summary: &RunSummary, paths: &[EvalPath]) -> Result<()> {
    write_reward_curve(dir, &summary.reward_curve)?;
    write_evaluation(dir, summary, paths)
}

/// Evaluation artifacts only, for runs whose training curve was written earlier.
pub fn write_evaluation(dir: &Path, summary: &RunSummary, paths: &[EvalPath]) -> Result<()> {
    write_terminal_pnl(dir, paths)?;
    write_actions(dir, paths)?;
    summary.write(&dir.join(SUMMARY))
}
