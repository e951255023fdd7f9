//! CSV import and export. Every file has a header row and floats are
//! written with 9 significant digits.

use std::fs::{self, File};
use std::path::Path;
use std::str::FromStr;

use crate::analysis::{CellKey, Component, ExperimentSummary, Observation, RunOutcome, SuccessProfile};
use crate::de::DeTrace;
use crate::error::{Error, Result};
use crate::pam::{PamKind, ParamSample};
use crate::sim::{IterationRecord, Trace};
use crate::targets::TargetSpec;

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 8.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

/// `x` rounded to the precision the CSV files record.
pub fn as_recorded(x: f64) -> f64 {
    if x.is_finite() {
        fmt_float(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

struct Rows {
    path: std::path::PathBuf,
    reader: csv::Reader<File>,
    what: &'static str,
}

impl Rows {
    fn open(path: &Path, what: &'static str, header: &[&str]) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let found: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        if found.len() < header.len() || found.iter().zip(header).any(|(a, b)| a != b) {
            return Err(Error::Parse {
                what,
                path: path.to_owned(),
                reason: format!("expected header {}, found {}", header.join(","), found.join(",")),
            });
        }
        Ok(Rows {
            path: path.to_owned(),
            reader,
            what,
        })
    }

    fn error(&self, line: usize, reason: impl Into<String>) -> Error {
        Error::Parse {
            what: self.what,
            path: self.path.clone(),
            reason: format!("record {line}: {}", reason.into()),
        }
    }

    fn for_each(mut self, mut f: impl FnMut(&Rows, usize, &csv::StringRecord) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        let mut line = 0;
        while self.reader.read_record(&mut record)? {
            line += 1;
            f(&self, line, &record)?;
        }
        Ok(())
    }

    fn field<T: FromStr>(&self, line: usize, record: &csv::StringRecord, k: usize) -> Result<T> {
        let raw = record.get(k).ok_or_else(|| self.error(line, format!("missing column {k}")))?;
        raw.parse()
            .map_err(|_| self.error(line, format!("cannot parse `{raw}` in column {k}")))
    }

    fn opt_field(&self, line: usize, record: &csv::StringRecord, k: usize) -> Result<Option<f64>> {
        match record.get(k) {
            None | Some("") => Ok(None),
            Some(_) => self.field(line, record, k).map(Some),
        }
    }

    fn flag(&self, line: usize, record: &csv::StringRecord, k: usize) -> Result<bool> {
        match record.get(k) {
            Some("1") => Ok(true),
            Some("0") => Ok(false),
            other => Err(self.error(line, format!("success flag {other:?} is not 0 or 1"))),
        }
    }
}

fn target_from(family: &str, parameter: Option<f64>) -> std::result::Result<TargetSpec, String> {
    let need = || parameter.ok_or_else(|| format!("family {family} needs a parameter"));
    Ok(match family {
        "const" => TargetSpec::Const,
        "lin_inc" => TargetSpec::LinInc,
        "lin_dec" => TargetSpec::LinDec,
        "sin" => TargetSpec::Sin { omega: need()? },
        "random_walk" => TargetSpec::RandomWalk { step: need()? },
        other => return Err(format!("unknown target family `{other}`")),
    })
}

fn cell_fields(cell: &CellKey) -> [String; 4] {
    [
        cell.pam.to_string(),
        cell.target.family().to_string(),
        opt_float(cell.target.parameter()),
        fmt_float(cell.p_max),
    ]
}

fn read_cell(rows: &Rows, line: usize, record: &csv::StringRecord) -> Result<CellKey> {
    let pam: PamKind = record
        .get(0)
        .unwrap_or_default()
        .parse()
        .map_err(|e: Error| rows.error(line, e.to_string()))?;
    let parameter = rows.opt_field(line, record, 2)?;
    let target = target_from(record.get(1).unwrap_or_default(), parameter).map_err(|e| rows.error(line, e))?;
    Ok(CellKey {
        pam,
        target,
        p_max: rows.field(line, record, 3)?,
    })
}

pub const RUNS_HEADER: [&str; 7] = ["pam", "family", "parameter", "p_max", "run", "seed", "r_succ"];

/// One row of `runs.csv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRow {
    pub outcome: RunOutcome,
    pub seed: u64,
}

pub fn write_runs(path: &Path, rows: &[RunRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RUNS_HEADER)?;
    for row in rows {
        let [pam, family, parameter, p_max] = cell_fields(&row.outcome.cell);
        w.write_record([
            pam,
            family,
            parameter,
            p_max,
            row.outcome.run.to_string(),
            row.seed.to_string(),
            fmt_float(row.outcome.r_succ),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let mut out = Vec::new();
    Rows::open(path, "runs table", &RUNS_HEADER)?.for_each(|rows, line, record| {
        out.push(RunRow {
            outcome: RunOutcome {
                cell: read_cell(rows, line, record)?,
                run: rows.field(line, record, 4)?,
                r_succ: rows.field(line, record, 6)?,
            },
            seed: rows.field(line, record, 5)?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "pam", "family", "parameter", "p_max", "runs", "mean", "median", "std", "median_run",
];

pub fn write_summary(path: &Path, summary: &ExperimentSummary) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for (cell, stats) in &summary.rows {
        let [pam, family, parameter, p_max] = cell_fields(cell);
        w.write_record([
            pam,
            family,
            parameter,
            p_max,
            stats.runs.to_string(),
            fmt_float(stats.mean),
            fmt_float(stats.median),
            fmt_float(stats.std),
            stats.median_run.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a summary back as `(cell, mean)` pairs in file order.
pub fn read_summary_means(path: &Path) -> Result<Vec<(CellKey, f64)>> {
    let mut out = Vec::new();
    Rows::open(path, "summary table", &SUMMARY_HEADER)?.for_each(|rows, line, record| {
        out.push((read_cell(rows, line, record)?, rows.field(line, record, 5)?));
        Ok(())
    })?;
    Ok(out)
}

pub const TRACE_HEADER: [&str; 6] = ["t", "target", "i", "theta_f", "theta_c", "success"];

fn is_pair(trace: &Trace) -> bool {
    trace
        .iterations
        .first()
        .is_some_and(|r| r.target.f.is_some() && r.target.c.is_some())
}

/// Writes a full trace, one row per sample with `i` starting at 1. The
/// `target` column holds the target of the adapted component (of F in pair
/// mode, with C's target in a trailing `target_c` column).
pub fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    let pair = is_pair(trace);
    let mut w = writer(path)?;
    let mut header = TRACE_HEADER.to_vec();
    if pair {
        header.push("target_c");
    }
    w.write_record(&header)?;
    for rec in &trace.iterations {
        let target = fmt_float(rec.target.f.or(rec.target.c).unwrap_or(f64::NAN));
        for (i, (s, &ok)) in rec.samples.iter().zip(&rec.success).enumerate() {
            let mut row = vec![
                rec.t.to_string(),
                target.clone(),
                (i + 1).to_string(),
                opt_float(s.f),
                opt_float(s.c),
                u8::from(ok).to_string(),
            ];
            if pair {
                row.push(opt_float(rec.target.c));
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace`]; meta-parameters are not part
/// of the file and come back empty.
pub fn read_trace(path: &Path) -> Result<Trace> {
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut rows = Rows::open(path, "trace", &TRACE_HEADER)?;
    let pair = rows.reader.headers().map(|h| h.len() > TRACE_HEADER.len())?;
    rows.for_each(|rows, line, record| {
        let t: usize = rows.field(line, record, 0)?;
        let target: f64 = rows.field(line, record, 1)?;
        let sample = ParamSample {
            f: rows.opt_field(line, record, 3)?,
            c: rows.opt_field(line, record, 4)?,
        };
        let success = rows.flag(line, record, 5)?;
        if iterations.last().is_none_or(|r| r.t != t) {
            let goal = match (sample.f.is_some(), pair) {
                (true, true) => ParamSample::new(Some(target), rows.opt_field(line, record, 6)?),
                (true, false) => ParamSample::new(Some(target), None),
                (false, _) => ParamSample::new(None, Some(target)),
            };
            iterations.push(IterationRecord {
                t,
                target: goal,
                samples: Vec::new(),
                success: Vec::new(),
                meta: Vec::new(),
            });
        }
        let rec = iterations.last_mut().expect("pushed above");
        rec.samples.push(sample);
        rec.success.push(success);
        Ok(())
    })?;
    Ok(Trace {
        meta_labels: Vec::new(),
        iterations,
    })
}

/// Meta-parameter snapshots: `t` followed by one column per label.
pub fn write_meta(path: &Path, trace: &Trace) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string()];
    header.extend(trace.meta_labels.iter().cloned());
    w.write_record(&header)?;
    for rec in &trace.iterations {
        let mut row = vec![rec.t.to_string()];
        row.extend(rec.meta.iter().map(|&v| fmt_float(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_best_f(path: &Path, trace: &DeTrace) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "best_f"])?;
    for g in &trace.generations {
        w.write_record([g.t.to_string(), fmt_float(g.best_f)])?;
    }
    w.flush()?;
    Ok(())
}

pub const PARAM_LOG_HEADER: [&str; 4] = ["t", "F", "C", "success"];

pub fn write_param_log(path: &Path, trace: &DeTrace) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(PARAM_LOG_HEADER)?;
    for g in &trace.generations {
        for (&(f, c), &ok) in g.samples.iter().zip(&g.success) {
            w.write_record([g.t.to_string(), fmt_float(f), fmt_float(c), u8::from(ok).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a DE parameter log as observations of `component`.
pub fn read_param_log(path: &Path, component: Component) -> Result<Vec<Observation>> {
    let column = match component {
        Component::F => 1,
        Component::C => 2,
    };
    let mut out = Vec::new();
    Rows::open(path, "parameter log", &PARAM_LOG_HEADER)?.for_each(|rows, line, record| {
        out.push(Observation {
            t: rows.field(line, record, 0)?,
            value: rows.field(line, record, column)?,
            success: rows.flag(line, record, 3)?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub const PROFILE_HEADER: [&str; 5] = ["bin_lo", "bin_hi", "successes", "total", "probability"];

/// Writes a profile; empty bins have an empty `probability` field.
pub fn write_profile(path: &Path, profile: &SuccessProfile) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(PROFILE_HEADER)?;
    for bin in &profile.bins {
        w.write_record([
            fmt_float(bin.lo),
            fmt_float(bin.hi),
            bin.successes.to_string(),
            bin.total.to_string(),
            opt_float(bin.probability()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes preformatted rows under `header`.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
