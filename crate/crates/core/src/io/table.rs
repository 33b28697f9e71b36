//! CSV tables written by the `t2ta` commands, and readers for them.
//!
//! Floats are written with 17 significant digits in the style of C's
//! `%.17g`, so every value reads back bit-for-bit. Track labels in files
//! are 1-based.

use std::io::{Read, Write};

use crate::assignment::Assignment;
use crate::simulation::experiments::{MotivatingRow, RealizationDemo, StepComparison};
use crate::simulation::montecarlo::{McResult, McRow, Method};

pub const SWEEP_HEADER: [&str; 5] = ["method", "c", "p_ic_mean", "p_ic_std", "runs"];
pub const TRACE_HEADER: [&str; 4] = ["variant", "k", "f_min", "alpha"];
pub const MOTIVATING_HEADER: [&str; 4] = ["alpha_deg", "J0", "Je", "traceP"];
pub const REALIZATION_HEADER: [&str; 5] = ["realization", "row", "col", "cost", "assigned"];
pub const ASSIGNMENT_HEADER: [&str; 3] = ["track", "assigned", "cost"];

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
}

/// `%.17g`: shortest of fixed or scientific notation, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_float(s: &str, row: usize) -> Result<f64, TableError> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| TableError::Row {
            row,
            message: format!("bad number {s:?}"),
        }),
    }
}

fn parse_int(s: &str, row: usize) -> Result<usize, TableError> {
    s.parse().map_err(|_| TableError::Row {
        row,
        message: format!("bad integer {s:?}"),
    })
}

fn records<R: Read>(r: R, header: &[&str]) -> Result<Vec<csv::StringRecord>, TableError> {
    let mut reader = csv::Reader::from_reader(r);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(TableError::Header {
            expected: header.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }
    Ok(reader.records().collect::<Result<Vec<_>, _>>()?)
}

pub fn write_sweep<W: Write>(w: W, result: &McResult) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        out.write_record([
            r.method.name().to_string(),
            format_float(r.c),
            format_float(r.p_ic_mean),
            format_float(r.p_ic_std),
            r.runs.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sweep<R: Read>(r: R) -> Result<McResult, TableError> {
    let mut rows = Vec::new();
    for (i, rec) in records(r, &SWEEP_HEADER)?.iter().enumerate() {
        let method = Method::parse(&rec[0]).ok_or_else(|| TableError::Row {
            row: i + 1,
            message: format!("unknown method {:?}", &rec[0]),
        })?;
        rows.push(McRow {
            method,
            c: parse_float(&rec[1], i + 1)?,
            p_ic_mean: parse_float(&rec[2], i + 1)?,
            p_ic_std: parse_float(&rec[3], i + 1)?,
            runs: parse_int(&rec[4], i + 1)?,
        });
    }
    Ok(McResult { rows })
}

/// One row of the optimizer trace table.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub variant: String,
    pub k: usize,
    pub f_min: f64,
    /// Step taken to reach iterate `k`; NaN for the initial iterate.
    pub alpha: f64,
}

pub fn trace_rows(cmp: &StepComparison) -> Vec<TraceRow> {
    let mut rows = Vec::new();
    for (name, trace) in cmp.variants() {
        for (k, state) in trace.iter().enumerate() {
            rows.push(TraceRow {
                variant: name.to_string(),
                k,
                f_min: state.f_min(),
                alpha: if k == 0 {
                    f64::NAN
                } else {
                    state.alpha_history[k - 1]
                },
            });
        }
    }
    rows
}

pub fn write_trace<W: Write>(w: W, rows: &[TraceRow]) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for r in rows {
        out.write_record([
            r.variant.clone(),
            r.k.to_string(),
            format_float(r.f_min),
            format_float(r.alpha),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(r: R) -> Result<Vec<TraceRow>, TableError> {
    records(r, &TRACE_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            Ok(TraceRow {
                variant: rec[0].to_string(),
                k: parse_int(&rec[1], i + 1)?,
                f_min: parse_float(&rec[2], i + 1)?,
                alpha: parse_float(&rec[3], i + 1)?,
            })
        })
        .collect()
}

pub fn write_motivating<W: Write>(w: W, rows: &[MotivatingRow]) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MOTIVATING_HEADER)?;
    for r in rows {
        out.write_record([r.alpha_deg, r.j0, r.je, r.trace_p].map(format_float))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_motivating<R: Read>(r: R) -> Result<Vec<MotivatingRow>, TableError> {
    records(r, &MOTIVATING_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            Ok(MotivatingRow {
                alpha_deg: parse_float(&rec[0], i + 1)?,
                j0: parse_float(&rec[1], i + 1)?,
                je: parse_float(&rec[2], i + 1)?,
                trace_p: parse_float(&rec[3], i + 1)?,
            })
        })
        .collect()
}

/// Both assignment matrices of the demo, one entry per row; `assigned` is 1
/// where the solver paired agent-1 track `row` with agent-2 track `col`.
pub fn write_realization<W: Write>(w: W, demo: &RealizationDemo) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REALIZATION_HEADER)?;
    for (k, (a, sol)) in demo.matrices.iter().zip(&demo.assignments).enumerate() {
        let n = a.size();
        for col in 0..n {
            for row in 0..n {
                out.write_record([
                    (k + 1).to_string(),
                    (row + 1).to_string(),
                    (col + 1).to_string(),
                    format_float(a.costs()[(row, col)]),
                    u8::from(sol.perm[col] == row).to_string(),
                ])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// `assigned` is the agent-1 track paired with agent-2 track `track`.
pub fn write_assignment<W: Write>(w: W, sol: &Assignment) -> Result<(), TableError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ASSIGNMENT_HEADER)?;
    for (j, &i) in sol.perm.iter().enumerate() {
        out.write_record([
            (j + 1).to_string(),
            (i + 1).to_string(),
            format_float(sol.cost),
        ])?;
    }
    out.flush()?;
    Ok(())
}
