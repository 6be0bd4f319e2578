//! Trace CSV, factor dump, and report JSON encodings.

use std::fmt::Write as _;
use std::io;

use bfgd_core::linalg::DenseMatrix;
use bfgd_core::solver::{FactorPair, SolveTrace};
use serde::Serialize;

use crate::error::{HarnessError, Result};

pub const TRACE_HEADER: &str = "iter,f_value,rel_change,dist,contraction,balance_residual,elapsed_s";

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn trace_to_csv(trace: &SolveTrace, record_elapsed: bool) -> String {
    let mut out = String::with_capacity(128 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let elapsed = if record_elapsed { fmt_f64(r.elapsed) } else { String::new() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            fmt_f64(r.f_value),
            fmt_f64(r.rel_change),
            fmt_opt(r.dist_to_truth),
            fmt_opt(r.contraction),
            fmt_f64(r.balance_residual),
            elapsed
        );
    }
    out
}

/// One parsed trace row; empty cells become `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub f_value: f64,
    pub rel_change: f64,
    pub dist: Option<f64>,
    pub contraction: Option<f64>,
    pub balance_residual: f64,
    pub elapsed_s: Option<f64>,
}

fn parse_err(what: &'static str, line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        what,
        line,
        msg: msg.into(),
    }
}

fn parse_float(cell: &str, what: &'static str, line: usize) -> Result<f64> {
    cell.parse()
        .map_err(|_| parse_err(what, line, format!("{cell:?} is not a number")))
}

fn parse_opt(cell: &str, line: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_float(cell, "trace", line).map(Some)
    }
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(parse_err("trace", 1, "missing or wrong header"));
    }
    lines
        .enumerate()
        .map(|(k, raw)| {
            let line = k + 2;
            let cells: Vec<&str> = raw.split(',').collect();
            if cells.len() != 7 {
                return Err(parse_err("trace", line, format!("expected 7 cells, got {}", cells.len())));
            }
            Ok(TraceRow {
                iter: cells[0]
                    .parse()
                    .map_err(|_| parse_err("trace", line, "bad iteration index"))?,
                f_value: parse_float(cells[1], "trace", line)?,
                rel_change: parse_float(cells[2], "trace", line)?,
                dist: parse_opt(cells[3], line)?,
                contraction: parse_opt(cells[4], line)?,
                balance_residual: parse_float(cells[5], "trace", line)?,
                elapsed_s: parse_opt(cells[6], line)?,
            })
        })
        .collect()
}

fn write_matrix(out: &mut String, tag: &str, a: &DenseMatrix) {
    let _ = writeln!(out, "{tag} {} {}", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
}

/// Lossless text dump of `(U, V)`.
pub fn factors_to_text(pair: &FactorPair) -> String {
    let mut out = String::new();
    write_matrix(&mut out, "U", pair.u());
    write_matrix(&mut out, "V", pair.v());
    out
}

pub fn parse_factors(text: &str) -> Result<FactorPair> {
    let mut lines = text.lines().enumerate();
    let mut read = |tag: &str| -> Result<DenseMatrix> {
        let (k, head) = lines.next().ok_or_else(|| parse_err("factors", 0, format!("missing {tag} block")))?;
        let parts: Vec<&str> = head.split_whitespace().collect();
        let dims = match parts.as_slice() {
            [t, r, c] if *t == tag => r.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
            _ => None,
        };
        let (rows, cols) = dims.ok_or_else(|| parse_err("factors", k + 1, format!("expected `{tag} <rows> <cols>`")))?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (k, raw) = lines.next().ok_or_else(|| parse_err("factors", 0, "truncated matrix"))?;
            for cell in raw.split(',') {
                data.push(parse_float(cell, "factors", k + 1)?);
            }
        }
        if data.len() != rows * cols {
            return Err(parse_err("factors", k + 1, "row lengths disagree with header"));
        }
        Ok(DenseMatrix::new(rows, cols, data)?)
    };
    let u = read("U")?;
    let v = read("V")?;
    Ok(FactorPair::new(u, v)?)
}

/// Compact JSON formatter writing every float with 17 significant digits.
/// Non-finite values are emitted as `null` by the serializer itself.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json_full_precision<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
