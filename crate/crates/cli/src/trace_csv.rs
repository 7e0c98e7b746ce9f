//! CSV form of solver traces.

use std::io::{Read, Write};

use tucker_rtr::SolverTrace;

use crate::error::{CliError, CliResult};

/// Bumped whenever [`TRACE_HEADER`] changes.
pub const TRACE_SCHEMA_VERSION: u32 = 1;

pub const TRACE_HEADER: [&str; 8] = [
    "iter",
    "f",
    "grad_rel",
    "delta",
    "rho",
    "accepted",
    "inner_iters",
    "wall_ms",
];

/// One CSV row. `delta` and `rho` are empty for line-search methods and for
/// the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub f: f64,
    pub grad_rel: f64,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub accepted: bool,
    pub inner_iters: usize,
    pub wall_ms: f64,
}

impl TraceRow {
    /// Rows of `trace`; wall-clock times are zeroed unless `wall_time`, so
    /// that repeated runs give identical files.
    pub fn from_trace(trace: &SolverTrace, wall_time: bool) -> Vec<Self> {
        trace
            .records
            .iter()
            .map(|r| Self {
                iter: r.iter,
                f: r.f,
                grad_rel: r.grad_rel,
                delta: r.delta,
                rho: r.rho,
                accepted: r.accepted,
                inner_iters: r.inner_iters,
                wall_ms: if wall_time { r.wall_ms } else { 0.0 },
            })
            .collect()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_trace<W: Write>(w: W, rows: &[TraceRow]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for r in rows {
        out.write_record([
            r.iter.to_string(),
            format!("{:?}", r.f),
            format!("{:?}", r.grad_rel),
            opt(r.delta),
            opt(r.rho),
            u8::from(r.accepted).to_string(),
            r.inner_iters.to_string(),
            format!("{:?}", r.wall_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(r: R) -> CliResult<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let header = reader.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(CliError::Data(format!(
            "trace header {:?} does not match schema v{TRACE_SCHEMA_VERSION}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let bad = |row: usize, what: &str| CliError::Data(format!("trace row {row}: bad {what}"));
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(k + 1, TRACE_HEADER[i]));
        let maybe = |i: usize| {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(TraceRow {
            iter: rec[0].parse().map_err(|_| bad(k + 1, "iter"))?,
            f: num(1)?,
            grad_rel: num(2)?,
            delta: maybe(3)?,
            rho: maybe(4)?,
            accepted: match &rec[5] {
                "1" => true,
                "0" => false,
                _ => return Err(bad(k + 1, "accepted")),
            },
            inner_iters: rec[6].parse().map_err(|_| bad(k + 1, "inner_iters"))?,
            wall_ms: num(7)?,
        });
    }
    Ok(rows)
}
