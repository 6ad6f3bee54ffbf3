//! Trace CSV: `step,f_re,f_im,f_abs,stderr_re,stderr_im`.
//!
//! `f` is the multiplier applied to the coherence `b`. Numbers use the
//! shortest representation that parses back to the same double; stderr
//! cells are empty for exact traces.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::trace::{CoherenceTrace, StdErr, TracePoint};

pub const HEADER: [&str; 6] = ["step", "f_re", "f_im", "f_abs", "stderr_re", "stderr_im"];

/// Shortest round-trip decimal; exponent form for very small magnitudes.
pub fn format_number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-5 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn write_trace<W: Write>(trace: &CoherenceTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for p in trace.points() {
        let (se_re, se_im) = match p.stderr {
            Some(se) => (format_number(se.re), format_number(se.im)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            p.n.to_string(),
            format_number(p.factor.re),
            format_number(p.factor.im),
            format_number(p.factor.norm()),
            se_re,
            se_im,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<CoherenceTrace, String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers().map_err(|e| format!("line 1: {e}"))?;
    if header.iter().ne(HEADER) {
        return Err(format!("line 1: expected header `{}`", HEADER.join(",")));
    }
    let mut points: Vec<TracePoint> = Vec::new();
    for (i, record) in r.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| format!("line {line}: {e}"))?;
        if record.len() != HEADER.len() {
            return Err(format!("line {line}: expected {} columns", HEADER.len()));
        }
        let num = |col: usize| -> Result<f64, String> {
            record[col]
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("line {line}: column `{}` is not a number", HEADER[col]))
        };
        let n: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| format!("line {line}: column `step` is not a non-negative integer"))?;
        if let Some(prev) = points.last() {
            if n <= prev.n {
                return Err(format!("line {line}: steps must be increasing"));
            }
        }
        let factor = Complex64::new(num(1)?, num(2)?);
        num(3)?;
        let stderr = match (record[4].trim().is_empty(), record[5].trim().is_empty()) {
            (true, true) => None,
            (false, false) => Some(StdErr {
                re: num(4)?,
                im: num(5)?,
            }),
            _ => {
                return Err(format!(
                    "line {line}: stderr columns must both be set or both empty"
                ))
            }
        };
        points.push(TracePoint { n, factor, stderr });
    }
    Ok(CoherenceTrace::from_points(points))
}
