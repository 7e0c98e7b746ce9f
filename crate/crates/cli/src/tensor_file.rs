//! Line-oriented text format for sampled tensors.
//!
//! ```text
//! # comment
//! d n_1 ... n_d
//! i_1 ... i_d value
//! ```
//!
//! Indices are 1-based. Blank lines and everything after `#` are ignored.
//! Values are written in the shortest form that parses back to the same
//! `f64`.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use tucker_rtr::SampledTensor;

use crate::error::{CliError, CliResult};

fn malformed(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("line {line}: {msg}"))
}

pub fn read_tensor_file<R: BufRead>(reader: R) -> CliResult<SampledTensor> {
    let mut dims: Option<Vec<usize>> = None;
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(dims) = &dims else {
            let nums = fields
                .iter()
                .map(|f| f.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| malformed(lineno, format!("bad header: {e}")))?;
            let (&d, rest) = nums.split_first().ok_or_else(|| malformed(lineno, "empty header"))?;
            if d < 2 || rest.len() != d || rest.contains(&0) {
                return Err(malformed(lineno, format!("header `{content}` is not `d n_1 .. n_d` with d >= 2")));
            }
            dims = Some(rest.to_vec());
            continue;
        };
        let d = dims.len();
        if fields.len() != d + 1 {
            return Err(malformed(lineno, format!("expected {} fields, found {}", d + 1, fields.len())));
        }
        let mut idx = Vec::with_capacity(d);
        for (f, &n) in fields[..d].iter().zip(dims) {
            let i: usize = f
                .parse()
                .map_err(|e| malformed(lineno, format!("bad index `{f}`: {e}")))?;
            if i == 0 || i > n {
                return Err(malformed(lineno, format!("index {i} outside 1..={n}")));
            }
            idx.push(i - 1);
        }
        let value: f64 = fields[d]
            .parse()
            .map_err(|e| malformed(lineno, format!("bad value `{}`: {e}", fields[d])))?;
        if !value.is_finite() {
            return Err(malformed(lineno, "value is not finite"));
        }
        if !seen.insert(idx.clone()) {
            return Err(malformed(lineno, "duplicate index"));
        }
        entries.push((idx, value));
    }
    let dims = dims.ok_or_else(|| CliError::Data("missing header".into()))?;
    if entries.is_empty() {
        return Err(CliError::Data("no entries".into()));
    }
    Ok(SampledTensor::from_entries(dims, entries)?)
}

pub fn write_tensor_file<W: Write>(mut w: W, data: &SampledTensor) -> CliResult<()> {
    write!(w, "{}", data.order())?;
    for n in data.dims() {
        write!(w, " {n}")?;
    }
    writeln!(w)?;
    for (idx, v) in data.iter() {
        for i in idx {
            write!(w, "{} ", i + 1)?;
        }
        writeln!(w, "{v:?}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor_path(path: &std::path::Path) -> CliResult<SampledTensor> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    read_tensor_file(std::io::BufReader::new(file))
        .map_err(|e| match e {
            CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
}
