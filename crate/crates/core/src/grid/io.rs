//! Plain-text storage for sampled functions: a `#grid` header line followed by
//! one value per line, axis 0 fastest.
//!
//! ```text
//! #grid,dim=2,resolution=4,lower=-1;-1,upper=1;1
//! 0.25
//! ...
//! ```

use super::{GridSpec, SampledFunction};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

fn parse_pair(s: &str, dim: usize) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != dim {
        return Err(Error::Config(format!("expected {dim} bound(s), got '{s}'")));
    }
    let mut out = [0.0, 1.0];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad bound '{p}'")))?;
    }
    Ok(out)
}

fn parse_header(line: &str) -> Result<GridSpec> {
    let body = line
        .trim()
        .strip_prefix("#grid")
        .ok_or_else(|| Error::Config("line 1: missing '#grid' header".into()))?;
    let mut dim = None;
    let mut res = None;
    let mut lower = None;
    let mut upper = None;
    for field in body.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line 1: malformed field '{field}'")))?;
        match key {
            "dim" => dim = value.parse::<usize>().ok(),
            "resolution" => res = value.parse::<usize>().ok(),
            "lower" => lower = Some(value.to_string()),
            "upper" => upper = Some(value.to_string()),
            _ => return Err(Error::Config(format!("line 1: unknown field '{key}'"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::Config("line 1: missing dim".into()))?;
    let res = res.ok_or_else(|| Error::Config("line 1: missing resolution".into()))?;
    let lower = parse_pair(&lower.unwrap_or_default(), dim)?;
    let upper = parse_pair(&upper.unwrap_or_default(), dim)?;
    match dim {
        1 => GridSpec::new_1d(lower[0], upper[0], res),
        2 => GridSpec::new_2d(lower, upper, res),
        d => Err(Error::Config(format!("line 1: unsupported dimension {d}"))),
    }
}

pub fn read_csv(reader: impl BufRead) -> Result<SampledFunction> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty function file".into()))??;
    let grid = parse_header(&header)?;
    let mut values = Vec::with_capacity(grid.len());
    for (n, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("line {}: bad value '{t}'", n + 2)))?;
        values.push(v);
    }
    SampledFunction::new(grid, values)
}

pub fn write_csv(f: &SampledFunction, mut out: impl Write) -> Result<()> {
    let g = f.grid();
    let pair = |v: [f64; 2]| {
        (0..g.dim())
            .map(|a| v[a].to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    writeln!(
        out,
        "#grid,dim={},resolution={},lower={},upper={}",
        g.dim(),
        g.resolution(),
        pair(g.lower()),
        pair(g.upper())
    )?;
    for v in f.values() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let g = GridSpec::new_2d([-1.0, -2.0], [1.0, 2.0], 4).unwrap();
        let f = SampledFunction::from_fn(g, |x| x[0] * 0.1 + x[1]).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn reports_bad_lines() {
        let text = "#grid,dim=1,resolution=4,lower=0,upper=1\n1\n2\nx\n4\n";
        let err = read_csv(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
        assert!(read_csv("1\n2\n".as_bytes()).is_err());
        let short = "#grid,dim=1,resolution=4,lower=0,upper=1\n1\n";
        assert!(read_csv(short.as_bytes()).is_err());
    }
}
