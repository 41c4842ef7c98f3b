//! CSV outputs consumed by the plotting scripts.
//!
//! `residuals.csv` has columns `iteration,relative_residual`; each snapshot
//! file has `x,t` followed by one column per conserved variable. Floats are
//! written as `{:.16e}` so reruns are byte-identical.

use std::io::{Read, Write};

use crate::BenchError;

pub const RESIDUAL_HEADER: [&str; 2] = ["iteration", "relative_residual"];

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_residuals<W: Write>(out: W, history: &[f64]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESIDUAL_HEADER)?;
    for (k, r) in history.iter().enumerate() {
        w.write_record([k.to_string(), sci(*r)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_residuals<R: Read>(input: R) -> Result<Vec<(usize, f64)>, BenchError> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(RESIDUAL_HEADER) {
        return Err(BenchError::Parse("unexpected residuals header".into()));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(BenchError::Parse("residual rows have two fields".into()));
        }
        let k = parse_field::<usize>(&rec[0])?;
        if k != rows.len() {
            return Err(BenchError::Parse(format!("iteration {k} out of order")));
        }
        rows.push((k, parse_field::<f64>(&rec[1])?));
    }
    Ok(rows)
}

/// One time level of a solution, one row per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub vars: Vec<String>,
    pub t: f64,
    pub x: Vec<f64>,
    /// `values[s][i]` is variable `s` in cell `i`.
    pub values: Vec<Vec<f64>>,
}

pub fn write_snapshot<W: Write>(out: W, snap: &Snapshot) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_string(), "t".to_string()];
    header.extend(snap.vars.iter().cloned());
    w.write_record(&header)?;
    for (i, x) in snap.x.iter().enumerate() {
        let mut row = vec![sci(*x), sci(snap.t)];
        row.extend(snap.values.iter().map(|v| sci(v[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(input: R) -> Result<Snapshot, BenchError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.len() < 3 || &header[0] != "x" || &header[1] != "t" {
        return Err(BenchError::Parse("snapshot header must start with x,t and name a variable".into()));
    }
    let vars: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut snap = Snapshot { t: 0.0, x: Vec::new(), values: vec![Vec::new(); vars.len()], vars };
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(BenchError::Parse("ragged snapshot row".into()));
        }
        let t = parse_field::<f64>(&rec[1])?;
        if snap.x.is_empty() {
            snap.t = t;
        } else if t != snap.t {
            return Err(BenchError::Parse("snapshot mixes time levels".into()));
        }
        snap.x.push(parse_field(&rec[0])?);
        for (s, col) in snap.values.iter_mut().enumerate() {
            col.push(parse_field(&rec[s + 2])?);
        }
    }
    if snap.x.is_empty() {
        return Err(BenchError::Parse("empty snapshot".into()));
    }
    Ok(snap)
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T, BenchError> {
    s.trim().parse().map_err(|_| BenchError::Parse(format!("bad field {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_round_trip() {
        let h = [1.0, 0.25, 3.0e-11];
        let mut buf = Vec::new();
        write_residuals(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iteration,relative_residual\n0,1.0000000000000000e0\n"));
        let back = read_residuals(&buf[..]).unwrap();
        assert_eq!(back.iter().map(|r| r.1).collect::<Vec<_>>(), h);
        assert!(read_residuals(&b"iteration,relative_residual\n1,0.5\n"[..]).is_err());
        assert!(read_residuals(&b"it,res\n"[..]).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let snap = Snapshot {
            vars: vec!["h".into(), "hu".into()],
            t: 0.1 + 0.2,
            x: vec![0.125, 0.375],
            values: vec![vec![1.0, 1.0 / 3.0], vec![-0.0, 2e-300]],
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &snap).unwrap();
        assert_eq!(read_snapshot(&buf[..]).unwrap(), snap);
        assert!(read_snapshot(&b"x,t,h\n0,0,1\n1,1,1\n"[..]).is_err());
        assert!(read_snapshot(&b"x,t\n0,0\n"[..]).is_err());
    }
}
