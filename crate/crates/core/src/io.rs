//! File formats.
//!
//! * CSV: header row, comma separated, floats with 17 significant digits.
//! * Radial CSV: one column `r_over_sqrt_n` (other columns ignored).
//! * Deviation CSV: `n,u,p_hat,stderr`, optionally `samples`.
//! * Binary batch: 16-byte header `b"TSB1"`, n as u32 LE, N as u64 LE, then
//!   N·n little-endian f64 in row-major order.

use std::io::{Read, Write};

use crate::concentration::{DeviationCurve, DeviationPoint};
use crate::samplers::SampleBatch;
use crate::{Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"TSB1";
pub const RADIAL_COLUMN: &str = "r_over_sqrt_n";

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for r in rows {
        out.write_record(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line, msg: format!("{other:?}") },
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Parse { line: 1, msg: format!("missing column `{name}`") })
}

fn parse_field(rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let line = rec.position().map_or(0, |p| p.line() as usize);
    let s = rec.get(i).ok_or_else(|| Error::Parse { line, msg: format!("missing `{name}`") })?;
    s.trim()
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("`{name}` = {s:?} is not a number") })
}

/// Radial values ‖X‖/√n from a CSV with an `r_over_sqrt_n` column.
pub fn read_radial_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(r);
    let col = column_index(rdr.headers().map_err(csv_err)?, RADIAL_COLUMN)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        out.push(parse_field(&rec, col, RADIAL_COLUMN)?);
    }
    Ok(out)
}

pub fn write_radial_csv<W: Write>(w: W, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<String>> = values.iter().map(|&v| vec![fmt_f64(v)]).collect();
    write_csv(w, &[RADIAL_COLUMN], &rows)
}

pub fn write_deviation_csv<W: Write>(w: W, curves: &[DeviationCurve]) -> Result<()> {
    let mut rows = Vec::new();
    for c in curves {
        for p in &c.points {
            rows.push(vec![
                c.n.to_string(),
                fmt_f64(p.u),
                fmt_f64(p.p_hat),
                fmt_f64(p.stderr),
                c.samples.map_or(String::new(), |s| s.to_string()),
            ]);
        }
    }
    write_csv(w, &["n", "u", "p_hat", "stderr", "samples"], &rows)
}

/// Deviation curves grouped by `n`, in order of first appearance.
pub fn read_deviation_csv<R: Read>(r: R) -> Result<Vec<DeviationCurve>> {
    let mut rdr = csv::Reader::from_reader(r);
    let h = rdr.headers().map_err(csv_err)?.clone();
    let (ci, cu, cp) = (column_index(&h, "n")?, column_index(&h, "u")?, column_index(&h, "p_hat")?);
    let cs = column_index(&h, "stderr").ok();
    let cn = column_index(&h, "samples").ok();
    let mut curves: Vec<DeviationCurve> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let n: usize = rec
            .get(ci)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse { line, msg: "`n` is not an integer".into() })?;
        let samples = match cn.and_then(|i| rec.get(i)).map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(s.parse().map_err(|_| Error::Parse { line, msg: "bad `samples`".into() })?),
        };
        let point = DeviationPoint {
            u: parse_field(&rec, cu, "u")?,
            p_hat: parse_field(&rec, cp, "p_hat")?,
            stderr: match cs {
                Some(i) => parse_field(&rec, i, "stderr")?,
                None => 0.0,
            },
        };
        match curves.iter_mut().find(|c| c.n == n) {
            Some(c) => c.points.push(point),
            None => curves.push(DeviationCurve { n, samples, points: vec![point] }),
        }
    }
    Ok(curves)
}

pub fn write_batch_csv<W: Write>(w: W, batch: &SampleBatch) -> Result<()> {
    let header: Vec<String> = (1..=batch.spec.n).map(|j| format!("x{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = batch.iter_rows().map(|r| r.iter().map(|&v| fmt_f64(v)).collect()).collect();
    write_csv(w, &header, &rows)
}

pub fn write_batch_binary<W: Write>(mut w: W, batch: &SampleBatch) -> Result<()> {
    let n = u32::try_from(batch.spec.n).map_err(|_| crate::invalid("n does not fit in u32"))?;
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&(batch.rows as u64).to_le_bytes())?;
    for v in &batch.points {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// (n, N, row-major values)
pub fn read_batch_binary<R: Read>(mut r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if head[..4] != BINARY_MAGIC {
        return Err(Error::Parse { line: 0, msg: "bad magic".into() });
    }
    let n = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes")) as usize;
    let rows = u64::from_le_bytes(head[8..16].try_into().expect("8 bytes")) as usize;
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() != n * rows * 8 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("payload has {} bytes, header promises {}", buf.len(), n * rows * 8),
        });
    }
    let values = buf.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
    Ok((n, rows, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::sample_sphere;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn binary_round_trip() {
        let b = sample_sphere(5, 33, 1).unwrap();
        let mut buf = Vec::new();
        write_batch_binary(&mut buf, &b).unwrap();
        assert_eq!(buf.len(), 16 + 33 * 5 * 8);
        let (n, rows, v) = read_batch_binary(buf.as_slice()).unwrap();
        assert_eq!((n, rows), (5, 33));
        assert_eq!(v, b.points);
    }

    #[test]
    fn radial_csv_round_trip_and_errors() {
        let mut buf = Vec::new();
        write_radial_csv(&mut buf, &[0.5, 1.25]).unwrap();
        assert_eq!(read_radial_csv(buf.as_slice()).unwrap(), vec![0.5, 1.25]);
        let bad = "r_over_sqrt_n\n1.0\nabc\n";
        match read_radial_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(read_radial_csv("radius\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn deviation_csv_groups_by_n() {
        let csv = "n,u,p_hat,stderr,samples\n8,0.1,0.5,0.01,100\n16,0.1,0.4,0.01,100\n8,0.2,0.3,0.01,100\n";
        let c = read_deviation_csv(csv.as_bytes()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].points.len(), 2);
        assert_eq!(c[1].samples, Some(100));
    }
}
