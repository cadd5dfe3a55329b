//! GridField file formats.
//!
//! CSV: header `t,x,u` (1-d) or `t,x,y,u` (2-d), one row per cell and stored
//! level, levels in increasing time, cells x-fastest. Floats are written in
//! shortest round-trip form, so reading a CSV back reproduces the field bitwise.
//!
//! Slab: a sequence of records, one per stored level, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic b"GFS1"
//! 4       4     dim     u32
//! 8       8     nx      u64   cells per axis
//! 16      8     dx      f64
//! 24      8     origin  f64   lower corner on every axis
//! 32      8     time    f64
//! 40      8·nx^dim    cell values f64, x-fastest
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::field::{Grid, GridField};
use crate::{Error, Result};

pub const SLAB_MAGIC: &[u8; 4] = b"GFS1";
const SLAB_HEADER_LEN: usize = 40;

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub fn write_csv(field: &GridField, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    write_csv_to(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_csv_to<W: Write>(field: &GridField, w: &mut csv::Writer<W>) -> Result<()> {
    if field.dim() == 1 {
        w.write_record(["t", "x", "u"])?;
    } else {
        w.write_record(["t", "x", "y", "u"])?;
    }
    for (slab, &t) in field.data.iter().zip(&field.times) {
        for (i, &u) in slab.iter().enumerate() {
            let c = field.grid.center(i);
            let mut row = vec![fmt(t), fmt(c[0])];
            if field.dim() == 2 {
                row.push(fmt(c[1]));
            }
            row.push(fmt(u));
            w.write_record(&row)?;
        }
    }
    Ok(())
}

/// Display for f64 is the shortest string that round-trips.
fn fmt(v: f64) -> String {
    format!("{v}")
}

pub fn read_csv(path: &Path) -> Result<GridField> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = r.headers()?.clone();
    let dim = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["t", "x", "u"] => 1,
        ["t", "x", "y", "u"] => 2,
        other => return Err(format_err(path, format!("unexpected header {other:?}"))),
    };
    let mut times: Vec<f64> = Vec::new();
    let mut data: Vec<Vec<f64>> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| -> Result<f64> {
            rec.get(j)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| format_err(path, format!("row {}: bad field {j}", line + 2)))
        };
        let t = parse(0)?;
        let u = parse(dim + 1)?;
        if times.last() != Some(&t) {
            times.push(t);
            data.push(Vec::new());
        }
        if times.len() == 1 && (dim == 1 || data[0].len() < 2) {
            xs.push(parse(1)?);
        }
        data.last_mut().expect("level pushed").push(u);
    }
    let n = data
        .first()
        .map(|s| s.len())
        .ok_or_else(|| format_err(path, "no rows"))?;
    let nx = if dim == 1 {
        n
    } else {
        let m = (n as f64).sqrt().round() as usize;
        if m * m != n {
            return Err(format_err(path, format!("{n} cells is not a square grid")));
        }
        m
    };
    if xs.len() < 2 {
        return Err(format_err(path, "need at least two cells"));
    }
    let dx = xs[1] - xs[0];
    let lower = xs[0] - 0.5 * dx;
    let grid = Grid {
        dim,
        lower,
        upper: lower + nx as f64 * dx,
        nx,
    };
    GridField::new(grid, times, data).map_err(|e| format_err(path, e.to_string()))
}

pub fn write_slabs(field: &GridField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_slabs_to(field, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_slabs_to<W: Write>(field: &GridField, w: &mut W) -> Result<()> {
    let g = &field.grid;
    for (slab, &t) in field.data.iter().zip(&field.times) {
        w.write_all(SLAB_MAGIC)?;
        w.write_all(&(g.dim as u32).to_le_bytes())?;
        w.write_all(&(g.nx as u64).to_le_bytes())?;
        w.write_all(&g.dx().to_le_bytes())?;
        w.write_all(&g.lower.to_le_bytes())?;
        w.write_all(&t.to_le_bytes())?;
        for v in slab {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_slabs(path: &Path) -> Result<GridField> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    parse_slabs(&bytes).map_err(|m| format_err(path, m))
}

fn parse_slabs(bytes: &[u8]) -> std::result::Result<GridField, String> {
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let mut pos = 0;
    let mut grid: Option<Grid> = None;
    let mut times = Vec::new();
    let mut data = Vec::new();
    while pos < bytes.len() {
        if bytes.len() - pos < SLAB_HEADER_LEN {
            return Err(format!("truncated header at byte {pos}"));
        }
        if &bytes[pos..pos + 4] != SLAB_MAGIC {
            return Err(format!("bad magic at byte {pos}"));
        }
        let dim = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().expect("4 bytes")) as usize;
        let nx = u64::from_le_bytes(bytes[pos + 8..pos + 16].try_into().expect("8 bytes")) as usize;
        let dx = f64_at(pos + 16);
        let origin = f64_at(pos + 24);
        let t = f64_at(pos + 32);
        if !(1..=2).contains(&dim) || nx == 0 || !(dx > 0.0) {
            return Err(format!("invalid header at byte {pos}"));
        }
        let g = Grid {
            dim,
            lower: origin,
            upper: origin + nx as f64 * dx,
            nx,
        };
        match grid {
            None => grid = Some(g),
            Some(prev) if prev.dim != dim || prev.nx != nx || prev.lower != origin => {
                return Err(format!("slab at byte {pos} has a different grid"));
            }
            _ => {}
        }
        let n = g.n_cells();
        let start = pos + SLAB_HEADER_LEN;
        let end = start + 8 * n;
        if end > bytes.len() {
            return Err(format!("truncated slab at byte {pos}"));
        }
        data.push((0..n).map(|i| f64_at(start + 8 * i)).collect::<Vec<f64>>());
        times.push(t);
        pos = end;
    }
    let grid = grid.ok_or("empty slab file")?;
    GridField::new(grid, times, data).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dim: usize) -> GridField {
        let g = Grid::new(dim, -1.0, 1.0, 5).unwrap();
        let n = g.n_cells();
        let data = (0..3)
            .map(|l| (0..n).map(|i| (i as f64 * 0.37 + l as f64).sin() / 3.0).collect())
            .collect();
        GridField::new(g, vec![0.0, 0.1, 0.30000000000000004], data).unwrap()
    }

    #[test]
    fn slab_layout() {
        let f = sample(1);
        let mut buf = Vec::new();
        write_slabs_to(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 3 * (40 + 8 * 5));
        assert_eq!(&buf[0..4], b"GFS1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 5);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), -1.0);
    }

    #[test]
    fn round_trips_are_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let f = sample(dim);
            let p = dir.path().join(format!("f{dim}.bin"));
            write_slabs(&f, &p).unwrap();
            assert_eq!(read_slabs(&p).unwrap(), f);
            let c = dir.path().join(format!("f{dim}.csv"));
            write_csv(&f, &c).unwrap();
            let back = read_csv(&c).unwrap();
            assert_eq!(back.data, f.data);
            assert_eq!(back.times, f.times);
            assert_eq!(back.grid.nx, 5);
            assert!((back.grid.lower + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let f = sample(1);
        let mut buf = Vec::new();
        write_slabs_to(&f, &mut buf).unwrap();
        assert!(parse_slabs(&buf[..buf.len() - 3]).is_err());
        buf[0] = b'X';
        assert!(parse_slabs(&buf).is_err());
    }
}
