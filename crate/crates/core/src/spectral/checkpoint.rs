//! Binary checkpoint format.
//!
//! A checkpoint file is a sequence of records. Each record is, little-endian:
//!
//! ```text
//! magic      5 bytes   "HMHD1"
//! n          u32       points per dimension
//! M          f64       box scale
//! ncomp      u32       number of components
//! name_len   u32
//! name       name_len bytes of UTF-8
//! t          f64       time
//! data       ncomp * n³ * (f64 re, f64 im), component-major, row-major k order
//! ```
//!
//! Coefficients are stored as pairs of f64 so that a save/load round trip is
//! bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use super::{Grid, SpectralField};
use crate::{Error, Result};

pub const MAGIC: &[u8; 5] = b"HMHD1";

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub name: String,
    pub t: f64,
    pub field: SpectralField,
}

pub fn write_record(w: &mut impl Write, name: &str, t: f64, field: &SpectralField) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.box_scale().to_le_bytes())?;
    w.write_all(&(field.n_components() as u32).to_le_bytes())?;
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name.as_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.points());
    for c in field.components() {
        buf.clear();
        for v in c {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Checkpoint(format!("truncated record: {e}")))?;
    Ok(b)
}

/// Reads one record, or `None` at a clean end of file.
pub fn read_record(r: &mut impl Read) -> Result<Option<Record>> {
    let mut magic = [0u8; 5];
    match r.read(&mut magic[..1]) {
        Ok(0) => return Ok(None),
        Ok(_) => {}
        Err(e) if e.kind() == ErrorKind::Interrupted => return read_record(r),
        Err(e) => return Err(e.into()),
    }
    r.read_exact(&mut magic[1..])
        .map_err(|e| Error::Checkpoint(format!("truncated magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
    }
    let n = u32::from_le_bytes(read_exact(r)?) as usize;
    let m = f64::from_le_bytes(read_exact(r)?);
    let grid = Grid::new(n, m).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let ncomp = u32::from_le_bytes(read_exact(r)?) as usize;
    if ncomp == 0 || ncomp > 16 {
        return Err(Error::Checkpoint(format!("implausible component count {ncomp}")));
    }
    let name_len = u32::from_le_bytes(read_exact(r)?) as usize;
    if name_len > 4096 {
        return Err(Error::Checkpoint(format!("implausible name length {name_len}")));
    }
    let mut name = vec![0u8; name_len];
    r.read_exact(&mut name)
        .map_err(|e| Error::Checkpoint(format!("truncated name: {e}")))?;
    let name = String::from_utf8(name).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let t = f64::from_le_bytes(read_exact(r)?);
    let mut buf = vec![0u8; 16 * grid.points()];
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        r.read_exact(&mut buf)
            .map_err(|e| Error::Checkpoint(format!("truncated data: {e}")))?;
        comps.push(
            buf.chunks_exact(16)
                .map(|b| {
                    let re = f64::from_le_bytes(b[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(b[8..].try_into().unwrap());
                    Complex64::new(re, im)
                })
                .collect(),
        );
    }
    Ok(Some(Record {
        name,
        t,
        field: SpectralField::from_components(grid, comps)?,
    }))
}

pub fn save(path: &Path, t: f64, fields: &[(&str, &SpectralField)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (name, f) in fields {
        write_record(&mut w, name, t, f)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Vec<Record>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    while let Some(rec) = read_record(&mut r)? {
        out.push(rec);
    }
    if out.is_empty() {
        return Err(Error::Checkpoint(format!("{} holds no records", path.display())));
    }
    Ok(out)
}
