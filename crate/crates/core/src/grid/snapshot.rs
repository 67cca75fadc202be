//! `NSCV` binary velocity snapshots.
//!
//! Layout, little-endian: magic `NSCV`, version `u32 = 1`, `N: u32`,
//! `L: f64`, `t: f64`, `nu: f64`, then `3·N³` `f64` values (component 1,
//! then 2, then 3, each row-major with the third axis fastest).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Grid3, ScalarField, VectorField3};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NSCV";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 4 + 4 + 4 + 8 + 8 + 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: VectorField3<f64>,
    pub time: f64,
    pub viscosity: f64,
}

pub fn write_snapshot(path: &Path, field: &VectorField3<f64>, time: f64, viscosity: f64) -> Result<()> {
    let g = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.l().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    w.write_all(&viscosity.to_le_bytes())?;
    for c in field.components() {
        for v in c.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn take<const K: usize>(&mut self, what: &str) -> Result<[u8; K]> {
        let mut buf = [0u8; K];
        let mut got = 0;
        while got < K {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => {
                    return Err(Error::Format {
                        offset: self.offset + got as u64,
                        message: format!("unexpected end of file reading {what}"),
                    })
                }
                Ok(m) => got += m,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += K as u64;
        Ok(buf)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take::<8>(what)?))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take::<4>(what)?))
    }
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path)?;
    let mut c = Cursor { inner: BufReader::new(file), offset: 0 };
    let magic = c.take::<4>("magic")?;
    if &magic != MAGIC {
        return Err(Error::Format { offset: 0, message: format!("bad magic {:?}, expected \"NSCV\"", magic) });
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {version}, expected {VERSION}") });
    }
    let n = c.u32("N")? as usize;
    let l = c.f64("L")?;
    let grid = Grid3::new(n, l).map_err(|e| Error::Format { offset: 8, message: e.to_string() })?;
    let time = c.f64("t")?;
    let viscosity = c.f64("nu")?;
    debug_assert_eq!(c.offset, HEADER_LEN);
    let mut comps = Vec::with_capacity(3);
    for _ in 0..3 {
        let mut data = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let at = c.offset;
            let v = c.f64("field values")?;
            if !v.is_finite() {
                return Err(Error::Format { offset: at, message: format!("non-finite value {v}") });
            }
            data.push(v);
        }
        comps.push(ScalarField::from_vec(grid, data)?);
    }
    let mut extra = [0u8; 1];
    if c.inner.read(&mut extra)? != 0 {
        return Err(Error::Format { offset: c.offset, message: "trailing bytes after field data".into() });
    }
    let [a, b, d]: [ScalarField<f64>; 3] = comps.try_into().expect("three components");
    Ok(Snapshot { field: VectorField3::from_components([a, b, d]), time, viscosity })
}
