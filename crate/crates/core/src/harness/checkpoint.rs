//! Binary field checkpoints.
//!
//! Layout (little endian): magic `NLSF`, `u32` version, `u32` dimension,
//! one `u64` size and one `f64` spacing per axis, `f64` λ, α, ω, t, then the
//! values as interleaved real/imaginary `f64` pairs in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{CartesianGrid, WaveField};
use crate::params::ModelParams;

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;

pub fn write_checkpoint(field: &WaveField, mut out: impl Write) -> Result<()> {
    let grid = field.grid;
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for _ in 0..grid.dim() {
        out.write_all(&(grid.points_per_axis() as u64).to_le_bytes())?;
    }
    for _ in 0..grid.dim() {
        out.write_all(&grid.dx().to_le_bytes())?;
    }
    let p = field.params;
    for x in [p.lambda, p.alpha, p.omega, field.time] {
        out.write_all(&x.to_le_bytes())?;
    }
    for v in &field.values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_checkpoint(field: &WaveField, path: &Path) -> Result<()> {
    write_checkpoint(field, BufWriter::new(File::create(path)?))
}

pub fn load_checkpoint(path: &Path) -> Result<WaveField> {
    read_checkpoint(BufReader::new(File::open(path)?))
}

/// Byte reader that knows its offset, for error reports.
struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn bytes<const K: usize>(&mut self) -> Result<[u8; K]> {
        let mut buf = [0u8; K];
        let mut got = 0;
        while got < K {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => {
                    return Err(Error::Format {
                        offset: self.offset + got as u64,
                        reason: format!("file ends inside a {K}-byte field"),
                    })
                }
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += K as u64;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn fail(&self, at: u64, reason: impl Into<String>) -> Error {
        Error::Format {
            offset: at,
            reason: reason.into(),
        }
    }
}

pub fn read_checkpoint(input: impl Read) -> Result<WaveField> {
    let mut c = Cursor { inner: input, offset: 0 };
    if &c.bytes::<4>()? != MAGIC {
        return Err(c.fail(0, "bad magic, expected NLSF"));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: VERSION,
        });
    }
    let at = c.offset;
    let dim = c.u32()? as usize;
    if !(1..=2).contains(&dim) {
        return Err(c.fail(at, format!("dimension {dim} is not 1 or 2")));
    }
    let mut sizes = Vec::with_capacity(dim);
    for _ in 0..dim {
        let at = c.offset;
        let n = c.u64()?;
        if !(n >= 8 && n.is_power_of_two() && n <= 1 << 40) {
            return Err(c.fail(at, format!("axis size {n} is not a power of two ≥ 8")));
        }
        sizes.push(n as usize);
    }
    if sizes.iter().any(|&n| n != sizes[0]) {
        return Err(c.fail(at + 4, format!("unequal axis sizes {sizes:?}")));
    }
    let mut spacing = Vec::with_capacity(dim);
    for _ in 0..dim {
        let at = c.offset;
        let dx = c.f64()?;
        if !(dx.is_finite() && dx > 0.0) {
            return Err(c.fail(at, format!("spacing {dx} must be positive")));
        }
        spacing.push((at, dx));
    }
    if spacing.iter().any(|&(_, dx)| dx != spacing[0].1) {
        return Err(c.fail(spacing[1].0, "unequal axis spacings"));
    }
    let at = c.offset;
    let (lambda, alpha, omega, time) = (c.f64()?, c.f64()?, c.f64()?, c.f64()?);
    let params = ModelParams {
        dim,
        alpha,
        lambda,
        omega,
    };
    params
        .validate_dynamics()
        .map_err(|e| c.fail(at, format!("invalid parameters: {e}")))?;
    if !time.is_finite() {
        return Err(c.fail(at + 24, "non-finite time"));
    }
    let n = sizes[0];
    // n and dx are exact binary scalings of the half-width, so this round-trips bitwise
    let grid = CartesianGrid::new(dim, spacing[0].1 * n as f64 / 2.0, n).map_err(|e| c.fail(at - 8, e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let at = c.offset;
        let v = Complex64::new(c.f64()?, c.f64()?);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(c.fail(at, "non-finite field value"));
        }
        values.push(v);
    }
    let mut probe = [0u8; 1];
    if c.inner.read(&mut probe)? != 0 {
        return Err(c.fail(c.offset, "trailing bytes after the field"));
    }
    WaveField::new(grid, values, time, params)
}
