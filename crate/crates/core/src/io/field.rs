//! Binary complex-field files.
//!
//! Layout, little-endian: `b"OAMF"`, `u16` version, `u32` side `n`, `f64`
//! pitch, `f64` z, then `n*n` pairs of `f32` (re, im) in row-major order.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};

pub const FIELD_MAGIC: &[u8; 4] = b"OAMF";
pub const FIELD_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 8 + 8;

pub fn encode_field(field: &ComplexField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + field.samples.len() * 8);
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    out.extend_from_slice(&(field.grid.n as u32).to_le_bytes());
    out.extend_from_slice(&field.grid.pitch.to_le_bytes());
    out.extend_from_slice(&field.z.to_le_bytes());
    for e in &field.samples {
        out.extend_from_slice(&(e.re as f32).to_le_bytes());
        out.extend_from_slice(&(e.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<ComplexField> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != FIELD_MAGIC {
        return Err(Error::Format("not a field file (bad magic or truncated header)".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FIELD_VERSION {
        return Err(Error::Format(format!("unsupported field file version {version}")));
    }
    let n = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let pitch = f64::from_le_bytes(bytes[10..18].try_into().expect("8 bytes"));
    let z = f64::from_le_bytes(bytes[18..26].try_into().expect("8 bytes"));
    let grid = GridSpec::new(n, pitch).map_err(|e| Error::Format(e.to_string()))?;
    let expected = HEADER_LEN + n * n * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!("field file has {} bytes, header implies {expected}", bytes.len())));
    }
    let samples = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().expect("4 bytes"));
            let im = f32::from_le_bytes(c[4..].try_into().expect("4 bytes"));
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    if !z.is_finite() {
        return Err(Error::Format("non-finite z in field header".into()));
    }
    ComplexField::from_samples(grid, samples, z)
}

pub fn write_field(path: impl AsRef<Path>, field: &ComplexField) -> Result<()> {
    fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ComplexField> {
    decode_field(&fs::read(path)?)
}
