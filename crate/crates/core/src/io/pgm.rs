//! Binary PGM (`P5`) images, 8- or 16-bit.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::holography::Image;

/// Writes `img` as 16-bit PGM after mapping `[lo, hi]` linearly onto `0..=65535`.
pub fn encode_pgm16(img: &Image, lo: f64, hi: f64) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width, img.height).into_bytes();
    let span = if hi > lo { hi - lo } else { 1.0 };
    for v in &img.data {
        let q = ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

/// Raw counts as stored in the file.
pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if tokens[0] != "P5" {
        return Err(Error::Format(format!("unsupported image magic '{}'", tokens[0])));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM header value '{s}'")));
    let (width, height, maxval) = (parse(&tokens[1])?, parse(&tokens[2])?, parse(&tokens[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("PGM maxval {maxval} out of range")));
    }
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let body = bytes.get(pos..).unwrap_or(&[]);
    if body.len() != width * height * bytes_per {
        return Err(Error::Format(format!(
            "PGM body has {} bytes, expected {}",
            body.len(),
            width * height * bytes_per
        )));
    }
    let data = if bytes_per == 2 {
        body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64).collect()
    } else {
        body.iter().map(|b| *b as f64).collect()
    };
    Image::new(width, height, data)
}

pub fn write_pgm16(path: impl AsRef<Path>, img: &Image, lo: f64, hi: f64) -> Result<()> {
    fs::write(path, encode_pgm16(img, lo, hi))?;
    Ok(())
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    decode_pgm(&fs::read(path)?)
}
