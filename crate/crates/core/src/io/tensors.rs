//! Named tensor records: `u16` name length, name bytes, `u8` rank, `u32`
//! dims, then `f32` little-endian data.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

pub fn encode_tensors(tensors: &[Tensor]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for t in tensors {
        let count: usize = t.dims.iter().product();
        if count != t.data.len() {
            return Err(Error::Dimension(format!(
                "tensor {} has {} values for dims {:?}",
                t.name,
                t.data.len(),
                t.dims
            )));
        }
        let name = t.name.as_bytes();
        out.extend_from_slice(
            &u16::try_from(name.len())
                .map_err(|_| Error::Format("tensor name too long".into()))?
                .to_le_bytes(),
        );
        out.extend_from_slice(name);
        out.push(u8::try_from(t.dims.len()).map_err(|_| Error::Format("tensor rank too large".into()))?);
        for d in &t.dims {
            out.extend_from_slice(&u32::try_from(*d).map_err(|_| Error::Format("tensor dim too large".into()))?.to_le_bytes());
        }
        for v in &t.data {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_tensors(bytes: &[u8]) -> Result<Vec<Tensor>> {
    let mut pos = 0;
    let mut take = |len: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + len).ok_or_else(|| Error::Format("truncated tensor file".into()))?;
        pos += len;
        Ok(s)
    };
    let mut out = Vec::new();
    loop {
        let head = match take(2) {
            Ok(h) => h,
            Err(_) => break,
        };
        let name_len = u16::from_le_bytes([head[0], head[1]]) as usize;
        let name = String::from_utf8(take(name_len)?.to_vec()).map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
        let rank = take(1)?[0] as usize;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize);
        }
        let count: usize = dims.iter().product();
        let data = take(count * 4)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
            .collect();
        out.push(Tensor { name, dims, data });
    }
    if pos != bytes.len() {
        return Err(Error::Format("trailing bytes after the last tensor record".into()));
    }
    Ok(out)
}
