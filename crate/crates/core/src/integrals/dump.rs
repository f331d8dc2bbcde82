//! Binary tensor dump: magic, version, rank, dims, tag, gamma, then
//! row-major little-endian f64 data.

use std::io::{Read, Write};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"VQER12T\0";
const VERSION: u32 = 1;

/// Writes a tensor of arbitrary rank.
pub fn write_tensor<W: Write>(mut w: W, dims: &[usize], tag: &str, gamma: f64, data: &[f64]) -> Result<()> {
    if dims.iter().product::<usize>() != data.len() {
        return Err(Error::Shape(format!("dims {dims:?} do not match {} values", data.len())));
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    let mut tagbuf = [0u8; 16];
    let tb = tag.as_bytes();
    tagbuf[..tb.len().min(16)].copy_from_slice(&tb[..tb.len().min(16)]);
    w.write_all(&tagbuf)?;
    w.write_all(&gamma.to_le_bytes())?;
    for x in data {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Dumped tensor as read back.
#[derive(Debug, Clone, PartialEq)]
pub struct Dumped {
    pub dims: Vec<usize>,
    pub tag: String,
    pub gamma: f64,
    pub data: Vec<f64>,
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<Dumped> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Invalid("not a tensor dump".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != VERSION {
        return Err(Error::Invalid(format!("unsupported dump version {version}")));
    }
    r.read_exact(&mut b4)?;
    let rank = u32::from_le_bytes(b4) as usize;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        r.read_exact(&mut b8)?;
        dims.push(u64::from_le_bytes(b8) as usize);
    }
    let mut tagbuf = [0u8; 16];
    r.read_exact(&mut tagbuf)?;
    let tag = String::from_utf8_lossy(&tagbuf).trim_end_matches('\0').to_string();
    r.read_exact(&mut b8)?;
    let gamma = f64::from_le_bytes(b8);
    let n: usize = dims.iter().product();
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8)?;
        data.push(f64::from_le_bytes(b8));
    }
    Ok(Dumped { dims, tag, gamma, data })
}
