//! Binary PGM (`P5`) gray frames and PBM (`P4`) bit masks.

use super::{checked_size, Header};
use crate::error::{Error, Result};

/// Always written with maxval 65535, two big-endian bytes per sample.
pub fn encode_pgm(width: usize, height: usize, values: &[u16]) -> Vec<u8> {
    debug_assert_eq!(values.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for v in values {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

/// Returns `(width, height, maxval, samples)`. Accepts any maxval up to 65535.
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, u16, Vec<u16>)> {
    let mut h = Header::new(bytes);
    if h.magic()? != b"P5" {
        return Err(Error::format("not a binary PGM file"));
    }
    let width: usize = h.number("width")?;
    let height: usize = h.number("height")?;
    let maxval: u32 = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format("PGM dimensions must be nonzero"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(format!("PGM maxval {maxval} out of range")));
    }
    let body = h.end()?;
    let count = checked_size(&[width, height])?;
    let bytes_per = if maxval < 256 { 1 } else { 2 };
    let expected = checked_size(&[count, bytes_per])?;
    if body.len() != expected {
        return Err(Error::format(format!("PGM data is {} bytes, expected {expected}", body.len())));
    }
    let values: Vec<u16> = if bytes_per == 1 {
        body.iter().map(|&b| u16::from(b)).collect()
    } else {
        body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    if let Some(v) = values.iter().find(|&&v| u32::from(v) > maxval) {
        return Err(Error::format(format!("PGM sample {v} exceeds maxval {maxval}")));
    }
    Ok((width, height, maxval as u16, values))
}

/// Bits set to 1 are written black.
pub fn encode_pbm(width: usize, height: usize, bits: &[bool]) -> Vec<u8> {
    debug_assert_eq!(bits.len(), width * height);
    let mut out = format!("P4\n{width} {height}\n").into_bytes();
    let stride = width.div_ceil(8);
    for row in bits.chunks(width) {
        let mut packed = vec![0u8; stride];
        for (c, &b) in row.iter().enumerate() {
            if b {
                packed[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    out
}

/// Returns `(width, height, bits)`; padding bits are ignored.
pub fn decode_pbm(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>)> {
    let mut h = Header::new(bytes);
    if h.magic()? != b"P4" {
        return Err(Error::format("not a binary PBM file"));
    }
    let width: usize = h.number("width")?;
    let height: usize = h.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::format("PBM dimensions must be nonzero"));
    }
    let body = h.end()?;
    let stride = width.div_ceil(8);
    let expected = checked_size(&[stride, height])?;
    if body.len() != expected {
        return Err(Error::format(format!("PBM data is {} bytes, expected {expected}", body.len())));
    }
    let mut bits = Vec::with_capacity(width * height);
    for row in body.chunks_exact(stride) {
        bits.extend((0..width).map(|c| row[c / 8] & (0x80 >> (c % 8)) != 0));
    }
    Ok((width, height, bits))
}
