//! Portable float map: `PF` (RGB) or `Pf` (gray), width and height, a scale
//! whose sign gives the byte order, then 32-bit floats with the bottom row
//! first. Written little-endian with scale `-1.0`.

use super::{checked_size, Header};
use crate::error::{Error, Result};
use crate::image::RadianceImage;

pub fn encode_pfm(img: &RadianceImage) -> Vec<u8> {
    let magic = if img.channels() == 3 { "PF" } else { "Pf" };
    let mut out = format!("{magic}\n{} {}\n-1.0\n", img.width(), img.height()).into_bytes();
    let row_len = img.width() * img.channels();
    for row in img.data().chunks(row_len).rev() {
        for &v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode_pfm(bytes: &[u8]) -> Result<RadianceImage> {
    let mut h = Header::new(bytes);
    let channels = match h.magic()? {
        b"PF" => 3,
        b"Pf" => 1,
        m => return Err(Error::format(format!("not a PFM file (magic {:?})", String::from_utf8_lossy(m)))),
    };
    let width: usize = h.number("width")?;
    let height: usize = h.number("height")?;
    let scale: f64 = h.number("scale")?;
    if width == 0 || height == 0 {
        return Err(Error::format("PFM dimensions must be nonzero"));
    }
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::format(format!("bad PFM scale {scale}")));
    }
    let body = h.end()?;
    let count = checked_size(&[width, height, channels])?;
    let expected = count.checked_mul(4).ok_or_else(|| Error::format("PFM size overflow"))?;
    if body.len() != expected {
        return Err(Error::format(format!("PFM data is {} bytes, expected {expected}", body.len())));
    }
    let little = scale < 0.0;
    let row_len = width * channels;
    let mut data = vec![0.0; count];
    for (i, chunk) in body.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little { f32::from_le_bytes(raw) } else { f32::from_be_bytes(raw) };
        let (file_row, col) = (i / row_len, i % row_len);
        data[(height - 1 - file_row) * row_len + col] = f64::from(v);
    }
    RadianceImage::new(width, height, channels, data).map_err(|e| Error::format(format!("PFM content: {e}")))
}
