//! Binary sparse matrix file, little-endian throughout:
//!
//! ```text
//! magic "SSMX" | version u32 | n_sensor u32 | n_scene u32 | entry_count u64 | invalid_count u32
//! entry_count x (sensor u32, scene u32, flux f64)
//! invalid_count x sensor u32 (ascending)
//! ```

use crate::calib::{Entry, SparseSystemMatrix};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SSMX";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 28;
const ENTRY_LEN: usize = 16;

pub fn encode_matrix(m: &SparseSystemMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + m.entries().len() * ENTRY_LEN + m.invalid_pixels().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m.n_sensor() as u32).to_le_bytes());
    out.extend_from_slice(&(m.n_scene() as u32).to_le_bytes());
    out.extend_from_slice(&(m.entries().len() as u64).to_le_bytes());
    out.extend_from_slice(&(m.invalid_pixels().len() as u32).to_le_bytes());
    for e in m.entries() {
        out.extend_from_slice(&e.sensor.to_le_bytes());
        out.extend_from_slice(&e.scene.to_le_bytes());
        out.extend_from_slice(&e.flux.to_le_bytes());
    }
    for p in m.invalid_pixels() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

pub fn decode_matrix(bytes: &[u8]) -> Result<SparseSystemMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format("matrix file shorter than its header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::format("bad matrix magic"));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::format(format!("unsupported matrix version {version}")));
    }
    let n_sensor = u32_at(bytes, 8) as usize;
    let n_scene = u32_at(bytes, 12) as usize;
    let entry_count = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let invalid_count = u32_at(bytes, 24) as u64;
    let expected = entry_count
        .checked_mul(ENTRY_LEN as u64)
        .and_then(|v| v.checked_add(invalid_count * 4))
        .and_then(|v| v.checked_add(HEADER_LEN as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(Error::format(format!(
            "matrix file is {} bytes, header implies {entry_count} entries and {invalid_count} invalid pixels",
            bytes.len()
        )));
    }
    let entry_end = HEADER_LEN + entry_count as usize * ENTRY_LEN;
    let entries = bytes[HEADER_LEN..entry_end]
        .chunks_exact(ENTRY_LEN)
        .map(|c| Entry {
            sensor: u32_at(c, 0),
            scene: u32_at(c, 4),
            flux: f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
        })
        .collect();
    let invalid: Vec<u32> = bytes[entry_end..].chunks_exact(4).map(|c| u32_at(c, 0)).collect();
    if invalid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::format("invalid-pixel list not strictly ascending"));
    }
    SparseSystemMatrix::new(n_sensor, n_scene, entries, invalid)
        .map_err(|e| Error::format(format!("matrix content: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseSystemMatrix {
        let e = |sensor, scene, flux| Entry { sensor, scene, flux };
        SparseSystemMatrix::new(4, 3, vec![e(0, 0, 1.5), e(2, 1, 0.25), e(3, 1, 2.0), e(1, 2, 7.0)], []).unwrap()
    }

    #[test]
    fn roundtrip() {
        let m = sample();
        let bytes = encode_matrix(&m);
        assert_eq!(bytes.len(), 28 + 4 * 16);
        assert_eq!(decode_matrix(&bytes).unwrap(), m);
        let with_invalid =
            SparseSystemMatrix::new(4, 1, vec![Entry { sensor: 1, scene: 0, flux: 1.0 }], [0, 3]).unwrap();
        assert_eq!(decode_matrix(&encode_matrix(&with_invalid)).unwrap(), with_invalid);
    }

    #[test]
    fn corruption_detected() {
        let bytes = encode_matrix(&sample());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_matrix(&bad).is_err());
        assert!(decode_matrix(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_matrix(&extra).is_err());
        let mut zero_flux = bytes;
        zero_flux[28 + 8..28 + 16].copy_from_slice(&0.0f64.to_le_bytes());
        assert!(decode_matrix(&zero_flux).is_err());
    }
}
