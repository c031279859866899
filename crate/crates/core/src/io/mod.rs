//! File formats: PFM radiance images, 16-bit PGM frames with a JSON sidecar
//! and PBM erasure mask, and the binary sparse matrix file.
//!
//! Decoders take byte slices and never trust header sizes before checking
//! them against the data length.

pub mod measurement;
pub mod pfm;
pub mod pnm;
pub mod ssm;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use measurement::{decode_measurement, encode_measurement, MeasurementFiles, MeasurementSidecar, OpticsInfo};
pub use pfm::{decode_pfm, encode_pfm};
pub use pnm::{decode_pbm, decode_pgm, encode_pbm, encode_pgm};
pub use ssm::{decode_matrix, encode_matrix};

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| Error::param(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Cursor over the ASCII header of a Netpbm-style file.
pub(crate) struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn magic(&mut self) -> Result<&'a [u8]> {
        if self.bytes.len() < 2 {
            return Err(Error::format("file too short for a magic number"));
        }
        self.pos = 2;
        Ok(&self.bytes[..2])
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    pub(crate) fn token(&mut self) -> Result<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format("truncated header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::format("non-ASCII header"))
    }

    pub(crate) fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.token()?;
        tok.parse().map_err(|_| Error::format(format!("bad {what} {tok:?}")))
    }

    /// Consumes the single whitespace byte that ends the header.
    pub(crate) fn end(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::format("header not terminated by whitespace")),
        }
    }
}

/// `a * b * c`, rejecting overflow.
pub(crate) fn checked_size(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| Error::format("image dimensions overflow"))
}
