//! Reading and writing the on-disk formats with path-qualified errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use grrhdr::calib::SparseSystemMatrix;
use grrhdr::io::{self, MeasurementFiles, MeasurementSidecar};
use grrhdr::{Measurement, RadianceImage};

use crate::error::{CliError, CliResult};

/// `prefix` with `suffix` appended to its last component.
pub fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    io::write_atomic(path, bytes).map_err(|e| CliError::from(e).context(path.display()))
}

fn decoded<T>(path: &Path, r: grrhdr::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::from(e).context(path.display()))
}

pub fn read_pfm(path: &Path) -> CliResult<RadianceImage> {
    decoded(path, io::decode_pfm(&read(path)?))
}

pub fn write_pfm(path: &Path, img: &RadianceImage) -> CliResult<()> {
    write(path, &io::encode_pfm(img))
}

pub fn read_matrix(path: &Path) -> CliResult<SparseSystemMatrix> {
    decoded(path, io::decode_matrix(&read(path)?))
}

/// The three files of a measurement stored under `prefix`.
pub fn measurement_paths(prefix: &Path) -> [PathBuf; 3] {
    [suffixed(prefix, ".pgm"), suffixed(prefix, ".mask.pbm"), suffixed(prefix, ".json")]
}

/// Accepts either the prefix or one of its files.
pub fn measurement_prefix(path: &Path) -> PathBuf {
    let s = path.to_string_lossy();
    for ext in [".mask.pbm", ".pgm", ".json"] {
        if let Some(stem) = s.strip_suffix(ext) {
            return PathBuf::from(stem);
        }
    }
    path.to_path_buf()
}

pub fn read_measurement(prefix: &Path) -> CliResult<(Measurement, MeasurementSidecar)> {
    let [pgm, mask, sidecar] = measurement_paths(prefix);
    let files = MeasurementFiles { pgm: read(&pgm)?, mask: read(&mask)?, sidecar: read(&sidecar)? };
    decoded(prefix, io::decode_measurement(&files))
}

pub fn write_measurement(prefix: &Path, m: &Measurement, sidecar: &MeasurementSidecar) -> CliResult<Vec<PathBuf>> {
    let files = io::encode_measurement(m, sidecar);
    let paths = measurement_paths(prefix);
    write(&paths[0], &files.pgm)?;
    write(&paths[1], &files.mask)?;
    write(&paths[2], &files.sidecar)?;
    Ok(paths.to_vec())
}

/// Makes `path` absolute against the working directory.
pub fn absolutize(path: &mut PathBuf) -> CliResult<()> {
    *path = std::path::absolute(&*path).map_err(|e| CliError::io(path, e))?;
    Ok(())
}
