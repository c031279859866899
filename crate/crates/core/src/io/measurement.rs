//! A measurement on disk: `<prefix>.pgm` with the DN values,
//! `<prefix>.mask.pbm` with erased pixels set, and `<prefix>.json` describing
//! how the frame was acquired.

use serde::{Deserialize, Serialize};

use super::pnm::{decode_pbm, decode_pgm, encode_pbm, encode_pgm};
use crate::error::{Error, Result};
use crate::sensor::Measurement;
use crate::shutter::ShutterProfile;

pub const SIDECAR_FORMAT: &str = "grrhdr-measurement";
pub const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OpticsInfo {
    Identity,
    Shuffle {
        seed: u64,
    },
    /// Optics described by a calibrated matrix file.
    Calibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorInfo {
    pub gain: f64,
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSidecar {
    pub format: String,
    pub version: u32,
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
    pub low_threshold: Option<u16>,
    /// Whether pixel order is sensor order (`false` after unshuffling).
    pub sensor_order: bool,
    pub shutter: Option<ShutterProfile>,
    pub optics: Option<OpticsInfo>,
    pub sensor: Option<SensorInfo>,
    /// Bayer phase of a color mosaic, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfa: Option<String>,
    pub saturation_rate: f64,
    pub underexposed_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_saturation: Option<f64>,
}

impl MeasurementSidecar {
    /// Geometry and rates of `m`, with no acquisition details.
    pub fn describe(m: &Measurement) -> Self {
        let stats = crate::simulate::saturation_rate(m);
        Self {
            format: SIDECAR_FORMAT.into(),
            version: SIDECAR_VERSION,
            width: m.width(),
            height: m.height(),
            bit_depth: m.bit_depth(),
            low_threshold: m.low_threshold(),
            sensor_order: true,
            shutter: None,
            optics: None,
            sensor: None,
            cfa: None,
            saturation_rate: stats.saturated,
            underexposed_rate: stats.underexposed,
            target_saturation: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let sidecar: Self =
            serde_json::from_slice(bytes).map_err(|e| Error::format(format!("measurement sidecar: {e}")))?;
        if sidecar.format != SIDECAR_FORMAT {
            return Err(Error::format(format!("sidecar format {:?} not recognized", sidecar.format)));
        }
        if sidecar.version != SIDECAR_VERSION {
            return Err(Error::format(format!("unsupported sidecar version {}", sidecar.version)));
        }
        Ok(sidecar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementFiles {
    pub pgm: Vec<u8>,
    pub mask: Vec<u8>,
    pub sidecar: Vec<u8>,
}

pub fn encode_measurement(m: &Measurement, sidecar: &MeasurementSidecar) -> MeasurementFiles {
    let erased: Vec<bool> = m.valid().iter().map(|v| !v).collect();
    MeasurementFiles {
        pgm: encode_pgm(m.width(), m.height(), m.dn()),
        mask: encode_pbm(m.width(), m.height(), &erased),
        sidecar: sidecar.to_json().into_bytes(),
    }
}

/// Decodes and cross-checks the three files. The mask may erase more than the
/// saturation and threshold rules do, never less.
pub fn decode_measurement(files: &MeasurementFiles) -> Result<(Measurement, MeasurementSidecar)> {
    let sidecar = MeasurementSidecar::from_json(&files.sidecar)?;
    let (w, h, _, dn) = decode_pgm(&files.pgm)?;
    let (mw, mh, erased) = decode_pbm(&files.mask)?;
    if (w, h) != (sidecar.width, sidecar.height) || (mw, mh) != (w, h) {
        return Err(Error::format("measurement files disagree on dimensions"));
    }
    let m = Measurement::new(w, h, sidecar.bit_depth, sidecar.low_threshold, dn)
        .map_err(|e| Error::format(format!("measurement content: {e}")))?;
    if let Some(i) = m.valid().iter().zip(&erased).position(|(&v, &e)| !v && !e) {
        return Err(Error::format(format!("mask keeps pixel {i}, which the erasure rule removes")));
    }
    let m = m.with_extra_erasures(&erased)?;
    Ok((m, sidecar))
}
