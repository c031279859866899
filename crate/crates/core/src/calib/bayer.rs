//! Bayer color filter arrays.
//!
//! A mosaic is split into four half-resolution planes by row and column
//! parity: offsets (0,0), (0,1), (1,0), (1,1). Each plane sees one color
//! channel of the scene, has its own sub-sampled shutter (every other row) and
//! the matching rows of the calibrated matrix. For RGGB the planes are R, G1,
//! G2 and B.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SparseSystemMatrix;
use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::sensor::{quantize_value, Measurement, SensorConfig};
use crate::shutter::ShutterProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CfaChannel {
    Red,
    Green,
    Blue,
}

impl CfaChannel {
    pub fn index(self) -> usize {
        match self {
            CfaChannel::Red => 0,
            CfaChannel::Green => 1,
            CfaChannel::Blue => 2,
        }
    }
}

/// Colors of the 2x2 tile, read row by row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CfaPhase {
    #[default]
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl CfaPhase {
    pub fn tile(self) -> [CfaChannel; 4] {
        use CfaChannel::*;
        match self {
            CfaPhase::Rggb => [Red, Green, Green, Blue],
            CfaPhase::Bggr => [Blue, Green, Green, Red],
            CfaPhase::Grbg => [Green, Red, Blue, Green],
            CfaPhase::Gbrg => [Green, Blue, Red, Green],
        }
    }

    pub fn channel_at(self, row: usize, col: usize) -> CfaChannel {
        self.tile()[2 * (row % 2) + col % 2]
    }
}

impl FromStr for CfaPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rggb" => Ok(CfaPhase::Rggb),
            "bggr" => Ok(CfaPhase::Bggr),
            "grbg" => Ok(CfaPhase::Grbg),
            "gbrg" => Ok(CfaPhase::Gbrg),
            _ => Err(Error::param(format!("unknown CFA phase {s:?}"))),
        }
    }
}

impl fmt::Display for CfaPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CfaPhase::Rggb => "rggb",
            CfaPhase::Bggr => "bggr",
            CfaPhase::Grbg => "grbg",
            CfaPhase::Gbrg => "gbrg",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayerPlane {
    pub row_offset: usize,
    pub col_offset: usize,
    pub channel: CfaChannel,
    pub measurement: Measurement,
    pub shutter: ShutterProfile,
    pub matrix: SparseSystemMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayerPlanes {
    phase: CfaPhase,
    width: usize,
    height: usize,
    planes: Vec<BayerPlane>,
}

impl BayerPlanes {
    pub fn phase(&self) -> CfaPhase {
        self.phase
    }

    /// Mosaic width.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Planes in offset order (0,0), (0,1), (1,0), (1,1).
    pub fn planes(&self) -> &[BayerPlane] {
        &self.planes
    }
}

/// Mosaic indices belonging to the plane at `(dr, dc)`, row-major.
fn plane_indices(width: usize, height: usize, dr: usize, dc: usize) -> Vec<usize> {
    (0..height / 2).flat_map(|r| (0..width / 2).map(move |c| (2 * r + dr) * width + 2 * c + dc)).collect()
}

const OFFSETS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub fn bayer_split(
    mosaic: &Measurement,
    shutter: &ShutterProfile,
    matrix: &SparseSystemMatrix,
    phase: CfaPhase,
) -> Result<BayerPlanes> {
    let (w, h) = (mosaic.width(), mosaic.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::param(format!("mosaic {w}x{h} must have even dimensions")));
    }
    if shutter.rows() != h || matrix.n_sensor() != mosaic.len() {
        return Err(Error::dim("mosaic does not match the shutter or matrix"));
    }
    let planes = OFFSETS
        .iter()
        .map(|&(dr, dc)| {
            let idx = plane_indices(w, h, dr, dc);
            Ok(BayerPlane {
                row_offset: dr,
                col_offset: dc,
                channel: phase.channel_at(dr, dc),
                measurement: mosaic.sub_frame(w / 2, h / 2, &idx),
                shutter: shutter.decimated(dr)?,
                matrix: matrix.select_rows(&idx)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BayerPlanes { phase, width: w, height: h, planes })
}

/// Interleaves the four planes back into the mosaic.
pub fn reassemble(planes: &BayerPlanes) -> Measurement {
    let (w, h) = (planes.width, planes.height);
    let first = &planes.planes[0].measurement;
    let mut dn = vec![0u16; w * h];
    let mut valid = vec![false; w * h];
    for p in &planes.planes {
        for (j, i) in plane_indices(w, h, p.row_offset, p.col_offset).into_iter().enumerate() {
            dn[i] = p.measurement.dn()[j];
            valid[i] = p.measurement.valid()[j];
        }
    }
    Measurement::from_parts(w, h, first.bit_depth(), first.low_threshold(), dn, valid)
}

/// Simulates a Bayer sensor behind calibrated optics: sensor pixel `s` on
/// row `r` records `Q(T_r * sum_k P[s, k] * x[k, c(s)] + noise)` where `c(s)`
/// is its filter color. Matrix fluxes are in DN per second per unit radiance.
pub fn forward_mosaic(
    scene: &RadianceImage,
    matrix: &SparseSystemMatrix,
    shutter: &ShutterProfile,
    sensor_width: usize,
    sensor: &SensorConfig,
    phase: CfaPhase,
    low_threshold: Option<u16>,
) -> Result<Measurement> {
    if scene.channels() != 3 {
        return Err(Error::param("mosaic simulation takes a 3-channel scene"));
    }
    if scene.pixel_count() != matrix.n_scene() || shutter.rows() * sensor_width != matrix.n_sensor() {
        return Err(Error::dim("scene, matrix and sensor geometry disagree"));
    }
    let mut energy = vec![0.0; matrix.n_sensor()];
    for e in matrix.entries() {
        let s = e.sensor as usize;
        let (r, c) = (s / sensor_width, s % sensor_width);
        let ch = phase.channel_at(r, c).index();
        energy[s] += e.flux * scene.get(e.scene as usize / scene.width(), e.scene as usize % scene.width(), ch);
    }
    for (s, v) in energy.iter_mut().enumerate() {
        *v *= shutter.row_exposure(s / sensor_width);
    }
    if sensor.noise_sigma() > 0.0 {
        let normal = Normal::new(0.0, sensor.noise_sigma()).expect("sigma validated");
        let mut rng = ChaCha8Rng::seed_from_u64(sensor.noise_seed());
        for v in energy.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    let max = sensor.max_dn();
    let dn = energy.into_iter().map(|v| quantize_value(v, max)).collect();
    Measurement::new(sensor_width, shutter.rows(), sensor.bit_depth(), low_threshold, dn)
}
