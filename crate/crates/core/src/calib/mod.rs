//! Builds a calibrated system matrix from exposure-bracketed point-source
//! captures.
//!
//! For each scene point `k` a stack of frames is captured at exposures
//! `T_1..T_m`. At every sensor pixel the samples `dn_l / T_l` that pass the
//! validity screen are averaged into a flux estimate, provided at least three
//! survive and they correlate linearly with exposure. Pixels whose dark frames
//! read high are dropped everywhere.

pub mod bayer;
pub mod matrix;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::permutation::PermutationMap;
use crate::sensor::{Measurement, SensorConfig};
use crate::shutter::ShutterProfile;
use crate::simulate::{forward, AcquisitionSpec};

pub use bayer::{bayer_split, forward_mosaic, reassemble, BayerPlane, BayerPlanes, CfaChannel, CfaPhase};
pub use matrix::{Entry, SparseSystemMatrix};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CalibrationConfig {
    /// Samples at or below this DN are too dark to use; dark-frame means above
    /// it mark a pixel invalid.
    pub dark_threshold: f64,
    pub min_samples: usize,
    /// Pearson correlation between exposure and DN must exceed this.
    pub min_correlation: f64,
    /// Entries below this fraction of their column's maximum are dropped.
    pub sparsity_floor: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { dark_threshold: 2.0, min_samples: 3, min_correlation: 0.95, sparsity_floor: 1e-3 }
    }
}

/// Frames of one scene point at several exposures.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureStack {
    source_index: usize,
    exposures: Vec<f64>,
    frames: Vec<Measurement>,
}

impl ExposureStack {
    /// Sorts the frames by exposure.
    pub fn new(source_index: usize, exposures: Vec<f64>, frames: Vec<Measurement>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::param("exposure stack is empty"));
        }
        if exposures.len() != frames.len() {
            return Err(Error::param(format!("{} exposures for {} frames", exposures.len(), frames.len())));
        }
        if exposures.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::param("exposures must be positive"));
        }
        if frames.iter().any(|f| !f.same_geometry(&frames[0])) {
            return Err(Error::dim("stack frames differ in geometry or bit depth"));
        }
        let mut pairs: Vec<(f64, Measurement)> = exposures.into_iter().zip(frames).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("exposures must be distinct"));
        }
        let (exposures, frames) = pairs.into_iter().unzip();
        Ok(Self { source_index, exposures, frames })
    }

    pub fn source_index(&self) -> usize {
        self.source_index
    }

    pub fn exposures(&self) -> &[f64] {
        &self.exposures
    }

    pub fn frames(&self) -> &[Measurement] {
        &self.frames
    }

    pub fn sensor_len(&self) -> usize {
        self.frames[0].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvalidReason {
    TooFewSamples(usize),
    /// The correlation, or `None` when it is undefined.
    PoorCorrelation(Option<f64>),
    DarkCurrent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxEstimate {
    Valid(f64),
    Invalid(InvalidReason),
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Flux at sensor pixel `pixel`, in DN per second.
///
/// A sample is usable when `dark_threshold < dn <= 2^B - 2`.
pub fn estimate_flux(stack: &ExposureStack, pixel: usize, config: &CalibrationConfig) -> Result<FluxEstimate> {
    if pixel >= stack.sensor_len() {
        return Err(Error::param(format!("pixel {pixel} outside a {}-pixel frame", stack.sensor_len())));
    }
    let top = f64::from(stack.frames[0].max_dn()) - 1.0;
    let mut ts = Vec::with_capacity(stack.frames.len());
    let mut dns = Vec::with_capacity(stack.frames.len());
    for (t, f) in stack.exposures.iter().zip(&stack.frames) {
        let dn = f64::from(f.dn()[pixel]);
        if dn > config.dark_threshold && dn <= top {
            ts.push(*t);
            dns.push(dn);
        }
    }
    if ts.len() < config.min_samples.max(1) {
        return Ok(FluxEstimate::Invalid(InvalidReason::TooFewSamples(ts.len())));
    }
    match pearson(&ts, &dns) {
        Some(r) if r > config.min_correlation => {}
        other => return Ok(FluxEstimate::Invalid(InvalidReason::PoorCorrelation(other))),
    }
    let sum: f64 = dns.iter().zip(&ts).map(|(d, t)| d / t).sum();
    Ok(FluxEstimate::Valid(sum / ts.len() as f64))
}

/// Pixels whose mean dark-frame value exceeds the threshold.
pub fn dark_pixels(dark_frames: &[Measurement], threshold: f64) -> Result<Vec<bool>> {
    let Some(first) = dark_frames.first() else {
        return Ok(Vec::new());
    };
    if dark_frames.iter().any(|f| f.len() != first.len()) {
        return Err(Error::dim("dark frames differ in size"));
    }
    let n = dark_frames.len() as f64;
    Ok((0..first.len())
        .map(|p| dark_frames.iter().map(|f| f64::from(f.dn()[p])).sum::<f64>() / n > threshold)
        .collect())
}

/// Assembles the calibrated matrix for scene points `0..n_scene`.
pub fn build_matrix(
    stacks: &[ExposureStack],
    n_scene: usize,
    dark_frames: &[Measurement],
    config: &CalibrationConfig,
) -> Result<SparseSystemMatrix> {
    let first = stacks.first().ok_or_else(|| Error::param("no exposure stacks"))?;
    let n_sensor = first.sensor_len();
    if stacks.iter().any(|s| !s.frames[0].same_geometry(&first.frames[0])) {
        return Err(Error::dim("stacks differ in sensor geometry"));
    }
    let mut seen = vec![false; n_scene];
    for s in stacks {
        match seen.get_mut(s.source_index) {
            Some(flag) if *flag => {
                return Err(Error::param(format!("scene index {} calibrated twice", s.source_index)))
            }
            Some(flag) => *flag = true,
            None => return Err(Error::param(format!("scene index {} outside 0..{n_scene}", s.source_index))),
        }
    }
    let missing: Vec<usize> = (0..n_scene).filter(|&k| !seen[k]).collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteCalibration(missing));
    }
    let mut invalid = dark_pixels(dark_frames, config.dark_threshold)?;
    if invalid.is_empty() {
        invalid = vec![false; n_sensor];
    } else if invalid.len() != n_sensor {
        return Err(Error::dim("dark frames do not match the calibration frames"));
    }

    let columns: Vec<Vec<Entry>> = stacks
        .par_iter()
        .map(|stack| -> Result<Vec<Entry>> {
            let mut col = Vec::new();
            for (p, &bad) in invalid.iter().enumerate().take(n_sensor) {
                if bad {
                    continue;
                }
                if let FluxEstimate::Valid(f) = estimate_flux(stack, p, config)? {
                    if f > 0.0 {
                        col.push(Entry { sensor: p as u32, scene: stack.source_index as u32, flux: f });
                    }
                }
            }
            let peak = col.iter().map(|e| e.flux).fold(0.0, f64::max);
            col.retain(|e| e.flux >= config.sparsity_floor * peak);
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let entries = columns.into_iter().flatten().collect();
    let invalid_idx = invalid.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32);
    SparseSystemMatrix::new(n_sensor, n_scene, entries, invalid_idx)
}

fn stack_seed(base: u64, k: usize, l: usize) -> u64 {
    base.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((l as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Simulated calibration captures: a unit point source at each scene pixel,
/// imaged through `optics` with a global shutter at each exposure. Noise
/// seeds are derived from the sensor seed per (point, exposure).
pub fn synthetic_stacks(
    optics: &PermutationMap,
    width: usize,
    sensor: &SensorConfig,
    exposures: &[f64],
    low_threshold: Option<u16>,
) -> Result<Vec<ExposureStack>> {
    if width == 0 || !optics.size().is_multiple_of(width) {
        return Err(Error::dim("optics size is not a multiple of the width"));
    }
    let height = optics.size() / width;
    (0..optics.size())
        .into_par_iter()
        .map(|k| {
            let mut scene = vec![0.0; optics.size()];
            scene[k] = 1.0;
            let scene = RadianceImage::new(width, height, 1, scene)?;
            let frames = exposures
                .iter()
                .enumerate()
                .map(|(l, &t)| {
                    let sensor = sensor.with_noise(sensor.noise_sigma(), stack_seed(sensor.noise_seed(), k, l))?;
                    let spec = AcquisitionSpec::new(
                        ShutterProfile::global(t, height)?,
                        optics.clone(),
                        sensor,
                        low_threshold,
                    )?;
                    forward(&scene, &spec)
                })
                .collect::<Result<Vec<_>>>()?;
            ExposureStack::new(k, exposures.to_vec(), frames)
        })
        .collect()
}
