//! ADC model and quantized measurements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_BIT_DEPTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    bit_depth: u32,
    /// DN per unit of (radiance x seconds).
    gain: f64,
    /// Additive Gaussian read noise, in DN.
    noise_sigma: f64,
    noise_seed: u64,
}

impl SensorConfig {
    pub fn new(bit_depth: u32, gain: f64, noise_sigma: f64, noise_seed: u64) -> Result<Self> {
        if bit_depth == 0 || bit_depth > MAX_BIT_DEPTH {
            return Err(Error::param(format!("bit depth must be in 1..={MAX_BIT_DEPTH}, got {bit_depth}")));
        }
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::param(format!("gain must be positive and finite, got {gain}")));
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(Error::param(format!("noise sigma must be nonnegative, got {noise_sigma}")));
        }
        Ok(Self { bit_depth, gain, noise_sigma, noise_seed })
    }

    /// Noiseless sensor whose gain maps unit radiance at exposure `t0` to
    /// mid-scale, `2^(B-1)` DN.
    pub fn with_default_gain(bit_depth: u32, t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::param("t0 must be positive"));
        }
        let mid = f64::from(1u32 << (bit_depth.clamp(1, MAX_BIT_DEPTH) - 1));
        Self::new(bit_depth, mid / t0, 0.0, 0)
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise_seed
    }

    pub fn max_dn(&self) -> u16 {
        max_dn(self.bit_depth)
    }

    pub fn with_gain(&self, gain: f64) -> Result<Self> {
        Self::new(self.bit_depth, gain, self.noise_sigma, self.noise_seed)
    }

    pub fn with_noise(&self, noise_sigma: f64, noise_seed: u64) -> Result<Self> {
        Self::new(self.bit_depth, self.gain, noise_sigma, noise_seed)
    }

    pub fn noiseless(&self) -> Self {
        Self { noise_sigma: 0.0, ..*self }
    }
}

pub fn max_dn(bit_depth: u32) -> u16 {
    ((1u32 << bit_depth) - 1) as u16
}

/// Clips to `[0, 2^B - 1]` and rounds half away from zero.
#[inline]
pub fn quantize_value(value: f64, max_dn: u16) -> u16 {
    value.clamp(0.0, f64::from(max_dn)).round() as u16
}

pub fn quantize(energy: &[f64], config: &SensorConfig) -> Result<Vec<u16>> {
    let max = config.max_dn();
    energy
        .iter()
        .enumerate()
        .map(|(index, &v)| if v.is_nan() { Err(Error::NonFinite { index }) } else { Ok(quantize_value(v, max)) })
        .collect()
}

/// A quantized frame plus its erasure mask (`true` = retained).
///
/// A pixel is erased when it sits at full scale, or at or below
/// `low_threshold` when that screen is enabled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    width: usize,
    height: usize,
    bit_depth: u32,
    low_threshold: Option<u16>,
    dn: Vec<u16>,
    valid: Vec<bool>,
}

impl Measurement {
    pub fn new(width: usize, height: usize, bit_depth: u32, low_threshold: Option<u16>, dn: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("measurement dimensions must be nonzero"));
        }
        if bit_depth == 0 || bit_depth > MAX_BIT_DEPTH {
            return Err(Error::param(format!("bit depth {bit_depth} unsupported")));
        }
        if dn.len() != width * height {
            return Err(Error::dim(format!(
                "{}x{} measurement needs {} values, got {}",
                width,
                height,
                width * height,
                dn.len()
            )));
        }
        let max = max_dn(bit_depth);
        if let Some(i) = dn.iter().position(|&v| v > max) {
            return Err(Error::param(format!("dn {} at {} exceeds {}", dn[i], i, max)));
        }
        if let Some(t) = low_threshold {
            if t > max.saturating_sub(1) {
                return Err(Error::param(format!("low threshold {t} must be below {max}")));
            }
        }
        let valid = dn.iter().map(|&v| v != max && low_threshold.is_none_or(|t| v > t)).collect();
        Ok(Self { width, height, bit_depth, low_threshold, dn, valid })
    }

    /// Same pixels with an explicit mask; erased pixels can only be added to
    /// those the erasure rule already removes.
    pub fn with_extra_erasures(mut self, erase: &[bool]) -> Result<Self> {
        if erase.len() != self.dn.len() {
            return Err(Error::dim("erasure list length mismatch"));
        }
        for (v, &e) in self.valid.iter_mut().zip(erase) {
            if e {
                *v = false;
            }
        }
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.dn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dn.is_empty()
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn max_dn(&self) -> u16 {
        max_dn(self.bit_depth)
    }

    pub fn low_threshold(&self) -> Option<u16> {
        self.low_threshold
    }

    pub fn dn(&self) -> &[u16] {
        &self.dn
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn saturated(&self) -> Vec<bool> {
        let max = self.max_dn();
        self.dn.iter().map(|&v| v == max).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.bit_depth == other.bit_depth
    }

    /// Reorders pixels and mask together by an index gather.
    pub(crate) fn gathered(&self, order: &[u32]) -> Self {
        Self {
            dn: order.iter().map(|&i| self.dn[i as usize]).collect(),
            valid: order.iter().map(|&i| self.valid[i as usize]).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        bit_depth: u32,
        low_threshold: Option<u16>,
        dn: Vec<u16>,
        valid: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(dn.len(), width * height);
        debug_assert_eq!(valid.len(), dn.len());
        Self { width, height, bit_depth, low_threshold, dn, valid }
    }

    /// A `width x height` frame gathered from this one's pixels.
    pub(crate) fn sub_frame(&self, width: usize, height: usize, order: &[usize]) -> Self {
        debug_assert_eq!(order.len(), width * height);
        Self {
            width,
            height,
            bit_depth: self.bit_depth,
            low_threshold: self.low_threshold,
            dn: order.iter().map(|&i| self.dn[i]).collect(),
            valid: order.iter().map(|&i| self.valid[i]).collect(),
        }
    }
}
