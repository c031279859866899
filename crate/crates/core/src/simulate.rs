//! Synthesizes sensor frames from radiance scenes.
//!
//! The forward model is `dn = Q(gain * S * P * x + noise)`: the scene is
//! permuted onto the sensor, each sensor row integrates for its shutter
//! exposure, Gaussian read noise is added in DN and the ADC clips and rounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::permutation::{conjugated_exposure, PermutationMap};
use crate::sensor::{quantize_value, Measurement, SensorConfig};
use crate::shutter::ShutterProfile;

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionSpec {
    pub shutter: ShutterProfile,
    pub optics: PermutationMap,
    pub sensor: SensorConfig,
    /// Erase pixels at or below this DN. `None` erases saturation only.
    pub low_threshold: Option<u16>,
}

impl AcquisitionSpec {
    pub fn new(
        shutter: ShutterProfile,
        optics: PermutationMap,
        sensor: SensorConfig,
        low_threshold: Option<u16>,
    ) -> Result<Self> {
        if !optics.size().is_multiple_of(shutter.rows()) {
            return Err(Error::dim(format!(
                "optics of size {} do not tile {} shutter rows",
                optics.size(),
                shutter.rows()
            )));
        }
        if let Some(t) = low_threshold {
            if t > sensor.max_dn().saturating_sub(1) {
                return Err(Error::param(format!(
                    "low threshold {t} must be at most {}",
                    sensor.max_dn().saturating_sub(1)
                )));
            }
        }
        Ok(Self { shutter, optics, sensor, low_threshold })
    }

    pub fn height(&self) -> usize {
        self.shutter.rows()
    }

    pub fn width(&self) -> usize {
        self.optics.size() / self.shutter.rows()
    }

    fn check_scene(&self, scene: &RadianceImage) -> Result<()> {
        if scene.channels() != 1 {
            return Err(Error::param("forward simulation takes a single-channel scene"));
        }
        if scene.height() != self.shutter.rows() || scene.pixel_count() != self.optics.size() {
            return Err(Error::dim(format!(
                "scene {}x{} does not match a {}x{} acquisition",
                scene.width(),
                scene.height(),
                self.width(),
                self.height()
            )));
        }
        Ok(())
    }
}

/// Energy in DN deposited by `radiance` integrating for `exposure` seconds.
#[inline]
pub(crate) fn deposited(gain: f64, exposure: f64, radiance: f64) -> f64 {
    gain * exposure * radiance
}

fn noise_samples(sensor: &SensorConfig, n: usize) -> Option<Vec<f64>> {
    if sensor.noise_sigma() == 0.0 {
        return None;
    }
    let normal = Normal::new(0.0, sensor.noise_sigma()).expect("sigma validated");
    let mut rng = ChaCha8Rng::seed_from_u64(sensor.noise_seed());
    Some((0..n).map(|_| normal.sample(&mut rng)).collect())
}

/// Simulates one frame. Noise is drawn in sensor order from the sensor seed.
pub fn forward(scene: &RadianceImage, spec: &AcquisitionSpec) -> Result<Measurement> {
    spec.check_scene(scene)?;
    let width = spec.width();
    let x = scene.data();
    let gain = spec.sensor.gain();
    let max = spec.sensor.max_dn();
    let noise = noise_samples(&spec.sensor, x.len());
    let dn = (0..x.len())
        .map(|s| {
            let k = spec.optics.scene_of(s);
            let mut e = deposited(gain, spec.shutter.row_exposure(s / width), x[k]);
            if let Some(noise) = &noise {
                e += noise[s];
            }
            quantize_value(e, max)
        })
        .collect();
    Measurement::new(width, spec.height(), spec.sensor.bit_depth(), spec.low_threshold, dn)
}

/// Simulates a lens (identity optics) with an arbitrary per-pixel exposure map.
pub fn forward_with_exposures(
    scene: &RadianceImage,
    exposures: &[f64],
    sensor: &SensorConfig,
    low_threshold: Option<u16>,
) -> Result<Measurement> {
    if scene.channels() != 1 {
        return Err(Error::param("forward simulation takes a single-channel scene"));
    }
    if exposures.len() != scene.pixel_count() {
        return Err(Error::dim("exposure map does not match the scene"));
    }
    let gain = sensor.gain();
    let max = sensor.max_dn();
    let noise = noise_samples(sensor, exposures.len());
    let dn = scene
        .data()
        .iter()
        .zip(exposures)
        .enumerate()
        .map(|(k, (&x, &t))| {
            let mut e = deposited(gain, t, x);
            if let Some(noise) = &noise {
                e += noise[k];
            }
            quantize_value(e, max)
        })
        .collect();
    Measurement::new(scene.width(), scene.height(), sensor.bit_depth(), low_threshold, dn)
}

/// The direct simulation that the shuffled acquisition is equivalent to once
/// unshuffled: identity optics with exposures `diag(P^T S P)`.
pub fn forward_conjugated(scene: &RadianceImage, spec: &AcquisitionSpec) -> Result<Measurement> {
    spec.check_scene(scene)?;
    let exposures = conjugated_exposure(&spec.shutter, &spec.optics, spec.width())?;
    forward_with_exposures(scene, &exposures, &spec.sensor, spec.low_threshold)
}

/// Applies `P^-1` to a frame and its mask, restoring scene order.
pub fn unshuffle(m: &Measurement, map: &PermutationMap) -> Result<Measurement> {
    if m.len() != map.size() {
        return Err(Error::dim(format!("measurement of {} pixels for permutation of size {}", m.len(), map.size())));
    }
    Ok(m.gathered(map.forward()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationStats {
    /// Fraction of pixels at full scale.
    pub saturated: f64,
    /// Fraction at or below the low threshold (0 when the screen is off).
    pub underexposed: f64,
}

pub fn saturation_rate(m: &Measurement) -> SaturationStats {
    let n = m.len() as f64;
    let max = m.max_dn();
    let low = m.low_threshold().unwrap_or(0);
    let saturated = m.dn().iter().filter(|&&v| v == max).count() as f64 / n;
    let underexposed = m.dn().iter().filter(|&&v| v <= low).count() as f64 / n;
    SaturationStats { saturated, underexposed }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaturationKnob {
    /// Scales the scene, folded into the sensor gain.
    Scale,
    /// Scales the base exposure `t0`, keeping the row increment.
    T0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationSearch {
    pub spec: AcquisitionSpec,
    /// Multiplier applied to the chosen knob.
    pub factor: f64,
    /// Noiseless saturation rate at the chosen factor.
    pub achieved: f64,
    /// Whether `achieved` landed within tolerance of the target.
    pub attained: bool,
}

const KNOB_LOG2_RANGE: f64 = 60.0;
const BISECTION_STEPS: usize = 200;

fn with_factor(spec: &AcquisitionSpec, knob: SaturationKnob, factor: f64) -> Result<AcquisitionSpec> {
    let mut out = spec.clone();
    match knob {
        SaturationKnob::Scale => out.sensor = spec.sensor.with_gain(spec.sensor.gain() * factor)?,
        SaturationKnob::T0 => out.shutter = spec.shutter.with_t0(spec.shutter.t0() * factor)?,
    }
    Ok(out)
}

/// Bisects the knob (in log2) until the noiseless saturation rate is within
/// `max(0.1 * target, 0.5 / n)` of `target`.
///
/// Targets outside the reachable range are an error. When the rate jumps over
/// the tolerance band (e.g. flat scenes) the closest setting is returned with
/// `attained = false`.
pub fn calibrate_exposure_for_saturation(
    scene: &RadianceImage,
    spec: &AcquisitionSpec,
    target: f64,
    knob: SaturationKnob,
) -> Result<SaturationSearch> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::param(format!("target saturation must be in (0, 1), got {target}")));
    }
    spec.check_scene(scene)?;
    if scene.max_value() <= 0.0 {
        return Err(Error::Unattainable("scene has no positive pixel".into()));
    }
    let n = scene.pixel_count() as f64;
    let tol = (0.1 * target).max(0.5 / n);
    let rate_at = |log2: f64| -> Result<f64> {
        let mut trial = with_factor(spec, knob, log2.exp2())?;
        trial.sensor = trial.sensor.noiseless();
        Ok(saturation_rate(&forward(scene, &trial)?).saturated)
    };

    let finish = |log2: f64, achieved: f64| -> Result<SaturationSearch> {
        Ok(SaturationSearch {
            spec: with_factor(spec, knob, log2.exp2())?,
            factor: log2.exp2(),
            achieved,
            attained: (achieved - target).abs() <= tol,
        })
    };

    let (mut lo, mut hi) = (-KNOB_LOG2_RANGE, KNOB_LOG2_RANGE);
    let rate_lo = rate_at(lo)?;
    if (rate_lo - target).abs() <= tol {
        return finish(lo, rate_lo);
    }
    if rate_lo > target {
        return Err(Error::Unattainable(format!("saturation is already {rate_lo:.4} at the smallest knob setting")));
    }
    let rate_hi = rate_at(hi)?;
    if rate_hi < target - tol {
        return Err(Error::Unattainable(format!("saturation only reaches {rate_hi:.4} at the largest knob setting")));
    }
    let mut best = if (rate_hi - target).abs() < (rate_lo - target).abs() { (hi, rate_hi) } else { (lo, rate_lo) };
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let rate = rate_at(mid)?;
        if (rate - target).abs() < (best.1 - target).abs() {
            best = (mid, rate);
        }
        if (rate - target).abs() <= tol {
            return finish(mid, rate);
        }
        if rate < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    finish(best.0, best.1)
}
