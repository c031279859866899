use std::path::PathBuf;

use clap::{Args, ValueEnum};
use grrhdr::calib::{forward_mosaic, CfaPhase, SparseSystemMatrix};
use grrhdr::io::measurement::SensorInfo;
use grrhdr::io::{MeasurementSidecar, OpticsInfo};
use grrhdr::simulate::{calibrate_exposure_for_saturation, forward, saturation_rate, unshuffle, SaturationKnob};
use grrhdr::{AcquisitionSpec, PermutationMap, SensorConfig, ShutterProfile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outcome;
use crate::error::{flag, CliError, CliResult};
use crate::files;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Knob {
    /// Scale the scene (folded into the gain).
    Scale,
    /// Scale the base exposure t0.
    T0,
}

impl From<Knob> for SaturationKnob {
    fn from(k: Knob) -> Self {
        match k {
            Knob::Scale => SaturationKnob::Scale,
            Knob::T0 => SaturationKnob::T0,
        }
    }
}

/// Picks the optics from `--shuffle-seed` / `--identity-optics`.
pub(crate) fn optics_from_flags(
    shuffle_seed: Option<u64>,
    identity: bool,
    n: usize,
) -> CliResult<Option<(PermutationMap, OpticsInfo)>> {
    match (shuffle_seed, identity) {
        (Some(_), true) => Err(CliError::param("--shuffle-seed and --identity-optics are exclusive")),
        (Some(seed), false) => {
            Ok(Some((PermutationMap::random(n, seed).map_err(flag("--shuffle-seed"))?, OpticsInfo::Shuffle { seed })))
        }
        (None, true) => Ok(Some((PermutationMap::identity(n)?, OpticsInfo::Identity))),
        (None, false) => Ok(None),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Scene radiance (PFM, 1 or 3 channels).
    pub scene: PathBuf,
    /// Output prefix: writes PREFIX.pgm, PREFIX.mask.pbm and PREFIX.json.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Exposure of the first row, seconds.
    #[arg(long)]
    pub t0: f64,
    /// Exposure increment per row, seconds (0 = global shutter).
    #[arg(long, default_value_t = 0.0)]
    pub tr: f64,
    #[arg(long, default_value_t = 8)]
    pub bits: u32,
    /// Shuffle the scene with a seeded random permutation.
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    /// Image the scene without permutation.
    #[arg(long)]
    pub identity_optics: bool,
    /// Calibrated optics matrix (color scenes only).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// DN per unit radiance per second. Defaults to mid-scale for unit
    /// radiance at t0.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Read noise standard deviation in DN.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Noise seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also erase pixels at or below this DN.
    #[arg(long)]
    pub low_threshold: Option<u16>,
    /// Adjust the exposure so this fraction of pixels saturates.
    #[arg(long)]
    pub target_saturation: Option<f64>,
    #[arg(long, value_enum, default_value_t = Knob::Scale)]
    pub knob: Knob,
    /// Bayer phase for 3-channel scenes.
    #[arg(long, default_value = "rggb")]
    pub cfa: String,
}

impl SimulateArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let scene = files::read_pfm(&self.scene)?;
        let (w, h) = (scene.width(), scene.height());
        let shutter = ShutterProfile::grr(self.t0, self.tr, h).map_err(flag("--t0/--tr"))?;
        let gain = match self.gain {
            Some(g) => g,
            None => SensorConfig::with_default_gain(self.bits, self.t0).map_err(flag("--bits"))?.gain(),
        };
        let sensor =
            SensorConfig::new(self.bits, gain, self.noise, self.seed).map_err(flag("--bits/--gain/--noise"))?;
        let mut inputs = vec![self.scene.clone()];
        let optics = optics_from_flags(self.shuffle_seed, self.identity_optics, w * h)?;
        let mut summary = serde_json::Map::new();

        let (m, sidecar) = match scene.channels() {
            1 => {
                if self.matrix.is_some() {
                    return Err(CliError::param("--matrix is only used for 3-channel scenes"));
                }
                let (map, info) =
                    optics.ok_or_else(|| CliError::param("one of --shuffle-seed or --identity-optics is required"))?;
                let mut spec =
                    AcquisitionSpec::new(shutter, map, sensor, self.low_threshold).map_err(flag("--low-threshold"))?;
                if let Some(target) = self.target_saturation {
                    let search = calibrate_exposure_for_saturation(&scene, &spec, target, self.knob.into())
                        .map_err(flag("--target-saturation"))?;
                    summary.insert("knob_factor".into(), json!(search.factor));
                    summary.insert("noiseless_saturation".into(), json!(search.achieved));
                    summary.insert("target_attained".into(), json!(search.attained));
                    spec = search.spec;
                }
                let m = forward(&scene, &spec)?;
                let mut sidecar = MeasurementSidecar::describe(&m);
                sidecar.shutter = Some(spec.shutter);
                sidecar.optics = Some(info);
                sidecar.sensor = Some(sensor_info(&spec.sensor));
                sidecar.target_saturation = self.target_saturation;
                (m, sidecar)
            }
            3 => {
                if self.target_saturation.is_some() {
                    return Err(CliError::param("--target-saturation needs a single-channel scene"));
                }
                let phase: CfaPhase = self.cfa.parse().map_err(flag("--cfa"))?;
                let (matrix, info) = match (&self.matrix, optics) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::param("--matrix excludes --shuffle-seed and --identity-optics"))
                    }
                    (Some(path), None) => {
                        inputs.push(path.clone());
                        (files::read_matrix(path)?, OpticsInfo::Calibrated)
                    }
                    (None, Some((map, info))) => (SparseSystemMatrix::from_permutation(&map, gain)?, info),
                    (None, None) => {
                        return Err(CliError::param("one of --matrix, --shuffle-seed or --identity-optics is required"))
                    }
                };
                if matrix.n_scene() != w * h || matrix.n_sensor() != w * h {
                    return Err(CliError::param(format!(
                        "--matrix is {}x{}, the scene has {} pixels",
                        matrix.n_sensor(),
                        matrix.n_scene(),
                        w * h
                    )));
                }
                if self.low_threshold.is_some_and(|t| t >= sensor.max_dn()) {
                    return Err(CliError::param("--low-threshold must be below full scale"));
                }
                let m = forward_mosaic(&scene, &matrix, &shutter, w, &sensor, phase, self.low_threshold)?;
                let mut sidecar = MeasurementSidecar::describe(&m);
                sidecar.shutter = Some(shutter);
                sidecar.optics = Some(info);
                sidecar.sensor = Some(sensor_info(&sensor));
                sidecar.cfa = Some(phase.to_string());
                (m, sidecar)
            }
            c => return Err(CliError::param(format!("scene has {c} channels, expected 1 or 3"))),
        };
        summary.insert("saturation_rate".into(), json!(sidecar.saturation_rate));
        summary.insert("underexposed_rate".into(), json!(sidecar.underexposed_rate));
        let outputs = files::write_measurement(&self.out, &m, &sidecar)?;
        Ok(Outcome { inputs, outputs, summary: summary.into() })
    }
}

fn sensor_info(s: &SensorConfig) -> SensorInfo {
    SensorInfo { gain: s.gain(), noise_sigma: s.noise_sigma(), noise_seed: s.noise_seed() }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct UnshuffleArgs {
    /// Measurement prefix (or any of its files).
    pub measurement: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Permutation seed; defaults to the one recorded with the measurement.
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
}

impl UnshuffleArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let prefix = files::measurement_prefix(&self.measurement);
        let (m, mut sidecar) = files::read_measurement(&prefix)?;
        if !sidecar.sensor_order {
            return Err(CliError::param("measurement is already in scene order"));
        }
        let map = match (self.shuffle_seed, sidecar.optics) {
            (Some(seed), _) | (None, Some(OpticsInfo::Shuffle { seed })) => {
                PermutationMap::random(m.len(), seed).map_err(flag("--shuffle-seed"))?
            }
            (None, Some(OpticsInfo::Identity)) => PermutationMap::identity(m.len())?,
            (None, _) => return Err(CliError::param("--shuffle-seed is required: the measurement records no seed")),
        };
        let out = unshuffle(&m, &map)?;
        sidecar.sensor_order = false;
        let stats = saturation_rate(&out);
        sidecar.saturation_rate = stats.saturated;
        sidecar.underexposed_rate = stats.underexposed;
        let outputs = files::write_measurement(&self.out, &out, &sidecar)?;
        Ok(Outcome { inputs: files::measurement_paths(&prefix).to_vec(), outputs, summary: json!({}) })
    }
}
