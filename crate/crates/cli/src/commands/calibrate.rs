use std::path::PathBuf;

use clap::Args;
use grrhdr::calib::{build_matrix, synthetic_stacks, CalibrationConfig};
use grrhdr::io::encode_matrix;
use grrhdr::scenes::derive_seed;
use grrhdr::simulate::forward;
use grrhdr::{AcquisitionSpec, RadianceImage, SensorConfig, ShutterProfile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::acquire::optics_from_flags;
use super::Outcome;
use crate::error::{flag, CliError, CliResult};
use crate::files;

/// Stream offset separating dark-frame noise from stack noise.
const DARK_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct CalibrateArgs {
    /// Output prefix: writes PREFIX.ssm.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[arg(long)]
    pub identity_optics: bool,
    #[arg(long, default_value_t = 8)]
    pub bits: u32,
    /// DN per unit radiance per second. Defaults to mid-scale for a unit
    /// point source at the longest exposure.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Read noise standard deviation in DN.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exposure bracket in seconds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.002,0.004,0.008,0.016")]
    pub exposures: Vec<f64>,
    #[arg(long)]
    pub low_threshold: Option<u16>,
    /// Number of dark frames used to flag hot pixels.
    #[arg(long, default_value_t = 0)]
    pub dark_frames: usize,
    #[arg(long, default_value_t = 2.0)]
    pub dark_threshold: f64,
    #[arg(long, default_value_t = 3)]
    pub min_samples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub min_correlation: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub sparsity_floor: f64,
}

impl CalibrateArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let n = self.width.checked_mul(self.height).filter(|&n| n > 0);
        let n = n.ok_or_else(|| CliError::param("--width and --height must be positive"))?;
        let (optics, _) = optics_from_flags(self.shuffle_seed, self.identity_optics, n)?
            .ok_or_else(|| CliError::param("one of --shuffle-seed or --identity-optics is required"))?;
        let t_max = self.exposures.iter().copied().fold(f64::NAN, f64::max);
        let gain = match self.gain {
            Some(g) => g,
            None => SensorConfig::with_default_gain(self.bits, t_max).map_err(flag("--exposures"))?.gain(),
        };
        let sensor =
            SensorConfig::new(self.bits, gain, self.noise, self.seed).map_err(flag("--bits/--gain/--noise"))?;
        let stacks = synthetic_stacks(&optics, self.width, &sensor, &self.exposures, self.low_threshold)
            .map_err(flag("--exposures"))?;
        let dark = (0..self.dark_frames)
            .map(|i| {
                let s = sensor.with_noise(self.noise, derive_seed(self.seed, DARK_STREAM + i as u64))?;
                let spec = AcquisitionSpec::new(ShutterProfile::global(t_max, self.height)?, optics.clone(), s, None)?;
                forward(&RadianceImage::zeros(self.width, self.height, 1)?, &spec)
            })
            .collect::<grrhdr::Result<Vec<_>>>()?;
        let config = CalibrationConfig {
            dark_threshold: self.dark_threshold,
            min_samples: self.min_samples,
            min_correlation: self.min_correlation,
            sparsity_floor: self.sparsity_floor,
        };
        let matrix = build_matrix(&stacks, n, &dark, &config)?;
        let empty = (0..n).filter(|&k| matrix.column(k).is_empty()).count();
        if empty > 0 {
            eprintln!("warning: {empty} of {n} scene points have no usable entry");
        }
        let path = files::suffixed(&self.out, ".ssm");
        files::write(&path, &encode_matrix(&matrix))?;
        let summary = json!({
            "gain": gain,
            "entries": matrix.entries().len(),
            "invalid_pixels": matrix.invalid_pixels().len(),
            "max_entries_per_column": matrix.max_entries_per_column(),
            "empty_columns": empty,
        });
        Ok(Outcome { inputs: vec![], outputs: vec![path], summary })
    }
}
