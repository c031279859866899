use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use grrhdr::analyze::{
    dynamic_range_grr, dynamic_range_nd, fidelity_metrics, isolated_highlight_density, merge_exposures,
    patch_dr_histogram, Normalization,
};
use grrhdr::{conjugated_exposure, ShutterProfile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::acquire::optics_from_flags;
use super::{say, Outcome};
use crate::error::{flag, CliError, CliResult};
use crate::files;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct MergeArgs {
    /// Measurement prefixes of the bracket, in any order.
    #[arg(required = true, num_args = 2..)]
    pub frames: Vec<PathBuf>,
    /// Output prefix: writes PREFIX.pfm.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Exposure of each frame in seconds, comma separated. Defaults to the
    /// recorded global-shutter exposures.
    #[arg(long, value_delimiter = ',')]
    pub times: Vec<f64>,
    /// Samples at or below this DN are ignored. Defaults to the recorded
    /// threshold, or 0.
    #[arg(long)]
    pub low: Option<f64>,
}

impl MergeArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let mut inputs = Vec::new();
        let mut frames = Vec::new();
        let mut recorded = Vec::new();
        for f in &self.frames {
            let prefix = files::measurement_prefix(f);
            let (m, sidecar) = files::read_measurement(&prefix)?;
            inputs.extend(files::measurement_paths(&prefix));
            recorded.push(sidecar.shutter.filter(|s| s.tr() == 0.0).map(|s| s.t0()));
            frames.push(m);
        }
        let times = if !self.times.is_empty() {
            if self.times.len() != frames.len() {
                return Err(CliError::param("--times needs one value per frame"));
            }
            self.times.clone()
        } else {
            recorded
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| CliError::param("--times is required: not every frame records a global shutter"))?
        };
        let low = self.low.unwrap_or_else(|| frames[0].low_threshold().map_or(0.0, f64::from));
        let img = merge_exposures(&frames, &times, low).map_err(flag("--times"))?;
        let path = files::suffixed(&self.out, ".pfm");
        files::write_pfm(&path, &img)?;
        Ok(Outcome { inputs, outputs: vec![path], summary: json!({ "max_dn_per_second": img.max_value() }) })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct AnalyzeDrArgs {
    /// Output prefix: writes PREFIX.csv.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value_t = 1.0 / 8000.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub tr: f64,
    /// Largest and smallest distinguishable intensity of the sensor.
    #[arg(long, default_value_t = 255.0)]
    pub imax: f64,
    #[arg(long, default_value_t = 1.0)]
    pub imin: f64,
    /// Permutation seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub identity_optics: bool,
    /// Patch sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub sizes: Vec<usize>,
}

impl AnalyzeDrArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let shutter = ShutterProfile::grr(self.t0, self.tr, self.height).map_err(flag("--t0/--tr/--height"))?;
        let n = self.width * self.height;
        let (optics, _) = optics_from_flags(self.seed, self.identity_optics, n)?
            .ok_or_else(|| CliError::param("one of --seed or --identity-optics is required"))?;
        let exposures = conjugated_exposure(&shutter, &optics, self.width).map_err(flag("--width"))?;
        let report = patch_dr_histogram(&exposures, self.width, self.height, self.imax, self.imin, &self.sizes)
            .map_err(flag("--sizes/--imax/--imin"))?;
        let native = dynamic_range_nd(self.imax, self.imin, 1.0, 1.0)?;
        let grr = dynamic_range_grr(self.imax, self.imin, self.t0, self.tr, 1, self.height)?;
        let path = files::suffixed(&self.out, ".csv");
        files::write(&path, report.to_csv().as_bytes())?;
        let means: Vec<f64> = report.histograms.iter().map(|h| h.mean).collect();
        let summary = json!({ "native_db": native, "grr_db": grr, "patch_means_db": means });
        Ok(Outcome { inputs: vec![], outputs: vec![path], summary })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct HighlightArgs {
    /// PFM images.
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    /// Output prefix: writes PREFIX.csv.
    #[arg(long, short)]
    pub out: PathBuf,
}

impl HighlightArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let mut csv = String::from("image,density\n");
        for p in &self.images {
            let img = files::read_pfm(p)?;
            let d = isolated_highlight_density(&img).map_err(|e| CliError::from(e).context(p.display()))?;
            let _ = writeln!(csv, "{},{}", p.display(), d);
        }
        say(csv.trim_end());
        let path = files::suffixed(&self.out, ".csv");
        files::write(&path, csv.as_bytes())?;
        Ok(Outcome { inputs: self.images.clone(), outputs: vec![path], summary: json!({}) })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct MetricsArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Output prefix: writes PREFIX.csv.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Statistic of the reference both images are divided by: max or mean.
    #[arg(long, default_value = "max")]
    pub normalization: String,
}

impl MetricsArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let norm: Normalization = self.normalization.parse().map_err(flag("--normalization"))?;
        let reference = files::read_pfm(&self.reference)?;
        let test = files::read_pfm(&self.test)?;
        let f = fidelity_metrics(&reference, &test, norm)?;
        let csv = format!("psnr_db,psnr_gamma_db,ssim\n{},{},{}\n", f.psnr, f.psnr_gamma, f.ssim);
        say(csv.trim_end());
        let path = files::suffixed(&self.out, ".csv");
        files::write(&path, csv.as_bytes())?;
        let summary = json!({ "psnr": f.psnr, "psnr_gamma": f.psnr_gamma, "ssim": f.ssim });
        Ok(Outcome { inputs: vec![self.reference.clone(), self.test.clone()], outputs: vec![path], summary })
    }
}
