//! Batch comparison of optics and shutter configurations at controlled
//! saturation rates.
//!
//! Every scenario is run on every scene: the sensor gain is searched so the
//! noiseless frame saturates the requested fraction of pixels, a noisy frame
//! is simulated, reconstructed, and scored against the scene.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyze::{fidelity_metrics, Normalization};
use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::permutation::PermutationMap;
use crate::scenes::derive_seed;
use crate::sensor::SensorConfig;
use crate::shutter::ShutterProfile;
use crate::simulate::{calibrate_exposure_for_saturation, forward, AcquisitionSpec, SaturationKnob};
use crate::solver::{fista_solve, InverseProblem, SolverOptions};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpticsKind {
    Identity,
    Shuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShutterKind {
    Global,
    Grr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub optics: OpticsKind,
    pub shutter: ShutterKind,
    /// TV weight relative to full scale: the solver uses
    /// `tau * (2^B - 1) * gain * t_max`.
    pub tau: f64,
    pub saturation: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_max_iters() -> usize {
    200
}

fn default_inner() -> usize {
    10
}

fn default_rel_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub seed: u64,
    pub bit_depth: u32,
    /// Read noise standard deviation as a fraction of full scale.
    pub noise_fraction: f64,
    /// Shortest and longest exposure; the GRR gradient spans them, the global
    /// shutter uses `t_min`.
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_inner")]
    pub tv_inner_iters: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Constrain erased pixels by their erasure reason during reconstruction.
    #[serde(default)]
    pub erasure_bounds: bool,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let file: Self = serde_json::from_slice(bytes).map_err(|e| Error::format(format!("scenario file: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::format(format!("unsupported scenario schema {}", self.schema_version)));
        }
        if self.scenarios.is_empty() {
            return Err(Error::format("scenario file lists no scenarios"));
        }
        let bad = |msg: String| Err(Error::format(msg));
        if self.bit_depth == 0 || self.bit_depth > crate::sensor::MAX_BIT_DEPTH {
            return bad(format!("bit depth {} unsupported", self.bit_depth));
        }
        if !(self.noise_fraction.is_finite() && self.noise_fraction >= 0.0) {
            return bad("noise_fraction must be >= 0".into());
        }
        if !(self.t_min.is_finite() && self.t_min > 0.0 && self.t_max.is_finite() && self.t_max >= self.t_min) {
            return bad("need 0 < t_min <= t_max".into());
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return bad("rel_tol must be positive".into());
        }
        for s in &self.scenarios {
            if !(s.tau.is_finite() && s.tau >= 0.0) {
                return bad(format!("scenario {}: tau must be >= 0", s.name));
            }
            if !(s.saturation > 0.0 && s.saturation < 1.0) {
                return bad(format!("scenario {}: saturation must be in (0, 1)", s.name));
            }
            if s.max_iters == 0 {
                return bad(format!("scenario {}: max_iters must be >= 1", s.name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub scene: String,
    pub scenario: String,
    pub saturation: f64,
    pub iterations: usize,
    pub psnr: f64,
    pub psnr_gamma: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub psnr_gamma_mean: f64,
    pub psnr_gamma_std: f64,
    pub ssim_mean: f64,
    pub ssim_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
    pub summary: Vec<ScenarioSummary>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl AblationTable {
    pub fn summary_for(&self, scenario: &str) -> Option<&ScenarioSummary> {
        self.summary.iter().find(|s| s.scenario == scenario)
    }

    /// Per-scene rows followed by `mean` and `std` rows for each scenario.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("scene,scenario,saturation,iterations,psnr,psnr_gamma,ssim\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:.6},{},{:.4},{:.4},{:.6}",
                r.scene, r.scenario, r.saturation, r.iterations, r.psnr, r.psnr_gamma, r.ssim
            );
        }
        for m in &self.summary {
            let _ = writeln!(s, "mean,{},,,{:.4},{:.4},{:.6}", m.scenario, m.psnr_mean, m.psnr_gamma_mean, m.ssim_mean);
            let _ = writeln!(s, "std,{},,,{:.4},{:.4},{:.6}", m.scenario, m.psnr_std, m.psnr_gamma_std, m.ssim_std);
        }
        s
    }
}

/// Acquisition for one scene under one scenario before saturation targeting.
pub fn scenario_spec(
    file: &ScenarioFile,
    scenario: &Scenario,
    scene: &RadianceImage,
    scene_index: usize,
) -> Result<AcquisitionSpec> {
    let rows = scene.height();
    let shutter = match scenario.shutter {
        ShutterKind::Global => ShutterProfile::global(file.t_min, rows)?,
        ShutterKind::Grr => ShutterProfile::spanning(file.t_min, file.t_max, rows)?,
    };
    let optics = match scenario.optics {
        OpticsKind::Identity => PermutationMap::identity(scene.pixel_count())?,
        OpticsKind::Shuffle => {
            PermutationMap::random(scene.pixel_count(), derive_seed(file.seed, 2 * scene_index as u64))?
        }
    };
    let max_dn = f64::from(crate::sensor::max_dn(file.bit_depth));
    let sensor = SensorConfig::with_default_gain(file.bit_depth, file.t_min)?
        .with_noise(file.noise_fraction * max_dn, derive_seed(file.seed, 2 * scene_index as u64 + 1))?;
    AcquisitionSpec::new(shutter, optics, sensor, None)
}

fn run_one(
    file: &ScenarioFile,
    scenario: &Scenario,
    name: &str,
    scene: &RadianceImage,
    index: usize,
) -> Result<AblationRow> {
    let spec = scenario_spec(file, scenario, scene, index)?;
    let search = calibrate_exposure_for_saturation(scene, &spec, scenario.saturation, SaturationKnob::Scale)?;
    let spec = search.spec;
    let m = forward(scene, &spec)?;
    let max_dn = f64::from(spec.sensor.max_dn());
    let options = SolverOptions {
        tau: scenario.tau * max_dn * spec.sensor.gain() * spec.shutter.max_exposure(),
        max_iters: scenario.max_iters,
        rel_tol: file.rel_tol,
        tv_inner_iters: file.tv_inner_iters,
        erasure_bounds: file.erasure_bounds,
    };
    let problem = InverseProblem::synthetic(&m, &spec.shutter, &spec.optics, &spec.sensor, options)?;
    let (x, report) = fista_solve(&problem, None)?;
    let f = fidelity_metrics(scene, &x, file.normalization)?;
    Ok(AblationRow {
        scene: name.to_string(),
        scenario: scenario.name.clone(),
        saturation: crate::simulate::saturation_rate(&m).saturated,
        iterations: report.iterations,
        psnr: f.psnr,
        psnr_gamma: f.psnr_gamma,
        ssim: f.ssim,
    })
}

/// Runs every scenario on every single-channel scene. Work is spread over
/// threads; results are ordered by scene, then scenario.
pub fn run_ablation(scenes: &[(String, RadianceImage)], file: &ScenarioFile) -> Result<AblationTable> {
    file.validate()?;
    if scenes.is_empty() {
        return Err(Error::param("ablation corpus is empty"));
    }
    if let Some((name, _)) = scenes.iter().find(|(_, s)| s.channels() != 1) {
        return Err(Error::param(format!("scene {name} is not single-channel")));
    }
    let jobs: Vec<(usize, usize)> =
        (0..scenes.len()).flat_map(|i| (0..file.scenarios.len()).map(move |j| (i, j))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, j)| run_one(file, &file.scenarios[j], &scenes[i].0, &scenes[i].1, i))
        .collect::<Result<Vec<_>>>()?;
    let summary = file
        .scenarios
        .iter()
        .map(|sc| {
            let pick = |f: fn(&AblationRow) -> f64| -> Vec<f64> {
                rows.iter().filter(|r| r.scenario == sc.name).map(f).collect()
            };
            let (psnr_mean, psnr_std) = mean_std(&pick(|r| r.psnr));
            let (psnr_gamma_mean, psnr_gamma_std) = mean_std(&pick(|r| r.psnr_gamma));
            let (ssim_mean, ssim_std) = mean_std(&pick(|r| r.ssim));
            ScenarioSummary {
                scenario: sc.name.clone(),
                psnr_mean,
                psnr_std,
                psnr_gamma_mean,
                psnr_gamma_std,
                ssim_mean,
                ssim_std,
            }
        })
        .collect();
    Ok(AblationTable { rows, summary })
}
