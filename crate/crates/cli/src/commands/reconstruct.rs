use std::path::PathBuf;

use clap::Args;
use grrhdr::calib::{bayer_split, CfaPhase, SparseSystemMatrix};
use grrhdr::io::OpticsInfo;
use grrhdr::solver::{default_tau, fista_solve, InverseProblem, SolverOptions};
use grrhdr::{PermutationMap, SensorConfig, ShutterProfile};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::acquire::optics_from_flags;
use super::Outcome;
use crate::error::{flag, CliError, CliResult, ExitKind};
use crate::files;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct ReconstructArgs {
    /// Measurement prefix (or any of its files), in sensor order.
    pub measurement: PathBuf,
    /// Output prefix: writes PREFIX.pfm and PREFIX.report.txt.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Calibrated optics matrix; otherwise the recorded or flagged
    /// permutation is used.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[arg(long)]
    pub identity_optics: bool,
    /// Shutter override; defaults to the recorded shutter.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, requires = "t0")]
    pub tr: Option<f64>,
    /// Gain override; defaults to the recorded gain.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Treat the measurement as a Bayer mosaic and recover RGB.
    #[arg(long)]
    pub color: bool,
    /// Bayer phase; defaults to the recorded phase, then rggb.
    #[arg(long)]
    pub cfa: Option<String>,
    #[arg(long)]
    pub scene_width: Option<usize>,
    #[arg(long)]
    pub scene_height: Option<usize>,
    /// TV weight. Defaults to 1e-3 * (2^B - 1) * g with g the gain (or mean
    /// matrix flux) times the longest exposure.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 10)]
    pub tv_inner_iters: usize,
    /// Keep saturated pixels above the clip level and underexposed pixels
    /// below the threshold.
    #[arg(long)]
    pub erasure_bounds: bool,
    /// Exit with status 5 if the tolerance is not reached.
    #[arg(long)]
    pub require_convergence: bool,
}

fn mean_flux(m: &SparseSystemMatrix) -> f64 {
    let e = m.entries();
    if e.is_empty() {
        return 0.0;
    }
    e.iter().map(|e| e.flux).sum::<f64>() / e.len() as f64
}

impl ReconstructArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let prefix = files::measurement_prefix(&self.measurement);
        let (m, sidecar) = files::read_measurement(&prefix)?;
        let mut inputs = files::measurement_paths(&prefix).to_vec();
        if !sidecar.sensor_order {
            return Err(CliError::param("reconstruction takes a sensor-order measurement, not an unshuffled one"));
        }
        let shutter = match (self.t0, sidecar.shutter) {
            (Some(t0), _) => ShutterProfile::grr(t0, self.tr.unwrap_or(0.0), m.height()).map_err(flag("--t0/--tr"))?,
            (None, Some(s)) => s,
            (None, None) => return Err(CliError::param("--t0 is required: the measurement records no shutter")),
        };
        if shutter.rows() != m.height() {
            return Err(CliError::param(format!(
                "shutter has {} rows, the measurement {}",
                shutter.rows(),
                m.height()
            )));
        }
        let gain = self.gain.or(sidecar.sensor.as_ref().map(|s| s.gain));
        let matrix = match &self.matrix {
            Some(path) => {
                if self.shuffle_seed.is_some() || self.identity_optics {
                    return Err(CliError::param("--matrix excludes --shuffle-seed and --identity-optics"));
                }
                inputs.push(path.clone());
                Some(files::read_matrix(path)?)
            }
            None => None,
        };
        let optics = match &matrix {
            Some(_) => None,
            None => match optics_from_flags(self.shuffle_seed, self.identity_optics, m.len())? {
                Some((map, _)) => Some(map),
                None => match sidecar.optics {
                    Some(OpticsInfo::Shuffle { seed }) => Some(PermutationMap::random(m.len(), seed)?),
                    Some(OpticsInfo::Identity) => Some(PermutationMap::identity(m.len())?),
                    _ => return Err(CliError::param("--matrix is required for calibrated optics")),
                },
            },
        };
        let need_gain = || gain.ok_or_else(|| CliError::param("--gain is required: the measurement records none"));

        let n_scene = matrix.as_ref().map_or(m.len(), |mx| mx.n_scene());
        let (sw, sh) = match (self.scene_width, self.scene_height) {
            (Some(w), Some(h)) => (w, h),
            (None, None) if n_scene == m.len() => (m.width(), m.height()),
            _ => return Err(CliError::param("--scene-width and --scene-height are required for this matrix")),
        };
        let mut options = SolverOptions {
            tau: 0.0,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            tv_inner_iters: self.tv_inner_iters,
            erasure_bounds: self.erasure_bounds,
        };
        let t_max = shutter.max_exposure();
        let (problem, scale) = if self.color {
            let phase: CfaPhase = match self.cfa.as_deref().or(sidecar.cfa.as_deref()) {
                Some(s) => s.parse().map_err(flag("--cfa"))?,
                None => CfaPhase::default(),
            };
            let matrix = match matrix {
                Some(mx) => mx,
                None => SparseSystemMatrix::from_permutation(optics.as_ref().expect("optics resolved"), need_gain()?)?,
            };
            let planes = bayer_split(&m, &shutter, &matrix, phase)?;
            let scale = mean_flux(&matrix) * t_max;
            options.tau = self.tau.unwrap_or(default_tau(m.bit_depth(), scale));
            (InverseProblem::mosaic(&planes, sw, sh, options)?, scale)
        } else if let Some(mx) = &matrix {
            let scale = mean_flux(mx) * t_max;
            options.tau = self.tau.unwrap_or(default_tau(m.bit_depth(), scale));
            (InverseProblem::calibrated(&m, mx, &shutter, sw, sh, options)?, scale)
        } else {
            let sensor = SensorConfig::new(m.bit_depth(), need_gain()?, 0.0, 0).map_err(flag("--gain"))?;
            let scale = sensor.gain() * t_max;
            options.tau = self.tau.unwrap_or(default_tau(m.bit_depth(), scale));
            let map = optics.as_ref().expect("optics resolved");
            (
                InverseProblem::synthetic(&m, &shutter, map, &sensor, options)
                    .map_err(flag("--tau/--max-iters/--rel-tol"))?,
                scale,
            )
        };
        let (img, report) = fista_solve(&problem, None)?;
        let pfm = files::suffixed(&self.out, ".pfm");
        let txt = files::suffixed(&self.out, ".report.txt");
        files::write_pfm(&pfm, &img)?;
        files::write(&txt, report.to_text().as_bytes())?;
        if self.require_convergence && !report.converged {
            return Err(CliError::new(
                ExitKind::Compute,
                format!(
                    "no convergence after {} iterations (rel change {:e})",
                    report.iterations,
                    report.final_rel_change()
                ),
            ));
        }
        let summary = json!({
            "tau": options.tau,
            "operator_scale": scale,
            "lipschitz": report.lipschitz,
            "iterations": report.iterations,
            "restarts": report.restarts,
            "converged": report.converged,
            "final_objective": report.final_objective(),
            "final_rel_change": report.final_rel_change(),
        });
        Ok(Outcome { inputs, outputs: vec![pfm, txt], summary })
    }
}
