//! Erasure-masked reconstruction:
//! `min_x 0.5 * ||E (A x - b)||^2 + tau * sum_c TV((Psi x)_c)` subject to `x >= 0`,
//! solved with FISTA and an approximate TV prox.

pub mod color;
pub mod operator;
pub mod tv;

use std::fmt::Write as _;

use crate::calib::{BayerPlanes, SparseSystemMatrix};
use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::permutation::PermutationMap;
use crate::sensor::{Measurement, SensorConfig};
use crate::shutter::ShutterProfile;

pub use color::{color_transform, luma, rgb_to_ycbcr, transform_planes, ycbcr_to_rgb, ColorDirection};
pub use operator::{CalibratedOperator, MosaicOperator, ShuffledShutter, SystemOperator};
pub use tv::{tv_denoise_objective, tv_norm, tv_prox};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverOptions {
    pub tau: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub tv_inner_iters: usize,
    /// Constrain erased pixels to the range their erasure implies: at least
    /// the clip level when saturated, at most the threshold when
    /// underexposed. The data term is unaffected.
    #[serde(default)]
    pub erasure_bounds: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tau: 0.0, max_iters: 200, rel_tol: 1e-6, tv_inner_iters: 10, erasure_bounds: false }
    }
}

impl SolverOptions {
    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn with_max_iters(self, max_iters: usize) -> Self {
        Self { max_iters, ..self }
    }

    pub fn with_erasure_bounds(self, erasure_bounds: bool) -> Self {
        Self { erasure_bounds, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::param(format!("tau must be finite and >= 0, got {}", self.tau)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::param(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// Default TV weight for a `bits`-deep sensor with DN gain `gain`.
pub fn default_tau(bit_depth: u32, gain: f64) -> f64 {
    1e-3 * f64::from(crate::sensor::max_dn(bit_depth)) * gain
}

/// Why a pixel was erased; drives the bounds used for the starting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Erasure {
    Kept,
    Saturated,
    Underexposed,
    Other,
}

#[derive(Debug, Clone)]
pub struct InverseProblem {
    operator: SystemOperator,
    b: Vec<f64>,
    valid: Vec<bool>,
    erasure: Vec<Erasure>,
    max_dn: f64,
    low_threshold: Option<f64>,
    width: usize,
    height: usize,
    channels: usize,
    pub options: SolverOptions,
}

fn classify(m: &Measurement) -> Vec<Erasure> {
    let max = m.max_dn();
    m.dn()
        .iter()
        .zip(m.valid())
        .map(|(&v, &ok)| {
            if ok {
                Erasure::Kept
            } else if v == max {
                Erasure::Saturated
            } else if m.low_threshold().is_some_and(|t| v <= t) {
                Erasure::Underexposed
            } else {
                Erasure::Other
            }
        })
        .collect()
}

impl InverseProblem {
    /// Ideal permuting optics: `A = gain * S * P` on the raw sensor frame.
    pub fn synthetic(
        m: &Measurement,
        shutter: &ShutterProfile,
        optics: &PermutationMap,
        sensor: &SensorConfig,
        options: SolverOptions,
    ) -> Result<Self> {
        if m.height() != shutter.rows() || m.len() != optics.size() {
            return Err(Error::dim(format!(
                "{}x{} measurement does not match {} shutter rows and optics of size {}",
                m.width(),
                m.height(),
                shutter.rows(),
                optics.size()
            )));
        }
        if m.bit_depth() != sensor.bit_depth() {
            return Err(Error::param("measurement and sensor disagree on bit depth"));
        }
        let op = ShuffledShutter::new(*shutter, optics.clone(), sensor.gain())?;
        Self::assemble(SystemOperator::Shuffled(op), &[m], m.width(), m.height(), 1, options)
    }

    /// Calibrated optics: `A = S * P_hat` with `P_hat` read from a matrix.
    /// The matrix's invalid pixels are erased.
    pub fn calibrated(
        m: &Measurement,
        matrix: &SparseSystemMatrix,
        shutter: &ShutterProfile,
        scene_width: usize,
        scene_height: usize,
        options: SolverOptions,
    ) -> Result<Self> {
        if scene_width * scene_height != matrix.n_scene() {
            return Err(Error::dim(format!(
                "{}x{} scene for a matrix of {} scene points",
                scene_width,
                scene_height,
                matrix.n_scene()
            )));
        }
        if m.len() != matrix.n_sensor() || m.height() != shutter.rows() {
            return Err(Error::dim("measurement does not match the matrix or shutter"));
        }
        let op = CalibratedOperator::new(matrix, shutter, m.width())?;
        let m = erase_invalid(m, matrix)?;
        Self::assemble(SystemOperator::Calibrated(op), &[&m], scene_width, scene_height, 1, options)
    }

    /// Bayer sensor: four sub-planes observing a 3-channel scene.
    pub fn mosaic(
        planes: &BayerPlanes,
        scene_width: usize,
        scene_height: usize,
        options: SolverOptions,
    ) -> Result<Self> {
        let mut ops = Vec::with_capacity(4);
        let mut frames = Vec::with_capacity(4);
        for plane in planes.planes() {
            if plane.matrix.n_scene() != scene_width * scene_height {
                return Err(Error::dim("plane matrix does not match the scene size"));
            }
            ops.push((
                CalibratedOperator::new(&plane.matrix, &plane.shutter, plane.measurement.width())?,
                plane.channel.index(),
            ));
            frames.push(erase_invalid(&plane.measurement, &plane.matrix)?);
        }
        let op = MosaicOperator::new(ops)?;
        let refs: Vec<&Measurement> = frames.iter().collect();
        Self::assemble(SystemOperator::Mosaic(op), &refs, scene_width, scene_height, 3, options)
    }

    fn assemble(
        operator: SystemOperator,
        frames: &[&Measurement],
        width: usize,
        height: usize,
        channels: usize,
        options: SolverOptions,
    ) -> Result<Self> {
        options.validate()?;
        let first = frames[0];
        if frames.iter().any(|f| f.bit_depth() != first.bit_depth() || f.low_threshold() != first.low_threshold()) {
            return Err(Error::param("frames disagree on bit depth or threshold"));
        }
        let b = frames.iter().flat_map(|f| f.dn().iter().map(|&v| f64::from(v))).collect();
        let valid = frames.iter().flat_map(|f| f.valid().iter().copied()).collect();
        let erasure = frames.iter().flat_map(|f| classify(f)).collect();
        Ok(Self {
            operator,
            b,
            valid,
            erasure,
            max_dn: f64::from(first.max_dn()),
            low_threshold: first.low_threshold().map(f64::from),
            width,
            height,
            channels,
            options,
        })
    }

    pub fn operator(&self) -> &SystemOperator {
        &self.operator
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    /// Length of the unknown, channel-major.
    pub fn scene_len(&self) -> usize {
        self.operator.scene_len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.operator.sensor_len()];
        self.operator.apply(x, &mut r);
        for ((ri, &bi), &ok) in r.iter_mut().zip(&self.b).zip(&self.valid) {
            *ri = if ok { *ri - bi } else { 0.0 };
        }
        r
    }

    /// `0.5 * ||E (A x - b)||^2` for a channel-major unknown.
    pub fn data_term(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(0.5 * self.residual(x).iter().map(|r| r * r).sum::<f64>())
    }

    /// `A^T E (A x - b)`; erased residuals are zeroed before back-projection.
    pub fn data_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let r = self.residual(x);
        let mut g = vec![0.0; x.len()];
        self.operator.adjoint(&r, &mut g);
        Ok(g)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.scene_len() {
            return Err(Error::dim(format!("unknown has {} values, expected {}", x.len(), self.scene_len())));
        }
        Ok(())
    }

    fn plane_len(&self) -> usize {
        self.width * self.height
    }

    /// TV of each channel in luma/chroma space (plain TV for one channel).
    fn regularizer(&self, x: &[f64]) -> f64 {
        if self.options.tau == 0.0 {
            return 0.0;
        }
        let planes = self.to_tv_space(x);
        planes.iter().map(|p| tv_norm(p, self.width, self.height)).sum()
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.data_term(x)? + self.options.tau * self.regularizer(x))
    }

    fn to_tv_space(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut planes: Vec<Vec<f64>> = x.chunks(self.plane_len()).map(<[f64]>::to_vec).collect();
        if self.channels == 3 {
            transform_planes(&mut planes, ColorDirection::ToLumaChroma).expect("three planes");
        }
        planes
    }

    fn prox(&self, z: &[f64], weight: f64, limits: Option<&(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
        let mut planes = self.to_tv_space(z);
        if weight > 0.0 {
            for p in planes.iter_mut() {
                *p = tv_prox(p, self.width, self.height, weight, self.options.tv_inner_iters);
            }
        }
        if self.channels == 3 {
            transform_planes(&mut planes, ColorDirection::FromLumaChroma).expect("three planes");
        }
        let mut out: Vec<f64> = planes.into_iter().flatten().collect();
        match limits {
            Some((lo, hi)) => {
                for ((v, l), h) in out.iter_mut().zip(lo).zip(hi) {
                    *v = v.max(*l).min(*h).max(0.0);
                }
            }
            None => out.iter_mut().for_each(|v| *v = v.max(0.0)),
        }
        out
    }

    /// Channel-major unknown to an interleaved image.
    pub fn to_image(&self, x: &[f64]) -> Result<RadianceImage> {
        self.check_len(x)?;
        let planes: Vec<Vec<f64>> =
            x.chunks(self.plane_len()).map(|p| p.iter().map(|v| v.max(0.0)).collect()).collect();
        RadianceImage::from_planes(self.width, self.height, &planes)
    }

    /// Interleaved image to a channel-major unknown.
    pub fn from_image(&self, img: &RadianceImage) -> Result<Vec<f64>> {
        if img.width() != self.width || img.height() != self.height || img.channels() != self.channels {
            return Err(Error::dim("image does not match the problem geometry"));
        }
        Ok(img.planes().concat())
    }

    /// Per-pixel `(lower, upper)` limits implied by the erasures: a pixel
    /// seen only saturated lies at or above `(2^B - 1.5) / a_k`, one seen only
    /// underexposed at or below `(threshold + 0.5) / a_k`, where `a_k` is the
    /// least-squares gain of its erased observations. Exact for one-to-one
    /// optics. Pixels without such observations get `(0, inf)`.
    pub fn erasure_limits(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.scene_len();
        let bound = |class: Erasure, level: f64| -> Vec<Option<f64>> {
            let mask: Vec<bool> = self.erasure.iter().map(|&e| e == class).collect();
            if !mask.iter().any(|&m| m) {
                return vec![None; n];
            }
            let ones: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
            let mut sums = vec![0.0; n];
            self.operator.adjoint(&ones, &mut sums);
            let sq = self.operator.masked_column_sq(&mask);
            sums.iter().zip(&sq).map(|(&s, &q)| (q > 0.0).then(|| level * s / q)).collect()
        };
        let lower = bound(Erasure::Saturated, self.max_dn - 0.5);
        let upper = match self.low_threshold {
            Some(t) => bound(Erasure::Underexposed, t + 0.5),
            None => vec![None; n],
        };
        (
            lower.into_iter().map(|v| v.unwrap_or(0.0)).collect(),
            upper.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
        )
    }

    /// Default starting point.
    ///
    /// Pixels observed by at least one retained measurement take the
    /// per-pixel least-squares value `(A^T E b)_k / (A^T E A)_kk`, which is the
    /// exact solution for ideal optics. The rest are filled by diffusing
    /// neighboring values, then clamped to their [`erasure_limits`](Self::erasure_limits).
    pub fn initial_estimate(&self) -> Vec<f64> {
        let n = self.scene_len();
        let eb: Vec<f64> = self.b.iter().zip(&self.valid).map(|(&b, &ok)| if ok { b } else { 0.0 }).collect();
        let mut rhs = vec![0.0; n];
        self.operator.adjoint(&eb, &mut rhs);
        let diag = self.operator.masked_column_sq(&self.valid);

        let mut x = vec![0.0; n];
        let mut known = vec![false; n];
        for k in 0..n {
            if diag[k] > 0.0 {
                x[k] = (rhs[k] / diag[k]).max(0.0);
                known[k] = true;
            }
        }
        let resolved = known.clone();
        for (xp, kp) in x.chunks_mut(self.plane_len()).zip(known.chunks_mut(self.plane_len())) {
            diffuse_fill(xp, kp, self.width, self.height);
        }
        let (lower, upper) = self.erasure_limits();
        for k in 0..n {
            if !resolved[k] {
                x[k] = x[k].max(lower[k]).min(upper[k]);
            }
        }
        x
    }

    fn lipschitz(&self) -> Result<f64> {
        let any_valid = self.valid.iter().any(|&v| v);
        if !any_valid {
            if self.options.tau == 0.0 {
                return Err(Error::Unsolvable("every pixel is erased and tau is 0".into()));
            }
            // the data term vanishes; any step works for the prox alone
            return Ok(1.0);
        }
        let l = self.operator.lipschitz(&self.valid);
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Degenerate(format!("Lipschitz constant {l}")));
        }
        Ok(l)
    }
}

fn erase_invalid(m: &Measurement, matrix: &SparseSystemMatrix) -> Result<Measurement> {
    let mut erase = vec![false; m.len()];
    for &p in matrix.invalid_pixels() {
        erase[p as usize] = true;
    }
    m.clone().with_extra_erasures(&erase)
}

/// Fills unknown pixels layer by layer with the mean of known 4-neighbors.
fn diffuse_fill(x: &mut [f64], known: &mut [bool], width: usize, height: usize) {
    if !known.iter().any(|&k| k) {
        return;
    }
    loop {
        let mut updates = Vec::new();
        for r in 0..height {
            for c in 0..width {
                let k = r * width + c;
                if known[k] {
                    continue;
                }
                let mut sum = 0.0;
                let mut count = 0;
                let mut visit = |j: usize| {
                    if known[j] {
                        sum += x[j];
                        count += 1;
                    }
                };
                if r > 0 {
                    visit(k - width);
                }
                if r + 1 < height {
                    visit(k + width);
                }
                if c > 0 {
                    visit(k - 1);
                }
                if c + 1 < width {
                    visit(k + 1);
                }
                if count > 0 {
                    updates.push((k, sum / f64::from(count)));
                }
            }
        }
        if updates.is_empty() {
            return;
        }
        for (k, v) in updates {
            x[k] = v;
            known[k] = true;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub lipschitz: f64,
    /// Objective at the start followed by one value per iteration, taken at
    /// the current iterate.
    pub objective: Vec<f64>,
    /// Relative change of the iterate per iteration (0 for rejected steps).
    pub rel_change: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn final_rel_change(&self) -> f64 {
        self.rel_change.last().copied().unwrap_or(0.0)
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective.last().expect("objective history holds the start value")
    }

    /// One `iteration objective rel_change` line per iteration after a short
    /// header.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# lipschitz {:e}", self.lipschitz);
        let _ = writeln!(s, "# iterations {}", self.iterations);
        let _ = writeln!(s, "# restarts {}", self.restarts);
        let _ = writeln!(s, "# converged {}", self.converged);
        let _ = writeln!(s, "iteration objective rel_change");
        let _ = writeln!(s, "0 {:e} 0", self.objective[0]);
        for (i, (f, r)) in self.objective[1..].iter().zip(&self.rel_change).enumerate() {
            let _ = writeln!(s, "{} {:e} {:e}", i + 1, f, r);
        }
        s
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// FISTA with step `1/L`, projection onto `x >= 0` (and the erasure limits
/// when enabled) and adaptive restart.
///
/// A step that raises the objective is rejected and the momentum reset; if
/// even a plain proximal gradient step from the current iterate fails to
/// descend (possible with the inexact prox) the run stops there. Returns the
/// channel-major unknown.
pub fn fista_solve_raw(p: &InverseProblem, x0: Option<Vec<f64>>) -> Result<(Vec<f64>, ConvergenceReport)> {
    p.options.validate()?;
    let lipschitz = p.lipschitz()?;
    let mut x = match x0 {
        Some(x0) => {
            p.check_len(&x0)?;
            if x0.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("initial estimate must be finite"));
            }
            x0.into_iter().map(|v| v.max(0.0)).collect()
        }
        None => p.initial_estimate(),
    };
    let limits = p.options.erasure_bounds.then(|| p.erasure_limits());
    if let Some((lo, hi)) = &limits {
        for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
            *v = v.max(*l).min(*h).max(0.0);
        }
    }
    let step = 1.0 / lipschitz;
    let weight = p.options.tau * step;
    let mut fx = p.objective(&x)?;
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut momentum = false;
    let mut report = ConvergenceReport {
        lipschitz,
        objective: vec![fx],
        rel_change: Vec::new(),
        iterations: 0,
        restarts: 0,
        converged: false,
    };

    for _ in 0..p.options.max_iters {
        report.iterations += 1;
        let g = p.data_grad(&y)?;
        let z: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - step * gi).collect();
        let x_new = p.prox(&z, weight, limits.as_ref());
        let f_new = p.objective(&x_new)?;

        if f_new > fx {
            report.rel_change.push(0.0);
            report.objective.push(fx);
            if !momentum {
                report.converged = true;
                break;
            }
            report.restarts += 1;
            t = 1.0;
            y.clone_from(&x);
            momentum = false;
            continue;
        }

        let diff: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&x_new).max(f64::MIN_POSITIVE);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        y = x_new.iter().zip(&diff).map(|(a, d)| a + beta * d).collect();
        momentum = beta != 0.0;
        t = t_new;
        x = x_new;
        fx = f_new;
        report.rel_change.push(rel);
        report.objective.push(fx);
        if rel < p.options.rel_tol {
            report.converged = true;
            break;
        }
    }
    Ok((x, report))
}

/// Runs [`fista_solve_raw`] from an optional starting image.
pub fn fista_solve(p: &InverseProblem, x0: Option<&RadianceImage>) -> Result<(RadianceImage, ConvergenceReport)> {
    let start = x0.map(|img| p.from_image(img)).transpose()?;
    let (x, report) = fista_solve_raw(p, start)?;
    Ok((p.to_image(&x)?, report))
}

/// `S^-1 P^T b` with erased pixels set to zero: the naive inversion that
/// ignores clipping.
pub fn pseudo_inverse_baseline(
    m: &Measurement,
    shutter: &ShutterProfile,
    optics: &PermutationMap,
    sensor: &SensorConfig,
) -> Result<RadianceImage> {
    if m.height() != shutter.rows() || m.len() != optics.size() {
        return Err(Error::dim("measurement does not match shutter and optics"));
    }
    let width = m.width();
    let data = (0..m.len())
        .map(|k| {
            let s = optics.sensor_of(k);
            if m.valid()[s] {
                f64::from(m.dn()[s]) / (sensor.gain() * shutter.row_exposure(s / width))
            } else {
                0.0
            }
        })
        .collect();
    RadianceImage::new(width, m.height(), 1, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{forward, AcquisitionSpec};

    fn problem(seed: u64, tau: f64) -> (RadianceImage, InverseProblem) {
        let shutter = ShutterProfile::grr(1.0, 0.25, 8).unwrap();
        let optics = PermutationMap::random(64, seed).unwrap();
        let sensor = SensorConfig::new(12, 100.0, 0.0, 0).unwrap();
        let scene = RadianceImage::from_fn(8, 8, |r, c| if r < 4 { 2.0 } else { 8.0 + c as f64 }).unwrap();
        let spec = AcquisitionSpec::new(shutter, optics.clone(), sensor, None).unwrap();
        let m = forward(&scene, &spec).unwrap();
        let p =
            InverseProblem::synthetic(&m, &shutter, &optics, &sensor, SolverOptions::default().with_tau(tau)).unwrap();
        (scene, p)
    }

    #[test]
    fn gradient_vanishes_at_exact_fit() {
        let (_, p) = problem(1, 0.0);
        let x: Vec<f64> = p.b.iter().enumerate().map(|(s, _)| s).fold(vec![0.0; 64], |mut acc, s| {
            if let SystemOperator::Shuffled(op) = p.operator() {
                let k = op.optics().scene_of(s);
                acc[k] = p.b[s] / op.pixel_scale(k);
            }
            acc
        });
        let g = p.data_grad(&x).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn report_text_has_one_line_per_iteration() {
        let (_, p) = problem(2, 0.0);
        let p = InverseProblem { options: p.options.with_max_iters(1), ..p };
        let (_, report) = fista_solve_raw(&p, Some(vec![1.0; 64])).unwrap();
        assert_eq!(report.iterations, 1);
        let text = report.to_text();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }

    #[test]
    fn recovers_unsaturated_scene() {
        let (scene, p) = problem(3, 0.0);
        let (x, _) = fista_solve(&p, None).unwrap();
        for (a, b) in x.data().iter().zip(scene.data()) {
            assert!((a - b).abs() < 0.01, "{a} vs {b}");
        }
    }

    #[test]
    fn fully_erased_problem() {
        let m = Measurement::new(2, 2, 8, None, vec![255; 4]).unwrap();
        let shutter = ShutterProfile::global(1.0, 2).unwrap();
        let optics = PermutationMap::identity(4).unwrap();
        let sensor = SensorConfig::new(8, 1.0, 0.0, 0).unwrap();
        let p = InverseProblem::synthetic(&m, &shutter, &optics, &sensor, SolverOptions::default()).unwrap();
        assert!(matches!(fista_solve_raw(&p, None), Err(Error::Unsolvable(_))));
        let p =
            InverseProblem::synthetic(&m, &shutter, &optics, &sensor, SolverOptions::default().with_tau(1.0)).unwrap();
        let (x, _) = fista_solve_raw(&p, Some(vec![3.5; 4])).unwrap();
        assert!(x.iter().all(|&v| (v - 3.5).abs() < 1e-12));
        // default start sits at the clip level
        assert!(p.initial_estimate().iter().all(|&v| v == 254.5));
    }

    #[test]
    fn descent_with_tv() {
        let (_, p) = problem(4, 50.0);
        let x0 = vec![5.0; 64];
        let f0 = p.objective(&x0).unwrap();
        let (x, report) = fista_solve_raw(&p, Some(x0)).unwrap();
        assert!(p.objective(&x).unwrap() <= f0);
        assert_eq!(report.final_objective(), p.objective(&x).unwrap());
    }
}
