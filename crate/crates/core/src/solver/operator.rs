//! Forward operators `A` mapping scene radiance to expected sensor DN.

use crate::calib::SparseSystemMatrix;
use crate::error::{Error, Result};
use crate::permutation::PermutationMap;
use crate::shutter::ShutterProfile;
use crate::simulate::deposited;

/// `A = gain * S * P` for ideal permuting optics.
#[derive(Debug, Clone)]
pub struct ShuffledShutter {
    shutter: ShutterProfile,
    optics: PermutationMap,
    width: usize,
    gain: f64,
}

impl ShuffledShutter {
    pub fn new(shutter: ShutterProfile, optics: PermutationMap, gain: f64) -> Result<Self> {
        if !optics.size().is_multiple_of(shutter.rows()) {
            return Err(Error::dim("optics size is not a multiple of the shutter rows"));
        }
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::param("gain must be positive"));
        }
        let width = optics.size() / shutter.rows();
        Ok(Self { shutter, optics, width, gain })
    }

    pub fn shutter(&self) -> &ShutterProfile {
        &self.shutter
    }

    pub fn optics(&self) -> &PermutationMap {
        &self.optics
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    #[inline]
    fn sensor_exposure(&self, s: usize) -> f64 {
        self.shutter.row_exposure(s / self.width)
    }

    /// Gain times exposure seen by scene pixel `k`.
    #[inline]
    pub fn pixel_scale(&self, k: usize) -> f64 {
        self.gain * self.sensor_exposure(self.optics.sensor_of(k))
    }
}

/// `A = S * P_hat` with a calibrated sparse matrix, stored row-compressed.
#[derive(Debug, Clone)]
pub struct CalibratedOperator {
    n_scene: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    /// Flux times the row's exposure.
    vals: Vec<f64>,
}

impl CalibratedOperator {
    /// `sensor_width` fixes which shutter row each sensor index sits on.
    pub fn new(matrix: &SparseSystemMatrix, shutter: &ShutterProfile, sensor_width: usize) -> Result<Self> {
        if sensor_width == 0 || shutter.rows() * sensor_width != matrix.n_sensor() {
            return Err(Error::dim(format!(
                "matrix with {} sensor pixels does not fit a {}x{} sensor",
                matrix.n_sensor(),
                sensor_width,
                shutter.rows()
            )));
        }
        let mut counts = vec![0usize; matrix.n_sensor() + 1];
        for e in matrix.entries() {
            counts[e.sensor as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let row_ptr = counts.clone();
        let mut fill = counts;
        let nnz = matrix.entries().len();
        let mut cols = vec![0u32; nnz];
        let mut vals = vec![0.0; nnz];
        for e in matrix.entries() {
            let s = e.sensor as usize;
            let slot = fill[s];
            fill[s] += 1;
            cols[slot] = e.scene;
            vals[slot] = e.flux * shutter.row_exposure(s / sensor_width);
        }
        Ok(Self { n_scene: matrix.n_scene(), row_ptr, cols, vals })
    }

    fn n_sensor(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn row(&self, s: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[s]..self.row_ptr[s + 1];
        self.cols[range.clone()].iter().zip(&self.vals[range]).map(|(&c, &v)| (c as usize, v))
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (s, out) in y.iter_mut().enumerate() {
            *out = self.row(s).map(|(c, v)| v * x[c]).sum();
        }
    }

    fn adjoint_add(&self, r: &[f64], x: &mut [f64]) {
        for (s, &rs) in r.iter().enumerate() {
            if rs != 0.0 {
                for (c, v) in self.row(s) {
                    x[c] += v * rs;
                }
            }
        }
    }

    fn column_sq_add(&self, mask: &[bool], out: &mut [f64]) {
        for (s, &m) in mask.iter().enumerate() {
            if m {
                for (c, v) in self.row(s) {
                    out[c] += v * v;
                }
            }
        }
    }
}

/// Block operator of a Bayer sensor: each sub-plane observes one color
/// channel of the scene, the two green planes sharing the green channel.
#[derive(Debug, Clone)]
pub struct MosaicOperator {
    n_scene: usize,
    planes: Vec<(CalibratedOperator, usize)>,
}

impl MosaicOperator {
    pub fn new(planes: Vec<(CalibratedOperator, usize)>) -> Result<Self> {
        let n_scene = planes.first().map(|p| p.0.n_scene).ok_or_else(|| Error::param("no planes"))?;
        if planes.iter().any(|(op, ch)| op.n_scene != n_scene || *ch > 2) {
            return Err(Error::dim("mosaic planes disagree on scene size or channel"));
        }
        Ok(Self { n_scene, planes })
    }

    fn offsets(&self) -> impl Iterator<Item = (usize, &CalibratedOperator, usize)> {
        self.planes.iter().scan(0usize, |acc, (op, ch)| {
            let start = *acc;
            *acc += op.n_sensor();
            Some((start, op, *ch))
        })
    }
}

#[derive(Debug, Clone)]
pub enum SystemOperator {
    Shuffled(ShuffledShutter),
    Calibrated(CalibratedOperator),
    Mosaic(MosaicOperator),
}

const POWER_ITERATIONS: usize = 20;
const POWER_TOLERANCE: f64 = 0.01;

impl SystemOperator {
    /// Length of the unknown vector (all channels, channel-major).
    pub fn scene_len(&self) -> usize {
        match self {
            SystemOperator::Shuffled(op) => op.optics.size(),
            SystemOperator::Calibrated(op) => op.n_scene,
            SystemOperator::Mosaic(op) => 3 * op.n_scene,
        }
    }

    pub fn sensor_len(&self) -> usize {
        match self {
            SystemOperator::Shuffled(op) => op.optics.size(),
            SystemOperator::Calibrated(op) => op.n_sensor(),
            SystemOperator::Mosaic(op) => op.planes.iter().map(|p| p.0.n_sensor()).sum(),
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.scene_len());
        debug_assert_eq!(y.len(), self.sensor_len());
        match self {
            SystemOperator::Shuffled(op) => {
                for (s, out) in y.iter_mut().enumerate() {
                    let k = op.optics.scene_of(s);
                    *out = deposited(op.gain, op.sensor_exposure(s), x[k]);
                }
            }
            SystemOperator::Calibrated(op) => op.apply(x, y),
            SystemOperator::Mosaic(op) => {
                let n = op.n_scene;
                for (start, plane, ch) in op.offsets() {
                    let len = plane.n_sensor();
                    plane.apply(&x[ch * n..(ch + 1) * n], &mut y[start..start + len]);
                }
            }
        }
    }

    pub fn adjoint(&self, r: &[f64], x: &mut [f64]) {
        debug_assert_eq!(r.len(), self.sensor_len());
        debug_assert_eq!(x.len(), self.scene_len());
        match self {
            SystemOperator::Shuffled(op) => {
                for (k, out) in x.iter_mut().enumerate() {
                    let s = op.optics.sensor_of(k);
                    *out = op.gain * op.sensor_exposure(s) * r[s];
                }
            }
            SystemOperator::Calibrated(op) => {
                x.iter_mut().for_each(|v| *v = 0.0);
                op.adjoint_add(r, x);
            }
            SystemOperator::Mosaic(op) => {
                x.iter_mut().for_each(|v| *v = 0.0);
                let n = op.n_scene;
                for (start, plane, ch) in op.offsets() {
                    let len = plane.n_sensor();
                    plane.adjoint_add(&r[start..start + len], &mut x[ch * n..(ch + 1) * n]);
                }
            }
        }
    }

    /// Squared column norms of `E A` for the sensor mask `mask`.
    pub fn masked_column_sq(&self, mask: &[bool]) -> Vec<f64> {
        let mut out = vec![0.0; self.scene_len()];
        match self {
            SystemOperator::Shuffled(op) => {
                for (k, v) in out.iter_mut().enumerate() {
                    if mask[op.optics.sensor_of(k)] {
                        let a = op.pixel_scale(k);
                        *v = a * a;
                    }
                }
            }
            SystemOperator::Calibrated(op) => op.column_sq_add(mask, &mut out),
            SystemOperator::Mosaic(op) => {
                let n = op.n_scene;
                for (start, plane, ch) in op.offsets() {
                    let len = plane.n_sensor();
                    plane.column_sq_add(&mask[start..start + len], &mut out[ch * n..(ch + 1) * n]);
                }
            }
        }
        out
    }

    /// Lipschitz constant of the gradient of `0.5 * ||E(Ax - b)||^2`, i.e.
    /// the largest eigenvalue of `A^T E A`.
    ///
    /// Exact for ideal permuting optics; otherwise a power-iteration estimate.
    pub fn lipschitz(&self, valid: &[bool]) -> f64 {
        match self {
            SystemOperator::Shuffled(op) => {
                let max = (0..op.optics.size())
                    .filter(|&s| valid[s])
                    .map(|s| op.gain * op.sensor_exposure(s))
                    .fold(0.0, f64::max);
                max * max
            }
            _ => self.power_iteration(valid),
        }
    }

    fn power_iteration(&self, valid: &[bool]) -> f64 {
        let mut v = vec![1.0 / (self.scene_len() as f64).sqrt(); self.scene_len()];
        let mut av = vec![0.0; self.sensor_len()];
        let mut w = vec![0.0; self.scene_len()];
        let mut estimate = 0.0;
        for _ in 0..POWER_ITERATIONS {
            self.apply(&v, &mut av);
            for (a, &m) in av.iter_mut().zip(valid) {
                if !m {
                    *a = 0.0;
                }
            }
            self.adjoint(&av, &mut w);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let previous = estimate;
            estimate = norm;
            v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / norm);
            if previous > 0.0 && (estimate - previous).abs() <= POWER_TOLERANCE * estimate {
                break;
            }
        }
        // power iteration approaches the top eigenvalue from below
        estimate * (1.0 + POWER_TOLERANCE)
    }
}
