//! Pixel fidelity against a reference: PSNR, gamma-encoded PSNR and SSIM on
//! images normalized by the reference's max or mean and clipped to [0, 1].

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::RadianceImage;

pub const PSNR_CAP: f64 = 99.0;
pub const GAMMA: f64 = 2.2;

const SSIM_TAPS: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Max,
    Mean,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Normalization::Max),
            "mean" => Ok(Normalization::Mean),
            _ => Err(Error::param(format!("unknown normalization {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Fidelity {
    pub psnr: f64,
    pub psnr_gamma: f64,
    pub ssim: f64,
}

/// PSNR of `test` against `reference` for signals in [0, 1], capped.
pub fn psnr(reference: &[f64], test: &[f64]) -> f64 {
    let mse = reference.iter().zip(test).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / reference.len() as f64;
    if mse == 0.0 {
        return PSNR_CAP;
    }
    (-10.0 * mse.log10()).min(PSNR_CAP)
}

fn gaussian_taps(n: usize) -> Vec<f64> {
    let c = (n as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..n).map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable valid-mode filtering of one plane.
fn filter_valid(plane: &[f64], width: usize, height: usize, taps: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = taps.len();
    let ow = width - n + 1;
    let oh = height - n + 1;
    let mut rows = vec![0.0; ow * height];
    for r in 0..height {
        for c in 0..ow {
            rows[r * ow + c] = taps.iter().enumerate().map(|(i, t)| t * plane[r * width + c + i]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = taps.iter().enumerate().map(|(i, t)| t * rows[(r + i) * ow + c]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean SSIM of one plane pair over all full windows. The window shrinks to
/// the largest odd size fitting images smaller than 11 pixels.
pub fn ssim_plane(x: &[f64], y: &[f64], width: usize, height: usize) -> f64 {
    let mut n = SSIM_TAPS.min(width).min(height);
    if n.is_multiple_of(2) {
        n -= 1;
    }
    let taps = gaussian_taps(n.max(1));
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p * q).collect() };
    let (mx, ow, oh) = filter_valid(x, width, height, &taps);
    let (my, _, _) = filter_valid(y, width, height, &taps);
    let (mxx, _, _) = filter_valid(&prod(x, x), width, height, &taps);
    let (myy, _, _) = filter_valid(&prod(y, y), width, height, &taps);
    let (mxy, _, _) = filter_valid(&prod(x, y), width, height, &taps);
    let mut total = 0.0;
    for i in 0..ow * oh {
        let vx = mxx[i] - mx[i] * mx[i];
        let vy = myy[i] - my[i] * my[i];
        let cov = mxy[i] - mx[i] * my[i];
        total +=
            ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) / ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total / (ow * oh) as f64
}

fn normalized(img: &RadianceImage, scale: f64) -> Vec<f64> {
    img.data().iter().map(|v| (v / scale).clamp(0.0, 1.0)).collect()
}

/// PSNR, PSNR after a `1/2.2` power encode, and SSIM (mean over channels).
pub fn fidelity_metrics(reference: &RadianceImage, test: &RadianceImage, norm: Normalization) -> Result<Fidelity> {
    if !reference.same_geometry(test) {
        return Err(Error::dim("reference and test differ in geometry"));
    }
    let scale = match norm {
        Normalization::Max => reference.max_value(),
        Normalization::Mean => reference.mean_value(),
    };
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::param("reference is zero under the chosen normalization"));
    }
    let r = normalized(reference, scale);
    let t = normalized(test, scale);
    let encode = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x.powf(1.0 / GAMMA)).collect() };
    let ch = reference.channels();
    let (w, h) = (reference.width(), reference.height());
    let plane = |v: &[f64], c: usize| -> Vec<f64> { v.iter().skip(c).step_by(ch).copied().collect() };
    let ssim = (0..ch).map(|c| ssim_plane(&plane(&r, c), &plane(&t, c), w, h)).sum::<f64>() / ch as f64;
    Ok(Fidelity { psnr: psnr(&r, &t), psnr_gamma: psnr(&encode(&r), &encode(&t)), ssim })
}
