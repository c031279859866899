//! Luma/chroma transform used by the TV prior on color images.
//!
//! BT.601 full-range YCbCr without the 8-bit offset: chroma of a neutral
//! pixel is zero, so the transform is linear on radiance.

use crate::error::{Error, Result};
use crate::image::RadianceImage;

pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];
pub const NEUTRAL_CHROMA: f64 = 0.0;
const CB_SCALE: f64 = 1.772; // 2 * (1 - 0.114)
const CR_SCALE: f64 = 1.402; // 2 * (1 - 0.299)

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorDirection {
    ToLumaChroma,
    FromLumaChroma,
}

#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
}

#[inline]
pub fn rgb_to_ycbcr(r: f64, g: f64, b: f64) -> [f64; 3] {
    let y = luma(r, g, b);
    [y, (b - y) / CB_SCALE + NEUTRAL_CHROMA, (r - y) / CR_SCALE + NEUTRAL_CHROMA]
}

#[inline]
pub fn ycbcr_to_rgb(y: f64, cb: f64, cr: f64) -> [f64; 3] {
    let r = y + CR_SCALE * (cr - NEUTRAL_CHROMA);
    let b = y + CB_SCALE * (cb - NEUTRAL_CHROMA);
    let g = (y - LUMA_WEIGHTS[0] * r - LUMA_WEIGHTS[2] * b) / LUMA_WEIGHTS[1];
    [r, g, b]
}

/// Transforms three channel planes in place.
pub fn transform_planes(planes: &mut [Vec<f64>], direction: ColorDirection) -> Result<()> {
    if planes.len() != 3 {
        return Err(Error::param(format!("color transform needs 3 channels, got {}", planes.len())));
    }
    let n = planes[0].len();
    if planes.iter().any(|p| p.len() != n) {
        return Err(Error::dim("channel planes differ in length"));
    }
    for k in 0..n {
        let (a, b, c) = (planes[0][k], planes[1][k], planes[2][k]);
        let out = match direction {
            ColorDirection::ToLumaChroma => rgb_to_ycbcr(a, b, c),
            ColorDirection::FromLumaChroma => ycbcr_to_rgb(a, b, c),
        };
        for (plane, v) in planes.iter_mut().zip(out) {
            plane[k] = v;
        }
    }
    Ok(())
}

/// Channel planes of `img` in the requested space. Luma/chroma planes may be
/// negative, so they are returned as raw planes rather than an image.
pub fn color_transform(img: &RadianceImage) -> Result<Vec<Vec<f64>>> {
    if img.channels() != 3 {
        return Err(Error::param("color transform needs a 3-channel image"));
    }
    let mut planes = img.planes();
    transform_planes(&mut planes, ColorDirection::ToLumaChroma)?;
    Ok(planes)
}
