//! Density of isolated highlights: the positive part of the negative
//! Laplacian of sum-normalized luminance, summed over the image.

use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::solver::color::luma;

/// Luminance of each pixel (a single channel is taken as luminance).
pub fn luminance(img: &RadianceImage) -> Vec<f64> {
    match img.channels() {
        3 => img.data().chunks(3).map(|p| luma(p[0], p[1], p[2])).collect(),
        _ => img.data().to_vec(),
    }
}

/// 5-point stencil, borders replicated (reflective boundary).
pub fn isolated_highlight_density(img: &RadianceImage) -> Result<f64> {
    let l = luminance(img);
    let total: f64 = l.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::param("image has no positive luminance"));
    }
    let (w, h) = (img.width(), img.height());
    let at = |r: usize, c: usize| l[r * w + c] / total;
    let mut density = 0.0;
    for r in 0..h {
        for c in 0..w {
            let center = at(r, c);
            let up = at(r.saturating_sub(1), c);
            let down = at((r + 1).min(h - 1), c);
            let left = at(r, c.saturating_sub(1));
            let right = at(r, (c + 1).min(w - 1));
            // summed as differences so equal neighbors cancel exactly
            let neg_laplacian = (center - up) + (center - down) + (center - left) + (center - right);
            density += neg_laplacian.max(0.0);
        }
    }
    Ok(density)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bright_pixel() {
        let img = RadianceImage::from_fn(5, 5, |r, c| if r == 2 && c == 2 { 1.0 } else { 0.0 }).unwrap();
        assert!((isolated_highlight_density(&img).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_zero() {
        let img = RadianceImage::from_fn(7, 4, |_, _| 3.0).unwrap();
        assert_eq!(isolated_highlight_density(&img).unwrap(), 0.0);
        assert!(isolated_highlight_density(&RadianceImage::zeros(3, 3, 1).unwrap()).is_err());
    }
}
