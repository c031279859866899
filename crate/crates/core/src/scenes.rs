//! Seeded synthetic HDR scenes spanning roughly three decades of radiance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::RadianceImage;

fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

/// Fills an ellipse (or box) of half-extent `hw x hh` around `(cx, cy)`;
/// `value` receives the normalized offsets from the center.
#[allow(clippy::too_many_arguments)]
fn paint(
    data: &mut [f64],
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    hw: f64,
    hh: f64,
    disk: bool,
    value: impl Fn(f64, f64) -> f64,
) {
    for r in 0..height {
        for c in 0..width {
            let (dx, dy) = ((c as f64 - cx) / hw, (r as f64 - cy) / hh);
            let inside = if disk { dx * dx + dy * dy <= 1.0 } else { dx.abs() <= 1.0 && dy.abs() <= 1.0 };
            if inside {
                data[r * width + c] = value(dx, dy);
            }
        }
    }
}

/// An outdoor-like layout: a sky band at the top fading toward the horizon,
/// darker ground below with shaded shapes, and one or two extended highlights
/// in the upper part of the frame.
pub fn synthetic_scene(width: usize, height: usize, seed: u64) -> Result<RadianceImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let horizon = rng.random_range(0.25..0.45) * h;
    let sky_top = log_uniform(&mut rng, 0.0, 0.7);
    let base = log_uniform(&mut rng, -2.0, -1.0);
    let (fx, fy) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let mut data: Vec<f64> = (0..height)
        .flat_map(|r| {
            (0..width).map(move |c| {
                let (u, v) = (c as f64 / w, r as f64 / h);
                if (r as f64) < horizon {
                    sky_top * (1.0 - 0.6 * r as f64 / horizon) * (1.0 + 0.1 * (fx * u * std::f64::consts::PI).sin())
                } else {
                    base * (1.5 + (fx * u * std::f64::consts::PI).sin() * (fy * v * std::f64::consts::PI).cos())
                }
            })
        })
        .collect();

    let shapes = rng.random_range(3..7);
    for _ in 0..shapes {
        let value = log_uniform(&mut rng, -2.0, 0.0);
        let slope = rng.random_range(-0.4..0.4);
        let (cx, cy) = (rng.random_range(0.0..w), rng.random_range(horizon..h));
        let (hw, hh) = (rng.random_range(0.08..0.3) * w, rng.random_range(0.08..0.3) * h);
        let disk = rng.random_bool(0.5);
        paint(&mut data, width, height, cx, cy, hw, hh, disk, |dx, _| value * (1.0 + slope * dx));
    }

    let highlights = rng.random_range(1..3);
    for _ in 0..highlights {
        let peak = log_uniform(&mut rng, 0.5, 1.2);
        let (cx, cy) = (rng.random_range(0.1..0.9) * w, rng.random_range(0.05 * h..horizon));
        let radius = rng.random_range(0.06..0.15) * w.min(h);
        paint(&mut data, width, height, cx, cy, radius, radius, true, |dx, dy| {
            peak * (1.0 - 0.5 * (dx * dx + dy * dy))
        });
    }
    RadianceImage::new(width, height, 1, data)
}

/// `count` scenes with seeds derived from `seed`.
pub fn synthetic_corpus(count: usize, width: usize, height: usize, seed: u64) -> Result<Vec<RadianceImage>> {
    (0..count).map(|i| synthetic_scene(width, height, derive_seed(seed, i as u64))).collect()
}

/// Decorrelates a base seed and a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
