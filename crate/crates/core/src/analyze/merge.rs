//! Multi-exposure merge used to build reference radiance maps.

use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::sensor::Measurement;

/// Tent weight peaking at mid-scale, zero outside `(low, max - 1]`.
fn tent(dn: f64, low: f64, max: f64) -> f64 {
    if dn <= low || dn > max - 1.0 {
        return 0.0;
    }
    let mid = 0.5 * max;
    (1.0 - (dn - mid).abs() / mid).max(f64::MIN_POSITIVE)
}

/// Weighted mean of `dn_l / T_l` over frames whose sample lies in
/// `(low, 2^B - 2]`; pixels usable in no frame take the shortest exposure's
/// estimate. The result is in DN per second.
pub fn merge_exposures(frames: &[Measurement], times: &[f64], low: f64) -> Result<RadianceImage> {
    if frames.len() < 2 {
        return Err(Error::param("merging needs at least two frames"));
    }
    if times.len() != frames.len() {
        return Err(Error::param("one exposure time per frame required"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::param("exposure times must be positive"));
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("exposure times must be distinct"));
    }
    if frames.iter().any(|f| !f.same_geometry(&frames[0])) {
        return Err(Error::dim("frames differ in geometry or bit depth"));
    }
    let shortest = (0..times.len()).min_by(|&a, &b| times[a].total_cmp(&times[b])).expect("nonempty");
    let max = f64::from(frames[0].max_dn());
    let data = (0..frames[0].len())
        .map(|p| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (f, &t) in frames.iter().zip(times) {
                let dn = f64::from(f.dn()[p]);
                let w = tent(dn, low, max);
                num += w * dn / t;
                den += w;
            }
            if den > 0.0 {
                num / den
            } else {
                f64::from(frames[shortest].dn()[p]) / times[shortest]
            }
        })
        .collect();
    RadianceImage::new(frames[0].width(), frames[0].height(), 1, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturated_frame_ignored() {
        let sat = Measurement::new(2, 1, 8, None, vec![255, 255]).unwrap();
        let ok = Measurement::new(2, 1, 8, None, vec![50, 100]).unwrap();
        let out = merge_exposures(&[sat, ok], &[4.0, 2.0], 0.0).unwrap();
        assert!((out.data()[0] - 25.0).abs() < 1e-12 && (out.data()[1] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn nothing_usable_falls_back_to_shortest() {
        let a = Measurement::new(1, 1, 8, None, vec![255]).unwrap();
        let b = Measurement::new(1, 1, 8, None, vec![255]).unwrap();
        let out = merge_exposures(&[a, b], &[2.0, 1.0], 0.0).unwrap();
        assert_eq!(out.data(), &[255.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = Measurement::new(1, 1, 8, None, vec![1]).unwrap();
        assert!(merge_exposures(std::slice::from_ref(&a), &[1.0], 0.0).is_err());
        assert!(merge_exposures(&[a.clone(), a.clone()], &[1.0, 1.0], 0.0).is_err());
        let b = Measurement::new(2, 1, 8, None, vec![1, 1]).unwrap();
        assert!(merge_exposures(&[a, b], &[1.0, 2.0], 0.0).is_err());
    }
}
