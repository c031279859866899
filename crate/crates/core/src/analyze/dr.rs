//! Dynamic range of attenuated and row-graded acquisitions, in dB.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

fn db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Range of a sensor whose gray levels span `imin..imax` behind a filter whose
/// transmittance spans `emin..emax`.
pub fn dynamic_range_nd(imax: f64, imin: f64, emax: f64, emin: f64) -> Result<f64> {
    for (name, v) in [("imax", imax), ("imin", imin), ("emax", emax), ("emin", emin)] {
        check_positive(name, v)?;
    }
    if imax < imin || emax < emin {
        return Err(Error::param("maximum below minimum"));
    }
    Ok(db((imax / imin) * (emax / emin)))
}

/// Native range extended by the exposure spread between shutter rows
/// `u_min..=u_max` (1-based). With `tr = 0` there is no extension.
pub fn dynamic_range_grr(imax: f64, imin: f64, t0: f64, tr: f64, u_min: usize, u_max: usize) -> Result<f64> {
    for (name, v) in [("imax", imax), ("imin", imin), ("t0", t0)] {
        check_positive(name, v)?;
    }
    if !(tr.is_finite() && tr >= 0.0) {
        return Err(Error::param(format!("tr must be nonnegative, got {tr}")));
    }
    if u_min < 1 || u_max < u_min {
        return Err(Error::param(format!("row range {u_min}..={u_max} invalid")));
    }
    if imax < imin {
        return Err(Error::param("imax below imin"));
    }
    let native = db(imax / imin);
    if tr == 0.0 {
        return Ok(native);
    }
    let spread = (u_max - u_min) as f64 / (t0 / tr + u_min as f64 - 1.0);
    Ok(native + db(1.0 + spread))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchHistogram {
    pub size: usize,
    pub count: usize,
    pub mean: f64,
    pub p5: f64,
    pub p95: f64,
    /// Lower edge (whole dB) of the first bin.
    pub first_bin: i64,
    /// Counts of 1 dB bins starting at `first_bin`.
    pub bins: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrReport {
    pub native_db: f64,
    /// Range over the whole grid.
    pub global_db: f64,
    pub histograms: Vec<PatchHistogram>,
}

impl DrReport {
    /// One line per patch size: size, count, mean, p5, p95, first bin and the
    /// bin counts separated by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# native_db {}", self.native_db);
        let _ = writeln!(s, "# global_db {}", self.global_db);
        let _ = writeln!(s, "size,count,mean_db,p5_db,p95_db,first_bin_db,bins");
        for h in &self.histograms {
            let bins: Vec<String> = h.bins.iter().map(usize::to_string).collect();
            let _ =
                writeln!(s, "{},{},{},{},{},{},{}", h.size, h.count, h.mean, h.p5, h.p95, h.first_bin, bins.join(";"));
        }
        s
    }
}

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Sliding-window min and max along one axis.
fn window_extrema(values: &[f64], width: usize, height: usize, size: usize) -> (Vec<f64>, Vec<f64>) {
    let ow = width - size + 1;
    let oh = height - size + 1;
    let mut row_min = vec![0.0; ow * height];
    let mut row_max = vec![0.0; ow * height];
    row_min.par_chunks_mut(ow).zip(row_max.par_chunks_mut(ow)).enumerate().for_each(|(r, (mn, mx))| {
        let row = &values[r * width..(r + 1) * width];
        for c in 0..ow {
            let w = &row[c..c + size];
            mn[c] = w.iter().copied().fold(f64::INFINITY, f64::min);
            mx[c] = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
    });
    let mut out_min = vec![0.0; ow * oh];
    let mut out_max = vec![0.0; ow * oh];
    out_min.par_chunks_mut(ow).zip(out_max.par_chunks_mut(ow)).enumerate().for_each(|(r, (mn, mx))| {
        for c in 0..ow {
            mn[c] = (r..r + size).map(|rr| row_min[rr * ow + c]).fold(f64::INFINITY, f64::min);
            mx[c] = (r..r + size).map(|rr| row_max[rr * ow + c]).fold(f64::NEG_INFINITY, f64::max);
        }
    });
    (out_min, out_max)
}

/// Per-patch range of an exposure map: each `s x s` placement (stride 1)
/// scores `20 log10((imax / imin) * (max exposure / min exposure))`.
pub fn patch_dr_histogram(
    exposures: &[f64],
    width: usize,
    height: usize,
    imax: f64,
    imin: f64,
    sizes: &[usize],
) -> Result<DrReport> {
    if width == 0 || height == 0 || exposures.len() != width * height {
        return Err(Error::dim("exposure grid is empty or mis-sized"));
    }
    if exposures.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::param("exposures must be positive"));
    }
    let native = dynamic_range_nd(imax, imin, 1.0, 1.0)?;
    let tmax = exposures.iter().copied().fold(0.0, f64::max);
    let tmin = exposures.iter().copied().fold(f64::INFINITY, f64::min);
    let mut histograms = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size < 2 || size > width || size > height {
            return Err(Error::param(format!("patch size {size} invalid for a {width}x{height} grid")));
        }
        let (mn, mx) = window_extrema(exposures, width, height, size);
        let mut values: Vec<f64> = mn.iter().zip(&mx).map(|(a, b)| native + db(b / a)).collect();
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        values.sort_by(f64::total_cmp);
        let first_bin = values[0].floor() as i64;
        let last_bin = values[count - 1].floor() as i64;
        let mut bins = vec![0usize; (last_bin - first_bin + 1) as usize];
        for v in &values {
            bins[(v.floor() as i64 - first_bin) as usize] += 1;
        }
        histograms.push(PatchHistogram {
            size,
            count,
            mean,
            p5: percentile(&values, 5.0),
            p95: percentile(&values, 95.0),
            first_bin,
            bins,
        });
    }
    Ok(DrReport { native_db: native, global_db: native + db(tmax / tmin), histograms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_bit_native_range() {
        let v = dynamic_range_nd(255.0, 1.0, 0.5, 0.5).unwrap();
        assert!((v - 48.1308).abs() < 1e-4);
        let wedge = dynamic_range_nd(255.0, 1.0, 1e4, 1.0).unwrap();
        assert!((wedge - 128.1308).abs() < 1e-4);
        assert_eq!(dynamic_range_nd(3.0, 3.0, 2.0, 2.0).unwrap(), 0.0);
        assert!(dynamic_range_nd(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn grr_bound_for_prototype() {
        let v = dynamic_range_grr(255.0, 1.0, 189e-6, 51e-6, 1, 3036).unwrap();
        let by_hand = 48.1308 + 20.0 * (1.0f64 + 3035.0 / (189.0 / 51.0)).log10();
        assert!((v - by_hand).abs() < 1e-3);
        assert!((v - 106.4).abs() < 0.1);
        assert_eq!(dynamic_range_grr(255.0, 1.0, 1.0, 0.0, 1, 10).unwrap(), db(255.0));
        let a = dynamic_range_grr(255.0, 1.0, 1.0, 0.1, 1, 10).unwrap();
        let b = dynamic_range_grr(255.0, 1.0, 2.0, 0.1, 1, 10).unwrap();
        assert!(b < a);
    }

    #[test]
    fn constant_exposures_single_bin() {
        let r = patch_dr_histogram(&[2.0; 30], 6, 5, 255.0, 1.0, &[2, 3]).unwrap();
        for h in &r.histograms {
            assert_eq!(h.bins, vec![h.count]);
            assert!((h.mean - r.native_db).abs() < 1e-12);
        }
        assert_eq!(r.histograms[0].count, 5 * 4);
        assert_eq!(r.histograms[1].count, 4 * 3);
    }

    #[test]
    fn row_graded_patch_closed_form() {
        let (t0, tr) = (1.0, 0.5);
        let exposures: Vec<f64> = (0..4).flat_map(|r| [t0 + tr * r as f64; 4]).collect();
        let r = patch_dr_histogram(&exposures, 4, 4, 255.0, 1.0, &[2]).unwrap();
        // placements starting on 0-based row r cover rows u = r+1, r+2
        let expected: f64 =
            (1..=3).map(|u| r.native_db + db((t0 + u as f64 * tr) / (t0 + (u as f64 - 1.0) * tr))).sum::<f64>() / 3.0;
        assert!((r.histograms[0].mean - expected).abs() < 1e-12);
    }
}
