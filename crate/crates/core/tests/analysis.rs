use grrhdr::analyze::{
    dynamic_range_grr, dynamic_range_nd, fidelity_metrics, isolated_highlight_density, merge_exposures,
    patch_dr_histogram, Normalization,
};
use grrhdr::{Measurement, RadianceImage};
use proptest::prelude::*;

fn db(r: f64) -> f64 {
    20.0 * r.log10()
}

#[test]
fn range_values() {
    let e = 0.37;
    assert!((dynamic_range_nd(255.0, 1.0, e, e).unwrap() - 48.13).abs() <= 0.01);
    assert!((dynamic_range_nd(255.0, 1.0, 1e4, 1.0).unwrap() - 128.13).abs() <= 0.01);
    let grr = dynamic_range_grr(255.0, 1.0, 189e-6, 51e-6, 1, 3036).unwrap();
    assert!((grr - 106.4).abs() <= 0.1, "{grr}");
    assert_eq!(dynamic_range_grr(255.0, 1.0, 1e-3, 0.0, 1, 3036).unwrap(), db(255.0));
}

proptest! {
    #[test]
    fn grr_without_spread_is_native(imax in 1.0f64..1e5, frac in 1e-6f64..1.0, t0 in 1e-6f64..1.0, tr in 0.0f64..1e-2, u in 1usize..5000) {
        let imin = imax * frac;
        let native = dynamic_range_nd(imax, imin, 1.0, 1.0).unwrap();
        prop_assert_eq!(dynamic_range_grr(imax, imin, t0, tr, u, u).unwrap(), native);
    }

    #[test]
    fn grr_range_matches_extreme_row_ratio(imax in 2.0f64..1e5, t0 in 1e-6f64..1.0, tr in 1e-7f64..1e-2, a in 1usize..3000, extra in 1usize..3000) {
        let b = a + extra;
        let ratio = (t0 + tr * (b - 1) as f64) / (t0 + tr * (a - 1) as f64);
        let expected = db(imax) + db(ratio);
        let got = dynamic_range_grr(imax, 1.0, t0, tr, a, b).unwrap();
        prop_assert!((got - expected).abs() < 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn highlight_density_scale_invariant(values in prop::collection::vec(0.0f64..10.0, 36), scale in 1e-6f64..1e6) {
        prop_assume!(values.iter().sum::<f64>() > 0.0);
        let a = RadianceImage::new(6, 6, 1, values.clone()).unwrap();
        let b = RadianceImage::new(6, 6, 1, values.iter().map(|v| v * scale).collect()).unwrap();
        let da = isolated_highlight_density(&a).unwrap();
        let db_ = isolated_highlight_density(&b).unwrap();
        prop_assert!(da >= 0.0);
        prop_assert!((da - db_).abs() <= 1e-12 * da.max(1e-300));
    }

    #[test]
    fn histogram_mass_is_patch_count(w in 5usize..20, h in 5usize..20, seed in any::<u64>()) {
        let exposures: Vec<f64> = (0..w * h).map(|i| 1.0 + ((i as u64 ^ seed).wrapping_mul(0x9E37_79B9) % 97) as f64).collect();
        let r = patch_dr_histogram(&exposures, w, h, 255.0, 1.0, &[2, 3, 4, 5]).unwrap();
        for hist in &r.histograms {
            let n = (w - hist.size + 1) * (h - hist.size + 1);
            prop_assert_eq!(hist.count, n);
            prop_assert_eq!(hist.bins.iter().sum::<usize>(), n);
            prop_assert!(hist.p5 <= hist.mean + 1e-9 && hist.mean <= hist.p95 + 1e-9);
            prop_assert!(hist.p95 <= r.global_db + 1e-9);
        }
        // larger windows contain smaller ones, so every patch range is at least as wide
        for pair in r.histograms.windows(2) {
            prop_assert!(pair[0].mean <= pair[1].mean + 1e-9);
        }
    }
}

#[test]
fn single_two_by_two_patch() {
    let r = patch_dr_histogram(&[1.0, 2.0, 3.0, 8.0], 2, 2, 255.0, 1.0, &[2]).unwrap();
    let h = &r.histograms[0];
    assert_eq!(h.count, 1);
    assert!((h.mean - (db(255.0) + db(8.0))).abs() < 1e-12);
    assert_eq!(h.bins, vec![1]);
    assert_eq!(h.first_bin, (db(255.0) + db(8.0)).floor() as i64);
}

#[test]
fn highlight_examples() {
    let constant = RadianceImage::from_fn(9, 4, |_, _| 0.25).unwrap();
    assert_eq!(isolated_highlight_density(&constant).unwrap(), 0.0);
    let dot = RadianceImage::from_fn(5, 5, |r, c| if (r, c) == (2, 2) { 7.0 } else { 0.0 }).unwrap();
    assert!((isolated_highlight_density(&dot).unwrap() - 4.0).abs() < 1e-12);
}

/// Integer DN/s rates at exposures that stay below full scale merge back
/// to rounding.
#[test]
fn merge_recovers_unclipped_rates() {
    let rates: Vec<f64> = (0..12).map(|i| 10.0 * (i + 1) as f64).collect();
    let times = [0.5, 1.0, 2.0];
    let frames: Vec<Measurement> = times
        .iter()
        .map(|&t| Measurement::new(4, 3, 8, None, rates.iter().map(|r| (r * t) as u16).collect()).unwrap())
        .collect();
    let merged = merge_exposures(&frames, &times, 0.0).unwrap();
    for (got, want) in merged.data().iter().zip(&rates) {
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }
}

#[test]
fn identical_images_score_perfectly() {
    let img = RadianceImage::from_fn(16, 16, |r, c| 0.1 + (r * c) as f64).unwrap();
    let f = fidelity_metrics(&img, &img, Normalization::Max).unwrap();
    assert_eq!(f.psnr, grrhdr::analyze::metrics::PSNR_CAP);
    assert!((f.ssim - 1.0).abs() < 1e-12);
}

#[test]
fn constant_offset_psnr_closed_form() {
    let reference = RadianceImage::from_fn(16, 16, |r, c| 1.0 + (r + c) as f64).unwrap();
    let peak = reference.max_value();
    let delta = 0.5;
    let test = RadianceImage::new(16, 16, 1, reference.data().iter().map(|v| (v - delta).max(0.0)).collect()).unwrap();
    let f = fidelity_metrics(&reference, &test, Normalization::Max).unwrap();
    assert!((f.psnr - (-db(delta / peak))).abs() < 1e-9, "{}", f.psnr);
}

#[test]
fn common_scale_leaves_metrics_unchanged() {
    let reference = RadianceImage::from_fn(20, 20, |r, c| ((r * 7 + c * 3) % 11) as f64 + 0.5).unwrap();
    let test = RadianceImage::from_fn(20, 20, |r, c| ((r * 7 + c * 5) % 13) as f64 * 0.9 + 0.4).unwrap();
    let scale = |img: &RadianceImage, k: f64| {
        RadianceImage::new(20, 20, 1, img.data().iter().map(|v| v * k).collect()).unwrap()
    };
    for norm in [Normalization::Max, Normalization::Mean] {
        let a = fidelity_metrics(&reference, &test, norm).unwrap();
        let b = fidelity_metrics(&scale(&reference, 1e3), &scale(&test, 1e3), norm).unwrap();
        assert!((a.psnr - b.psnr).abs() < 1e-9);
        assert!((a.psnr_gamma - b.psnr_gamma).abs() < 1e-9);
        assert!((a.ssim - b.ssim).abs() < 1e-9);
    }
    // under mean normalization values above the mean clip to 1
    let m = fidelity_metrics(&reference, &scale(&reference, 1.0), Normalization::Mean).unwrap();
    assert_eq!(m.psnr, grrhdr::analyze::metrics::PSNR_CAP);
}
