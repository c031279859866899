use grrhdr::calib::{
    bayer_split, build_matrix, forward_mosaic, reassemble, synthetic_stacks, CalibrationConfig, CfaPhase, Entry,
    ExposureStack, SparseSystemMatrix,
};
use grrhdr::sensor::quantize_value;
use grrhdr::solver::{CalibratedOperator, SystemOperator};
use grrhdr::{Measurement, PermutationMap, RadianceImage, SensorConfig, ShutterProfile};
use proptest::prelude::*;

const BRACKET: [f64; 5] = [0.08, 0.09, 0.10, 0.11, 0.12];

#[test]
fn noiseless_permutation_recovered_exactly() {
    for seed in 0..5 {
        let optics = PermutationMap::random(48, seed).unwrap();
        let sensor = SensorConfig::new(8, 1000.0, 0.0, 0).unwrap();
        let stacks = synthetic_stacks(&optics, 8, &sensor, &BRACKET, None).unwrap();
        let m = build_matrix(&stacks, 48, &[], &CalibrationConfig::default()).unwrap();
        assert!(m.invalid_pixels().is_empty());
        for k in 0..48 {
            let col = m.column(k);
            assert_eq!(col.len(), 1, "column {k}");
            assert_eq!(col[0].sensor as usize, optics.sensor_of(k));
            assert!((col[0].flux - 1000.0).abs() <= 1e-9 * 1000.0, "flux {}", col[0].flux);
        }
    }
}

#[test]
fn hot_pixel_is_invalidated() {
    let optics = PermutationMap::random(16, 3).unwrap();
    let sensor = SensorConfig::new(8, 1000.0, 0.0, 0).unwrap();
    let stacks = synthetic_stacks(&optics, 4, &sensor, &BRACKET, None).unwrap();
    let mut dark = vec![0u16; 16];
    dark[5] = 9;
    let dark = [Measurement::new(4, 4, 8, None, dark).unwrap()];
    let m = build_matrix(&stacks, 16, &dark, &CalibrationConfig::default()).unwrap();
    assert_eq!(m.invalid_pixels(), &[5]);
    assert!(m.entries().iter().all(|e| e.sensor != 5));
    assert!(m.column(optics.scene_of(5)).is_empty());
}

#[test]
fn missing_source_reported() {
    let optics = PermutationMap::random(16, 3).unwrap();
    let sensor = SensorConfig::new(8, 1000.0, 0.0, 0).unwrap();
    let mut stacks = synthetic_stacks(&optics, 4, &sensor, &BRACKET, None).unwrap();
    stacks.remove(7);
    match build_matrix(&stacks, 16, &[], &CalibrationConfig::default()) {
        Err(grrhdr::Error::IncompleteCalibration(missing)) => assert_eq!(missing, vec![7]),
        other => panic!("unexpected {other:?}"),
    }
}

/// One source with a bright main spot and crosstalk at several levels.
#[test]
fn weak_entries_fall_below_the_floor() {
    let times = [1.0, 2.0, 3.0, 4.0];
    let levels = [200.0, 20.0, 5.0, 0.9];
    let frames: Vec<Measurement> = times
        .iter()
        .map(|&t| {
            let dn = levels.iter().map(|l| quantize_value(l * t / 4.0 * 1.2, 255)).collect();
            Measurement::new(4, 1, 8, None, dn).unwrap()
        })
        .collect();
    let stack = ExposureStack::new(0, times.to_vec(), frames).unwrap();
    for floor in [1e-3, 0.05, 0.2] {
        let config = CalibrationConfig { sparsity_floor: floor, ..CalibrationConfig::default() };
        let m = build_matrix(std::slice::from_ref(&stack), 1, &[], &config).unwrap();
        let peak = m.entries().iter().map(|e| e.flux).fold(0.0, f64::max);
        assert!(m.entries().iter().all(|e| e.flux >= floor * peak));
        assert!(m.entries().iter().any(|e| e.sensor == 0));
    }
}

#[test]
fn mosaic_operator_is_the_plane_operators_stacked() {
    let optics = PermutationMap::random(64, 12).unwrap();
    let matrix = SparseSystemMatrix::new(
        64,
        64,
        optics
            .forward()
            .iter()
            .enumerate()
            .map(|(k, &s)| Entry { sensor: s, scene: k as u32, flux: 40.0 + k as f64 })
            .collect(),
        [],
    )
    .unwrap();
    let shutter = ShutterProfile::grr(0.5, 0.2, 8).unwrap();
    let scene = RadianceImage::new(8, 8, 3, (0..192).map(|i| 0.1 + (i % 17) as f64 / 20.0).collect()).unwrap();
    let sensor = SensorConfig::new(12, 1.0, 0.0, 0).unwrap();
    let mosaic = forward_mosaic(&scene, &matrix, &shutter, 8, &sensor, CfaPhase::Rggb, None).unwrap();
    let planes = bayer_split(&mosaic, &shutter, &matrix, CfaPhase::Rggb).unwrap();
    assert_eq!(reassemble(&planes), mosaic);

    let channels = scene.planes();
    let x: Vec<f64> = channels.concat();
    let problem = grrhdr::solver::InverseProblem::mosaic(&planes, 8, 8, Default::default()).unwrap();
    let mut stacked = vec![0.0; 64];
    problem.operator().apply(&x, &mut stacked);

    let mut offset = 0;
    for plane in planes.planes() {
        let op = SystemOperator::Calibrated(CalibratedOperator::new(&plane.matrix, &plane.shutter, 4).unwrap());
        let mut y = vec![0.0; 16];
        op.apply(&channels[plane.channel.index()], &mut y);
        assert_eq!(&stacked[offset..offset + 16], &y[..]);
        let dn: Vec<u16> = y.iter().map(|&v| quantize_value(v, 4095)).collect();
        assert_eq!(plane.measurement.dn(), &dn[..]);
        offset += 16;
    }
}

proptest! {
    #[test]
    fn split_then_reassemble_is_identity(
        half_w in 1usize..6,
        half_h in 1usize..6,
        seed in any::<u64>(),
        phase in prop::sample::select(vec![CfaPhase::Rggb, CfaPhase::Bggr, CfaPhase::Grbg, CfaPhase::Gbrg]),
    ) {
        let (w, h) = (2 * half_w, 2 * half_h);
        let n = w * h;
        let dn: Vec<u16> = (0..n).map(|i| ((i as u64).wrapping_mul(seed | 1) % 256) as u16).collect();
        let m = Measurement::new(w, h, 8, Some(3), dn).unwrap();
        let matrix = SparseSystemMatrix::from_permutation(&PermutationMap::random(n, seed).unwrap(), 2.0).unwrap();
        let shutter = ShutterProfile::grr(1.0, 0.5, h).unwrap();
        let planes = bayer_split(&m, &shutter, &matrix, phase).unwrap();
        prop_assert_eq!(planes.planes().iter().map(|p| p.matrix.entries().len()).sum::<usize>(), n);
        prop_assert_eq!(reassemble(&planes), m);
    }
}
