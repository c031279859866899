use grrhdr::ablation::ScenarioFile;
use grrhdr::calib::{Entry, SparseSystemMatrix};
use grrhdr::io::{
    decode_matrix, decode_measurement, decode_pbm, decode_pfm, decode_pgm, encode_matrix, encode_measurement,
    encode_pbm, encode_pfm, encode_pgm, MeasurementFiles, MeasurementSidecar, OpticsInfo,
};
use grrhdr::{Measurement, PermutationMap, RadianceImage, ShutterProfile};
use proptest::prelude::*;

fn image_strategy() -> impl Strategy<Value = RadianceImage> {
    (1usize..9, 1usize..9, prop::sample::select(vec![1usize, 3]))
        .prop_flat_map(|(w, h, c)| {
            (Just(w), Just(h), Just(c), prop::collection::vec(prop::num::f32::NORMAL | prop::num::f32::ZERO, w * h * c))
        })
        .prop_map(|(w, h, c, v)| RadianceImage::new(w, h, c, v.into_iter().map(f64::from).collect()).unwrap())
}

proptest! {
    #[test]
    fn pfm_roundtrip(img in image_strategy()) {
        prop_assert_eq!(decode_pfm(&encode_pfm(&img)).unwrap(), img);
    }

    #[test]
    fn pgm_roundtrip((w, h, v) in (1usize..20, 1usize..20).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<u16>(), w * h)))) {
        let (dw, dh, _, dv) = decode_pgm(&encode_pgm(w, h, &v)).unwrap();
        prop_assert_eq!((dw, dh, dv), (w, h, v));
    }

    #[test]
    fn pbm_roundtrip((w, h, v) in (1usize..30, 1usize..10).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(any::<bool>(), w * h)))) {
        prop_assert_eq!(decode_pbm(&encode_pbm(w, h, &v)).unwrap(), (w, h, v));
    }

    #[test]
    fn matrix_roundtrip(n in 1usize..40, seed in any::<u64>(), extra in prop::collection::vec((0u32..40, 0u32..40, 1e-6f64..1e6), 0..20), bad in prop::collection::vec(0u32..40, 0..4)) {
        let map = PermutationMap::random(n, seed).unwrap();
        let invalid: Vec<u32> = bad.into_iter().filter(|&p| (p as usize) < n).collect();
        let mut entries: Vec<Entry> = map.forward().iter().enumerate()
            .map(|(k, &s)| Entry { sensor: s, scene: k as u32, flux: 1.0 + k as f64 })
            .collect();
        entries.extend(extra.into_iter().filter(|&(s, k, _)| (s as usize) < n && (k as usize) < n)
            .map(|(s, k, flux)| Entry { sensor: s, scene: k, flux }));
        entries.retain(|e| !invalid.contains(&e.sensor));
        entries.sort_by_key(|e| (e.scene, e.sensor));
        entries.dedup_by_key(|e| (e.scene, e.sensor));
        let m = SparseSystemMatrix::new(n, n, entries, invalid).unwrap();
        prop_assert_eq!(decode_matrix(&encode_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn measurement_roundtrip(
        (w, h, dn) in (1usize..12, 1usize..12).prop_flat_map(|(w, h)| (Just(w), Just(h), prop::collection::vec(0u16..1024, w * h))),
        low in prop::option::of(0u16..50),
        extra in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let erase: Vec<bool> = (0..w * h).map(|i| (extra >> (i % 64)) & 1 == 1).collect();
        let m = Measurement::new(w, h, 10, low, dn).unwrap().with_extra_erasures(&erase).unwrap();
        let mut sidecar = MeasurementSidecar::describe(&m);
        sidecar.shutter = Some(ShutterProfile::grr(1e-3, 2e-5, h).unwrap());
        sidecar.optics = Some(OpticsInfo::Shuffle { seed });
        let files = encode_measurement(&m, &sidecar);
        let (back, meta) = decode_measurement(&files).unwrap();
        prop_assert_eq!(back, m);
        prop_assert_eq!(meta, sidecar);
    }

    #[test]
    fn decoders_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
        let _ = decode_pfm(&bytes);
        let _ = decode_pgm(&bytes);
        let _ = decode_pbm(&bytes);
        let _ = decode_matrix(&bytes);
        let _ = ScenarioFile::parse(&bytes);
        let files = MeasurementFiles { pgm: bytes.clone(), mask: bytes.clone(), sidecar: bytes };
        let _ = decode_measurement(&files);
    }

    #[test]
    fn headers_with_garbage_tails_never_panic(tail in prop::collection::vec(any::<u8>(), 0..64), w in 0usize..1 << 20, h in 0usize..1 << 20) {
        for header in [
            format!("Pf\n{w} {h}\n-1.0\n"),
            format!("PF\n{w} {h}\n1.0\n"),
            format!("P5\n{w} {h}\n65535\n"),
            format!("P4\n{w} {h}\n"),
        ] {
            let mut bytes = header.into_bytes();
            bytes.extend_from_slice(&tail);
            let _ = decode_pfm(&bytes);
            let _ = decode_pgm(&bytes);
            let _ = decode_pbm(&bytes);
        }
    }
}

#[test]
fn pfm_layout() {
    let img = RadianceImage::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let bytes = encode_pfm(&img);
    let header = b"Pf\n2 2\n-1.0\n";
    assert_eq!(&bytes[..header.len()], header);
    let body: Vec<f32> = bytes[header.len()..].chunks(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    // bottom row first
    assert_eq!(body, vec![3.0, 4.0, 1.0, 2.0]);
}

#[test]
fn pgm_is_big_endian_sixteen_bit() {
    let bytes = encode_pgm(2, 1, &[0x0102, 0xfffe]);
    assert!(bytes.starts_with(b"P5\n2 1\n65535\n"));
    assert_eq!(&bytes[bytes.len() - 4..], &[1, 2, 0xff, 0xfe]);
}

#[test]
fn truncated_files_rejected() {
    let img = RadianceImage::new(3, 2, 3, vec![0.5; 18]).unwrap();
    let pfm = encode_pfm(&img);
    assert!(decode_pfm(&pfm[..pfm.len() - 1]).is_err());
    let pgm = encode_pgm(3, 2, &[1; 6]);
    assert!(decode_pgm(&pgm[..pgm.len() - 1]).is_err());
    let m = SparseSystemMatrix::from_permutation(&PermutationMap::random(9, 1).unwrap(), 2.0).unwrap();
    let ssm = encode_matrix(&m);
    assert!(decode_matrix(&ssm[..ssm.len() - 1]).is_err());
    let mut wrong_magic = ssm.clone();
    wrong_magic[0] = b'X';
    assert!(decode_matrix(&wrong_magic).is_err());
}
