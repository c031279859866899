#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = grrhdr::io::decode_pfm(data) {
        // anything that decodes must survive a roundtrip
        let again = grrhdr::io::decode_pfm(&grrhdr::io::encode_pfm(&img)).expect("re-encoded PFM decodes");
        assert_eq!(again.width(), img.width());
        assert_eq!(again.height(), img.height());
    }
});
