#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((w, h, bits)) = grrhdr::io::decode_pbm(data) {
        assert_eq!(grrhdr::io::decode_pbm(&grrhdr::io::encode_pbm(w, h, &bits)).unwrap(), (w, h, bits));
    }
});
