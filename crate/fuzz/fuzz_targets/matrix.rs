#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = grrhdr::io::decode_matrix(data) {
        assert_eq!(grrhdr::io::decode_matrix(&grrhdr::io::encode_matrix(&m)).unwrap(), m);
    }
});
