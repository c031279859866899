#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((w, h, _, values)) = grrhdr::io::decode_pgm(data) {
        assert_eq!(values.len(), w * h);
    }
});
