#![no_main]

use grrhdr::io::{decode_measurement, MeasurementFiles};
use libfuzzer_sys::fuzz_target;

// Two little-endian u16 lengths split the input into the PGM, the mask and
// the sidecar.
fuzz_target!(|data: &[u8]| {
    if data.len() < 4 {
        return;
    }
    let a = u16::from_le_bytes([data[0], data[1]]) as usize;
    let b = u16::from_le_bytes([data[2], data[3]]) as usize;
    let rest = &data[4..];
    let a = a.min(rest.len());
    let b = b.min(rest.len() - a);
    let files =
        MeasurementFiles { pgm: rest[..a].to_vec(), mask: rest[a..a + b].to_vec(), sidecar: rest[a + b..].to_vec() };
    let _ = decode_measurement(&files);
});
