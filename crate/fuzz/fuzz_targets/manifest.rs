#![no_main]

use grrhdr_cli::commands::Command;
use grrhdr_cli::manifest::RunManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = RunManifest::from_json(data) {
        let _ = Command::from_manifest(&m);
    }
});
