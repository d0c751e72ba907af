#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Errors are expected on arbitrary bytes; panics are not.
    let _ = pulseline::ingest::ppm::decode(data);
});
