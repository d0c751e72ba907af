//! Raw video container: sidecar JSON on the first line, frame payload after.
//! Parsing and decoding must never panic, over-allocate, or overflow on
//! arbitrary bytes.
#![no_main]
use libfuzzer_sys::fuzz_target;
use pulseline::ingest::rgbv;

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == b'\n') else {
        let _ = rgbv::Sidecar::parse(data);
        return;
    };
    let (header, payload) = (&data[..split], &data[split + 1..]);
    if let Ok(sidecar) = rgbv::Sidecar::parse(header) {
        let _ = rgbv::decode_frames(payload, &sidecar);
    }
});
