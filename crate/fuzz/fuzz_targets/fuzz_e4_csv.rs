#![no_main]
use libfuzzer_sys::fuzz_target;
use pulseline::ingest::e4;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = e4::parse_sampled_csv(text, "BVP.csv");
        let _ = e4::parse_ibi_csv(text);
    }
});
