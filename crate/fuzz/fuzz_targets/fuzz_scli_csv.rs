#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(scli) = pulseline::scli::parse_scli_csv(text) {
            let again = pulseline::scli::parse_scli_csv(&pulseline::scli::write_scli_csv(&scli))
                .expect("round trip of an accepted signal");
            assert_eq!(scli, again);
        }
        let _ = pulseline::scli::parse_channels_csv(text);
    }
});
