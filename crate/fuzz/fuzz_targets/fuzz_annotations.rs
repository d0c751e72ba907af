#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // Accepted tracks must survive a serialize/parse round trip.
        if let Ok(track) = pulseline::ingest::annotations::parse(text) {
            let again = pulseline::ingest::annotations::parse(&track.to_jsonl())
                .expect("round trip of an accepted track");
            assert_eq!(track, again);
        }
    }
});
