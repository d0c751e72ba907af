//! Replays the checked-in fuzz corpus seeds through the same entry points
//! the fuzz targets call, so `cargo test` keeps the seeds and the
//! round-trip assertions honest without a nightly toolchain.

use pulseline::ingest::{annotations, e4, pngio, ppm, rgbv};
use std::fs;
use std::path::PathBuf;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("corpus dir {}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds for {target}");
    seeds
}

#[test]
fn rgbv_seeds_do_not_panic() {
    for (_, data) in corpus("fuzz_rgbv") {
        match data.iter().position(|&b| b == b'\n') {
            None => {
                let _ = rgbv::Sidecar::parse(&data);
            }
            Some(split) => {
                if let Ok(sidecar) = rgbv::Sidecar::parse(&data[..split]) {
                    let _ = rgbv::decode_frames(&data[split + 1..], &sidecar);
                }
            }
        }
    }
}

#[test]
fn ppm_seeds_do_not_panic() {
    let mut decoded = 0;
    for (_, data) in corpus("fuzz_ppm") {
        if ppm::decode(&data).is_ok() {
            decoded += 1;
        }
    }
    assert!(decoded >= 1, "at least one seed should be a valid image");
}

#[test]
fn png_seeds_do_not_panic() {
    let mut decoded = 0;
    for (_, data) in corpus("fuzz_png") {
        if pngio::decode(&data).is_ok() {
            decoded += 1;
        }
    }
    assert!(decoded >= 1);
}

#[test]
fn annotation_seeds_round_trip_when_accepted() {
    for (path, data) in corpus("fuzz_annotations") {
        let Ok(text) = std::str::from_utf8(&data) else {
            continue;
        };
        if let Ok(track) = annotations::parse(text) {
            let again = annotations::parse(&track.to_jsonl())
                .unwrap_or_else(|e| panic!("{}: round trip failed: {e}", path.display()));
            assert_eq!(track, again);
        }
    }
}

#[test]
fn e4_seeds_do_not_panic() {
    for (_, data) in corpus("fuzz_e4_csv") {
        if let Ok(text) = std::str::from_utf8(&data) {
            let _ = e4::parse_sampled_csv(text, "BVP.csv");
            let _ = e4::parse_ibi_csv(text);
        }
    }
}

#[test]
fn scli_seeds_round_trip_when_accepted() {
    for (_, data) in corpus("fuzz_scli_csv") {
        if let Ok(text) = std::str::from_utf8(&data) {
            if let Ok(scli) = pulseline::scli::parse_scli_csv(text) {
                let again =
                    pulseline::scli::parse_scli_csv(&pulseline::scli::write_scli_csv(&scli))
                        .unwrap();
                assert_eq!(scli, again);
            }
            let _ = pulseline::scli::parse_channels_csv(text);
        }
    }
}

#[test]
fn pulse_seeds_do_not_panic() {
    for (_, data) in corpus("fuzz_pulse_csv") {
        if let Ok(text) = std::str::from_utf8(&data) {
            let _ = pulseline::pulse::parse_pulse_csv(text);
        }
    }
}
