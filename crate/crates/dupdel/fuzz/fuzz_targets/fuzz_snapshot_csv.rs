#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Must never panic; accepted inputs must round-trip bit-for-bit.
    if let Ok(snapshots) = dupdel::formats::snapshots_from_csv(text) {
        let emitted = dupdel::formats::snapshots_to_csv(&snapshots);
        let reparsed = dupdel::formats::snapshots_from_csv(&emitted)
            .expect("writer output must parse");
        assert_eq!(reparsed, snapshots);
    }
});
