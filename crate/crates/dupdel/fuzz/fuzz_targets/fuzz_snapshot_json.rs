#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(snapshots) = dupdel::formats::snapshots_from_json(text) {
        let emitted = dupdel::formats::snapshots_to_json(&snapshots).unwrap();
        let reparsed = dupdel::formats::snapshots_from_json(&emitted)
            .expect("writer output must parse");
        assert_eq!(reparsed, snapshots);
    }
});
