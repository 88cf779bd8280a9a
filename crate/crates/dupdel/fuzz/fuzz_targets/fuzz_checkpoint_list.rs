#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(checkpoints) = dupdel::formats::parse_checkpoint_list(text) {
        // Postconditions of a successful parse.
        assert!(!checkpoints.is_empty());
        assert!(checkpoints.iter().all(|&c| c >= 1));
        assert!(checkpoints.windows(2).all(|w| w[0] < w[1]));
        // A canonical re-rendering must parse to the same list.
        let rendered = checkpoints
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        assert_eq!(
            dupdel::formats::parse_checkpoint_list(&rendered).unwrap(),
            checkpoints
        );
    }
});
