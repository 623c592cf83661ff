#![no_main]

use bbbs::state::{BoxBallConfiguration, Configuration};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(c) = serde_json::from_str::<Configuration>(data) {
        let text = serde_json::to_string(&c).unwrap();
        let again: Configuration = serde_json::from_str(&text).unwrap();
        assert_eq!(again, c);
    }
    if let Ok(line) = serde_json::from_str::<BoxBallConfiguration>(data) {
        // The decoder must never hand back anything but bits.
        assert!(line.cells.iter().all(|&cell| cell <= 1));
        let text = serde_json::to_string(&line).unwrap();
        let again: BoxBallConfiguration = serde_json::from_str(&text).unwrap();
        assert_eq!(again, line);
    }
});
