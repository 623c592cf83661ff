#![no_main]

use bbbs::state::parse_word;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(tokens) = parse_word(data) {
        assert!(!tokens.is_empty());
    }
});
