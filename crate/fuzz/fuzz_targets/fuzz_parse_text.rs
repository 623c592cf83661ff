#![no_main]

use bbbs::evolve::evolve;
use bbbs::minplus::MinPlus;
use bbbs::state::Configuration;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = s.parse::<Configuration>() {
        // Whatever parses must round-trip through its own rendering.
        let again: Configuration = c.to_string().parse().unwrap();
        assert_eq!(again, c);
        // Small states get one evolution step; ball count is conserved.
        if c.sites.len() <= 64 && c.ball_count() <= 64 {
            let next = evolve(&c, MinPlus::Infinity).unwrap();
            assert_eq!(next.ball_count(), c.ball_count());
        }
    }
});
