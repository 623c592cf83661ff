//! Seeded generators for randomized checks.
//!
//! Every randomized suite in this crate derives its cases from a caller
//! supplied `u64` seed through ChaCha8, so failures are reproducible by
//! re-running with the same seed. The generators deliberately stay small:
//! states with support up to 20 sites and at most 3 baskets per site are
//! enough to exercise every interaction the dynamics can produce.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::minplus::MinPlus;
use crate::state::{Configuration, SiteState, Token};

/// The stream used by all randomized suites.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random configuration with at most `max_support` sites and `max_baskets`
/// baskets per site. Ball counts respect the per-site bound c <= b + 1, so
/// every draw is a valid state.
pub fn random_configuration(
    rng: &mut ChaCha8Rng,
    max_support: usize,
    max_baskets: u32,
) -> Configuration {
    let support = rng.gen_range(1..=max_support.max(1));
    let sites = (0..support)
        .map(|_| {
            let baskets = rng.gen_range(0..=max_baskets);
            let balls = rng.gen_range(0..=baskets + 1);
            SiteState::from_counts(baskets, balls).expect("bounds respected")
        })
        .collect();
    Configuration::new(0, sites).normalized()
}

/// Random basic slow soliton of at most `max_len` tokens. The letter after
/// an F is always a B token, which rules out the forbidden FF and FU pairs;
/// a lone F would classify as fast, so the single-token case draws from
/// {B, U} only.
pub fn random_slow_tokens(rng: &mut ChaCha8Rng, max_len: usize, max_amplitude: u32) -> Vec<Token> {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut tokens = Vec::with_capacity(len);
    for i in 0..len {
        let last = i + 1 == len;
        let amp = rng.gen_range(1..=max_amplitude.max(1));
        let after_f = matches!(tokens.last(), Some(Token::Ball));
        let choice = if after_f {
            0
        } else if len == 1 || last {
            // A trailing F is fine, but "F" alone is a fast soliton.
            rng.gen_range(if len == 1 { 0..=1 } else { 0..=2 })
        } else {
            rng.gen_range(0..=2)
        };
        tokens.push(match choice {
            0 => Token::Baskets(amp),
            1 => Token::BallWithBaskets(amp),
            _ => Token::Ball,
        });
    }
    tokens
}

/// Positive rational with numerator and denominator in [1, 1000].
pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(1..=1000);
    let den: i64 = rng.gen_range(1..=1000);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Finite tropical weight in [-20, 20].
pub fn random_tropical(rng: &mut ChaCha8Rng) -> MinPlus {
    MinPlus::Finite(rng.gen_range(-20..=20))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::{classify_basic, Classification};

    #[test]
    fn same_seed_same_stream() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..50 {
            assert_eq!(
                random_configuration(&mut a, 20, 3),
                random_configuration(&mut b, 20, 3)
            );
        }
    }

    #[test]
    fn configurations_respect_bounds() {
        let mut r = rng(11);
        for _ in 0..500 {
            let c = random_configuration(&mut r, 20, 3);
            assert!(c.sites.len() <= 20);
            for site in &c.sites {
                assert!(site.baskets() <= 3);
                assert!(site.balls() <= site.baskets() + 1);
            }
        }
    }

    #[test]
    fn slow_tokens_classify_slow() {
        let mut r = rng(13);
        for _ in 0..500 {
            let tokens = random_slow_tokens(&mut r, 6, 4);
            assert!(!tokens.is_empty() && tokens.len() <= 6);
            assert_eq!(classify_basic(&tokens), Ok(Classification::Slow));
        }
    }

    #[test]
    fn rationals_are_positive_and_bounded() {
        let mut r = rng(17);
        for _ in 0..200 {
            let q = random_rational(&mut r);
            assert!(q > BigRational::from(BigInt::from(0)));
            assert!(q <= BigRational::from(BigInt::from(1000)));
        }
    }
}
