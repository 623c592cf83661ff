//! Soliton recognition, decomposition, and conserved counts.
//!
//! A basic soliton is either a run of consecutive balls (fast, speed equal
//! to its length capped by the carrier capacity) or any vacuum-free token
//! string avoiding the subsequences FF and FU (slow, speed 1 under every
//! evolution).  States that have separated into basic solitons decompose
//! uniquely; slow solitons cut further into chunks whose pure limits give
//! the conserved soliton counts and amplitudes.  The unbasketing projection
//! onto the plain box-ball system lives here too.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minplus::MinPlus;
use crate::state::{BoxBallConfiguration, Configuration, Token};

/// Why a vacuum-free token string fails to be a basic soliton.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotBasicReason {
    /// Two consecutive balls inside a string with basket support.
    ConsecutiveFf,
    /// A ball immediately left of a filled basket site.
    ConsecutiveFu,
    /// The empty string.
    Empty,
}

impl fmt::Display for NotBasicReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotBasicReason::ConsecutiveFf => write!(f, "contains FF"),
            NotBasicReason::ConsecutiveFu => write!(f, "contains FU"),
            NotBasicReason::Empty => write!(f, "empty token string"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Fast(u32),
    Slow,
    NotBasic(NotBasicReason),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("solitons are vacuum-free, token string contains V")]
    ContainsVacuum,
}

/// Classifies a vacuum-free token string.
///
/// `F^k` is fast with speed `min(l,k)`; a lone F is reported `Fast(1)`,
/// which fits the same speed law.  Every other string over F, B, U is slow
/// exactly when it avoids consecutive FF and FU.
pub fn classify_basic(tokens: &[Token]) -> Result<Classification, ClassifyError> {
    if tokens.iter().any(|t| *t == Token::Vacuum) {
        return Err(ClassifyError::ContainsVacuum);
    }
    if tokens.is_empty() {
        return Ok(Classification::NotBasic(NotBasicReason::Empty));
    }
    if tokens.iter().all(|t| *t == Token::Ball) {
        return Ok(Classification::Fast(tokens.len() as u32));
    }
    for pair in tokens.windows(2) {
        if pair[0] != Token::Ball {
            continue;
        }
        match pair[1] {
            Token::Ball => return Ok(Classification::NotBasic(NotBasicReason::ConsecutiveFf)),
            Token::BallWithBaskets(_) => {
                return Ok(Classification::NotBasic(NotBasicReason::ConsecutiveFu))
            }
            _ => {}
        }
    }
    Ok(Classification::Slow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonKind {
    Fast(u32),
    Slow,
}

/// One basic soliton sitting at an absolute lattice position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolitonDescriptor {
    pub kind: SolitonKind,
    pub tokens: Vec<Token>,
    /// Index of the leftmost letter.
    pub position: i64,
}

impl SolitonDescriptor {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// First index strictly right of the soliton.
    pub fn end(&self) -> i64 {
        self.position + self.tokens.len() as i64
    }

    /// Speed under the evolution with the given carrier capacity.
    pub fn speed_under(&self, capacity: MinPlus) -> u32 {
        match self.kind {
            SolitonKind::Fast(k) => MinPlus::from(k)
                .min(capacity)
                .expect_finite("fast soliton speed is finite")
                as u32,
            SolitonKind::Slow => 1,
        }
    }

    /// Speed under the unbounded evolution.
    pub fn speed(&self) -> u32 {
        self.speed_under(MinPlus::Infinity)
    }
}

impl fmt::Display for SolitonDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SolitonKind::Fast(k) => write!(f, "Fast({k}) @{}", self.position),
            SolitonKind::Slow => {
                write!(f, "Slow(")?;
                for (i, t) in self.tokens.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ") @{}", self.position)
            }
        }
    }
}

/// A state fully separated into basic solitons, left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub solitons: Vec<SolitonDescriptor>,
}

impl Decomposition {
    /// Vacuum run lengths between consecutive solitons.
    pub fn gaps(&self) -> Vec<i64> {
        self.solitons
            .windows(2)
            .map(|w| w[1].position - w[0].end())
            .collect()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.solitons.is_empty() {
            return write!(f, "vacuum");
        }
        for (i, s) in self.solitons.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Splits a state at maximal vacuum runs and checks that every block is a
/// basic soliton with enough separation to propagate freely.
///
/// Adjacent solitons need at least as many vacuum sites between them as the
/// larger of their two unbounded speeds.  `None` means the state has not
/// (or not yet) separated; evolving further is the usual response.
pub fn decompose(config: &Configuration) -> Option<Decomposition> {
    let mut solitons = Vec::new();
    let mut block: Vec<Token> = Vec::new();
    let mut block_start = 0i64;
    let flush = |block: &mut Vec<Token>, start: i64, out: &mut Vec<SolitonDescriptor>| {
        if block.is_empty() {
            return true;
        }
        let kind = match classify_basic(block) {
            Ok(Classification::Fast(k)) => SolitonKind::Fast(k),
            Ok(Classification::Slow) => SolitonKind::Slow,
            _ => return false,
        };
        out.push(SolitonDescriptor {
            kind,
            tokens: std::mem::take(block),
            position: start,
        });
        true
    };
    for (i, site) in config.sites.iter().enumerate() {
        let at = config.origin + i as i64;
        if site.is_vacuum() {
            if !flush(&mut block, block_start, &mut solitons) {
                return None;
            }
            continue;
        }
        let Some(token) = site.token() else {
            // A site with two or more balls occurs only mid-collision.
            return None;
        };
        if block.is_empty() {
            block_start = at;
        }
        block.push(token);
    }
    if !flush(&mut block, block_start, &mut solitons) {
        return None;
    }
    for pair in solitons.windows(2) {
        let needed = pair[0].speed().max(pair[1].speed()) as i64;
        if pair[1].position - pair[0].end() < needed {
            return None;
        }
    }
    Some(Decomposition { solitons })
}

/// One chunk of a slow soliton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub tokens: Vec<Token>,
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// Cuts a slow soliton into its unique chunk sequence.
///
/// Chunks are basket runs `B+`, lone balls `F`, and filled-basket runs
/// `U+` optionally headed by one basket site and optionally closed by one
/// ball, `[B] U+ [F]`.  A basket immediately left of a U-run heads that
/// run's chunk; the letter after a chunk is never part of it.  Headless
/// U-run chunks only occur against the vacuum at the soliton's left edge.
pub fn chunk_decompose(tokens: &[Token]) -> Vec<Chunk> {
    assert_eq!(
        classify_basic(tokens),
        Ok(Classification::Slow),
        "chunk_decompose takes a slow soliton"
    );
    let is_u = |t: &Token| matches!(t, Token::BallWithBaskets(_));
    let is_b = |t: &Token| matches!(t, Token::Baskets(_));
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            Token::Ball => {
                chunks.push(Chunk {
                    tokens: vec![Token::Ball],
                });
                i += 1;
            }
            Token::BallWithBaskets(_) => {
                let start = i;
                while i < tokens.len() && is_u(&tokens[i]) {
                    i += 1;
                }
                if i < tokens.len() && tokens[i] == Token::Ball {
                    i += 1;
                }
                chunks.push(Chunk {
                    tokens: tokens[start..i].to_vec(),
                });
            }
            Token::Baskets(_) => {
                let start = i;
                while i < tokens.len() && is_b(&tokens[i]) {
                    i += 1;
                }
                if i < tokens.len() && is_u(&tokens[i]) {
                    // The run's last basket heads the U-chunk; the rest, if
                    // any, form a plain basket run.
                    let head = i - 1;
                    if head > start {
                        chunks.push(Chunk {
                            tokens: tokens[start..head].to_vec(),
                        });
                    }
                    while i < tokens.len() && is_u(&tokens[i]) {
                        i += 1;
                    }
                    if i < tokens.len() && tokens[i] == Token::Ball {
                        i += 1;
                    }
                    chunks.push(Chunk {
                        tokens: tokens[head..i].to_vec(),
                    });
                } else {
                    chunks.push(Chunk {
                        tokens: tokens[start..i].to_vec(),
                    });
                }
            }
            Token::Vacuum => unreachable!("slow solitons are vacuum-free"),
        }
    }
    chunks
}

/// A pure soliton: a ball train or a run of lone baskets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PureSoliton {
    Fast(u32),
    /// `Baskets(v)` counts as `v.len()` basket solitons with amplitudes `v`.
    Baskets(Vec<u32>),
}

/// The pure solitons a chunk sheds after sufficiently many scatterings
/// with fast solitons.
///
/// A `[B_a] U_{b_1} .. U_{b_r} [F]` chunk frees one ball per U plus one for
/// the trailing F, and melts its baskets into a single basket soliton of
/// amplitude `a + b_1 + .. + b_r`; a basket run survives unchanged; a lone
/// F is already pure.
pub fn pure_limit(chunk: &Chunk) -> Vec<PureSoliton> {
    let t = &chunk.tokens;
    assert!(!t.is_empty(), "chunks are never empty");
    if t.iter().all(|x| matches!(x, Token::Baskets(_))) {
        let amps = t
            .iter()
            .map(|x| match x {
                Token::Baskets(a) => *a,
                _ => unreachable!(),
            })
            .collect();
        return vec![PureSoliton::Baskets(amps)];
    }
    let mut rest = t.as_slice();
    let mut melted = 0u32;
    if let Token::Baskets(a) = rest[0] {
        melted += a;
        rest = &rest[1..];
    }
    let mut balls = 0u32;
    while let Some(Token::BallWithBaskets(b)) = rest.first() {
        melted += b;
        balls += 1;
        rest = &rest[1..];
    }
    if let Some(Token::Ball) = rest.first() {
        balls += 1;
        rest = &rest[1..];
    }
    assert!(rest.is_empty(), "not a chunk: {chunk}");
    let mut out = vec![PureSoliton::Fast(1); balls as usize];
    if melted > 0 {
        out.push(PureSoliton::Baskets(vec![melted]));
    }
    out
}

/// Conserved soliton counts and amplitude multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolitonCensus {
    pub ball_solitons: usize,
    pub basket_solitons: usize,
    /// Sorted with multiplicity.
    pub fast_amplitudes: Vec<u32>,
    /// Sorted with multiplicity.
    pub basket_amplitudes: Vec<u32>,
}

/// Counts ball and basket solitons with their amplitudes.
///
/// Each fast soliton is one ball soliton of its full length; each slow
/// soliton contributes the pure limits of its chunks.
pub fn count_solitons(decomposition: &Decomposition) -> SolitonCensus {
    let mut census = SolitonCensus::default();
    let mut add = |p: PureSoliton| match p {
        PureSoliton::Fast(k) => {
            census.ball_solitons += 1;
            census.fast_amplitudes.push(k);
        }
        PureSoliton::Baskets(amps) => {
            census.basket_solitons += amps.len();
            census.basket_amplitudes.extend(amps);
        }
    };
    for soliton in &decomposition.solitons {
        match soliton.kind {
            SolitonKind::Fast(k) => add(PureSoliton::Fast(k)),
            SolitonKind::Slow => {
                for chunk in chunk_decompose(&soliton.tokens) {
                    for pure in pure_limit(&chunk) {
                        add(pure);
                    }
                }
            }
        }
    }
    census.fast_amplitudes.sort_unstable();
    census.basket_amplitudes.sort_unstable();
    census
}

/// Structural roles inside one basic slow soliton.
///
/// Baskets are numbered 1..=basket_count from the tail (the leftmost site),
/// lower before upper within a site. Balls are indexed 1..=ball_count in
/// reading order. A ball in the tail site is the initial ball; every other
/// ball sits one site after at least one basket, and the highest-numbered
/// basket in that previous site is its special basket.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlowAnatomy {
    pub basket_count: u32,
    pub ball_count: u32,
    /// Index (1-based) of the initial ball, if the tail site holds one.
    pub initial_ball: Option<u32>,
    /// Pairs (special basket number, non-initial ball index), in order.
    pub pairing: Vec<(u32, u32)>,
    /// Site offset from the tail for each basket number, 1-based slot 0 unused.
    pub basket_offsets: Vec<i64>,
    /// Site offset from the tail for each ball index, likewise 1-based.
    pub ball_offsets: Vec<i64>,
}

impl SlowAnatomy {
    pub fn specials(&self) -> Vec<u32> {
        self.pairing.iter().map(|&(basket, _)| basket).collect()
    }

    pub fn is_special(&self, basket: u32) -> bool {
        self.pairing.iter().any(|&(b, _)| b == basket)
    }
}

/// Computes basket numbering, the initial ball, and special-basket pairing
/// for a basic slow soliton.
pub fn slow_anatomy(tokens: &[Token]) -> Result<SlowAnatomy, ClassifyError> {
    match classify_basic(tokens)? {
        Classification::Slow => {}
        other => panic!("slow_anatomy needs a slow soliton, got {other:?}"),
    }
    let mut anatomy = SlowAnatomy::default();
    anatomy.basket_offsets.push(0);
    anatomy.ball_offsets.push(0);
    let mut top_basket_before: Option<u32> = None;
    for (offset, token) in tokens.iter().enumerate() {
        let site = token.site();
        for _ in 0..site.baskets() {
            anatomy.basket_count += 1;
            anatomy.basket_offsets.push(offset as i64);
        }
        if site.balls() == 1 {
            anatomy.ball_count += 1;
            anatomy.ball_offsets.push(offset as i64);
            if offset == 0 {
                anatomy.initial_ball = Some(anatomy.ball_count);
            } else {
                let special = top_basket_before.expect("basic slow strings avoid FF and FU");
                anatomy.pairing.push((special, anatomy.ball_count));
            }
        }
        top_basket_before = (site.baskets() > 0).then_some(anatomy.basket_count);
    }
    Ok(anatomy)
}

/// Projects a state onto the plain box-ball system.
///
/// A site with b baskets and c balls becomes b+1 boxes with the first c
/// filled; vacuum sites become single empty boxes, so the cell lattice
/// starts at the same origin.
pub fn unbasket(config: &Configuration) -> BoxBallConfiguration {
    let mut cells = Vec::new();
    for site in &config.sites {
        let width = site.baskets() + 1;
        for k in 0..width {
            cells.push(u8::from(k < site.balls()));
        }
    }
    BoxBallConfiguration::new(config.origin, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{evolve, evolve_boxball};
    use crate::state::SiteState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(text: &str) -> Configuration {
        text.parse().unwrap()
    }

    fn toks(text: &str) -> Vec<Token> {
        cfg(text).sites.iter().map(|s| s.token().unwrap()).collect()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_basic(&toks("F F F")), Ok(Classification::Fast(3)));
        assert_eq!(classify_basic(&toks("F")), Ok(Classification::Fast(1)));
        assert_eq!(classify_basic(&toks("B1 U3 F")), Ok(Classification::Slow));
        assert_eq!(classify_basic(&toks("U2")), Ok(Classification::Slow));
        assert_eq!(
            classify_basic(&toks("F U2")),
            Ok(Classification::NotBasic(NotBasicReason::ConsecutiveFu))
        );
        assert_eq!(
            classify_basic(&toks("B2 F F B1")),
            Ok(Classification::NotBasic(NotBasicReason::ConsecutiveFf))
        );
        assert_eq!(
            classify_basic(&[Token::Vacuum]),
            Err(ClassifyError::ContainsVacuum)
        );
    }

    #[test]
    fn decompose_the_scattering_rows() {
        let last = cfg("V V V V V V V V V V U3 U1 V V V F F F");
        let d = decompose(&last).expect("final row is separated");
        assert_eq!(d.solitons.len(), 2);
        assert_eq!(d.solitons[0].kind, SolitonKind::Slow);
        assert_eq!(d.solitons[0].position, 10);
        assert_eq!(d.solitons[0].tokens, toks("U3 U1"));
        assert_eq!(d.solitons[1].kind, SolitonKind::Fast(3));
        assert_eq!(d.solitons[1].position, 15);
        assert_eq!(d.gaps(), vec![3]);
        assert_eq!(d.to_string(), "Slow(U3 U1) @10 + Fast(3) @15");

        // Mid-collision rows hold multi-ball sites.
        assert_eq!(decompose(&cfg("V V V V V V F U1 (2,3,2) F")), None);
        assert_eq!(decompose(&cfg("V V V V V V V V U2 (1,2,2) F F")), None);

        assert_eq!(decompose(&cfg("V")), Some(Decomposition::default()));
    }

    #[test]
    fn decompose_needs_room_to_fly() {
        // A fast triple one site behind a lone ball is still interacting.
        assert_eq!(decompose(&cfg("F F F V F")), None);
        assert!(decompose(&cfg("F F F V V V F")).is_some());
        // Speed-one neighbours only need one vacuum site.
        assert!(decompose(&cfg("F V F")).is_some());
    }

    #[test]
    fn chunk_examples() {
        let chunks = chunk_decompose(&toks("U10 B7 B8 U12 U9 F B9 F"));
        let shown: Vec<String> = chunks.iter().map(Chunk::to_string).collect();
        assert_eq!(shown, vec!["(U10)", "(B7)", "(B8 U12 U9 F)", "(B9)", "(F)"]);

        assert_eq!(
            chunk_decompose(&toks("B3")),
            vec![Chunk { tokens: toks("B3") }]
        );
        assert_eq!(
            chunk_decompose(&toks("B1 U3 F")),
            vec![Chunk {
                tokens: toks("B1 U3 F")
            }]
        );
    }

    #[test]
    fn chunking_is_the_unique_valid_cut() {
        // Every slow string over a tiny alphabet, all cuttings enumerated.
        let alphabet = [Token::Ball, Token::Baskets(1), Token::BallWithBaskets(1)];
        let is_u = |t: &Token| matches!(t, Token::BallWithBaskets(_));
        let is_b = |t: &Token| matches!(t, Token::Baskets(_));
        // Shape check for one chunk.
        let valid_chunk = |c: &[Token]| -> bool {
            if c.is_empty() {
                return false;
            }
            if c.iter().all(is_b) {
                return true;
            }
            if c == [Token::Ball] {
                return true;
            }
            let mut rest = c;
            if is_b(&rest[0]) {
                rest = &rest[1..];
            }
            let units = rest.iter().take_while(|t| is_u(t)).count();
            if units == 0 {
                return false;
            }
            rest = &rest[units..];
            rest.is_empty() || rest == [Token::Ball]
        };
        // Boundary rules: headless U-chunks only at the start, a chunk
        // ending in U must be followed by a basket head, basket runs are
        // maximal.
        let valid_cut = |parts: &[&[Token]]| -> bool {
            for (i, part) in parts.iter().enumerate() {
                if !valid_chunk(part) {
                    return false;
                }
                if i > 0 && is_u(&part[0]) {
                    return false;
                }
                let prev_all_b = i > 0 && parts[i - 1].iter().all(is_b);
                if prev_all_b && part.iter().all(is_b) {
                    return false;
                }
                if i > 0 && is_u(parts[i - 1].last().unwrap()) && !is_b(&part[0]) {
                    return false;
                }
            }
            true
        };
        let mut slow_strings = 0usize;
        for len in 1..=8usize {
            for code in 0..3usize.pow(len as u32) {
                let mut s = Vec::with_capacity(len);
                let mut c = code;
                for _ in 0..len {
                    s.push(alphabet[c % 3]);
                    c /= 3;
                }
                if classify_basic(&s) != Ok(Classification::Slow) {
                    continue;
                }
                slow_strings += 1;
                let mut cuts_found = 0usize;
                // Cut points as bitmask over the len-1 gaps.
                for mask in 0..(1usize << (len - 1)) {
                    let mut parts: Vec<&[Token]> = Vec::new();
                    let mut start = 0usize;
                    for gap in 0..len - 1 {
                        if mask & (1 << gap) != 0 {
                            parts.push(&s[start..=gap]);
                            start = gap + 1;
                        }
                    }
                    parts.push(&s[start..]);
                    if valid_cut(&parts) {
                        cuts_found += 1;
                        let scanner: Vec<Vec<Token>> =
                            chunk_decompose(&s).into_iter().map(|c| c.tokens).collect();
                        let this: Vec<Vec<Token>> = parts.iter().map(|p| p.to_vec()).collect();
                        assert_eq!(scanner, this, "string {s:?}");
                    }
                }
                assert_eq!(cuts_found, 1, "string {s:?}");
            }
        }
        assert!(slow_strings > 500, "enumeration covered {slow_strings}");
    }

    #[test]
    fn pure_limits() {
        let limit = |text: &str| pure_limit(&Chunk { tokens: toks(text) });
        assert_eq!(
            limit("B8 U12 U9 F"),
            vec![
                PureSoliton::Fast(1),
                PureSoliton::Fast(1),
                PureSoliton::Fast(1),
                PureSoliton::Baskets(vec![29])
            ]
        );
        assert_eq!(limit("F"), vec![PureSoliton::Fast(1)]);
        assert_eq!(limit("B2 B5 B1"), vec![PureSoliton::Baskets(vec![2, 5, 1])]);
        assert_eq!(
            limit("U10"),
            vec![PureSoliton::Fast(1), PureSoliton::Baskets(vec![10])]
        );
    }

    #[test]
    fn census_examples() {
        let census = |text: &str| count_solitons(&decompose(&cfg(text)).expect("separated"));
        let composite = census("U10 B7 B8 U12 U9 F B9 F");
        assert_eq!(composite.ball_solitons, 5);
        assert_eq!(composite.basket_solitons, 4);
        assert_eq!(composite.fast_amplitudes, vec![1, 1, 1, 1, 1]);
        assert_eq!(composite.basket_amplitudes, vec![7, 9, 10, 29]);

        let fast = census("F F F");
        assert_eq!((fast.ball_solitons, fast.basket_solitons), (1, 0));
        assert_eq!(fast.fast_amplitudes, vec![3]);

        let small = census("B1 U3 F");
        assert_eq!((small.ball_solitons, small.basket_solitons), (2, 1));
        assert_eq!(small.basket_amplitudes, vec![4]);
    }

    #[test]
    fn unbasket_worked_examples() {
        let cells = |text: &str| unbasket(&cfg(text)).normalized();
        assert_eq!(
            cells("(1,2,2) (2,4,3) (1,2,2)").to_string(),
            "1 1 0 1 1 1 0 0 1 1"
        );
        assert_eq!(
            cells("(2,1,0)(3,3,1)(2,3,2)(0,1,2)(0,0,1)(0,0,1)").to_string(),
            "@2 1 0 0 0 1 1 0 0 1 1 1 1"
        );
        assert_eq!(unbasket(&cfg("V")).cells, vec![0]);
        assert_eq!(unbasket(&cfg("F")).cells, vec![1]);
    }

    #[test]
    fn unbasketing_commutes_with_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b0b);
        for _ in 0..400 {
            let len = rng.gen_range(0..9usize);
            let sites: Vec<SiteState> = (0..len)
                .map(|_| {
                    let b = rng.gen_range(0..4u32);
                    let c = rng.gen_range(0..=b + 1);
                    SiteState::from_counts(b, c).unwrap()
                })
                .collect();
            let config = Configuration::new(rng.gen_range(-5..6), sites);
            let evolved_then_flattened =
                unbasket(&evolve(&config, MinPlus::Infinity).unwrap()).normalized();
            let flattened_then_evolved =
                evolve_boxball(&unbasket(&config), MinPlus::Infinity).normalized();
            assert_eq!(
                evolved_then_flattened, flattened_then_evolved,
                "from {config}"
            );
        }
    }

    #[test]
    fn slow_strings_advance_by_one_under_every_capacity() {
        let capacities = [
            MinPlus::Finite(1),
            MinPlus::Finite(2),
            MinPlus::Finite(3),
            MinPlus::Infinity,
        ];
        for text in [
            "B1 U3 F",
            "U2",
            "B3",
            "U10 B7 B8 U12 U9 F B9 F",
            "B2 F B1 U1",
        ] {
            let config = cfg(text).normalized();
            assert_eq!(
                classify_basic(&toks(text)),
                Ok(Classification::Slow),
                "{text}"
            );
            for capacity in capacities {
                let stepped = evolve(&config, capacity).unwrap();
                let mut shifted = config.clone();
                shifted.origin += 1;
                assert_eq!(stepped, shifted, "{text} under {capacity}");
            }
        }
    }

    #[test]
    fn fast_trains_advance_by_capped_length() {
        let capacities = [
            (MinPlus::Finite(1), 1),
            (MinPlus::Finite(2), 2),
            (MinPlus::Finite(3), 3),
            (MinPlus::Infinity, u32::MAX),
        ];
        for k in 1..=5u32 {
            let config = Configuration::from_tokens(0, vec![Token::Ball; k as usize]);
            for (capacity, cap) in capacities {
                let stepped = evolve(&config, capacity).unwrap();
                let mut shifted = config.clone();
                shifted.origin += i64::from(k.min(cap));
                assert_eq!(stepped, shifted, "F_{k} under {capacity}");
            }
        }
    }

    #[test]
    fn anatomy_of_the_worked_soliton() {
        let anatomy = slow_anatomy(&toks("B1 U3 F")).unwrap();
        assert_eq!(anatomy.basket_count, 4);
        assert_eq!(anatomy.ball_count, 2);
        assert_eq!(anatomy.initial_ball, None);
        assert_eq!(anatomy.pairing, vec![(1, 1), (4, 2)]);
        assert_eq!(anatomy.specials(), vec![1, 4]);
        assert!(anatomy.is_special(1) && anatomy.is_special(4));
        assert!(!anatomy.is_special(2) && !anatomy.is_special(3));
        assert_eq!(anatomy.basket_offsets[1..], [0, 1, 1, 1]);
        assert_eq!(anatomy.ball_offsets[1..], [1, 2]);
    }

    #[test]
    fn anatomy_with_initial_ball_and_without_specials() {
        let with_initial = slow_anatomy(&toks("F B2")).unwrap();
        assert_eq!(with_initial.initial_ball, Some(1));
        assert!(with_initial.pairing.is_empty());
        assert_eq!(with_initial.basket_count, 2);

        let bare_run = slow_anatomy(&toks("B5")).unwrap();
        assert_eq!(bare_run.initial_ball, None);
        assert!(bare_run.pairing.is_empty());
        assert_eq!(bare_run.basket_count, 5);

        let tail_ball_with_baskets = slow_anatomy(&toks("U2 U1")).unwrap();
        assert_eq!(tail_ball_with_baskets.initial_ball, Some(1));
        assert_eq!(tail_ball_with_baskets.pairing, vec![(2, 2)]);
    }

    #[test]
    fn anatomy_pairs_balls_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let tokens = crate::random::random_slow_tokens(&mut rng, 6, 3);
            let anatomy = slow_anatomy(&tokens).unwrap();
            let specials = anatomy.specials();
            let mut sorted = specials.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(specials, sorted, "specials ascend without repeats");
            for &(basket, ball) in &anatomy.pairing {
                assert_eq!(
                    anatomy.basket_offsets[basket as usize] + 1,
                    anatomy.ball_offsets[ball as usize],
                    "special sits one site before its ball in {tokens:?}"
                );
            }
            let non_initial = anatomy.ball_count - u32::from(anatomy.initial_ball.is_some());
            assert_eq!(anatomy.pairing.len() as u32, non_initial);
        }
    }
}
