//! Site states, tokens, and whole-line configurations.
//!
//! A site is one box plus `b` baskets holding `c` balls; its state is the
//! triple `(a, b, c)` where `a = b - c + 1` counts the free slots. Valid
//! states satisfy `a - b + c = 1` and `c <= b + 1`. Configurations store a
//! finite window of sites inside a bi-infinite vacuum background.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("site ({a},{b},{c}) violates a - b + c = 1")]
    BadBalance { a: u32, b: u32, c: u32 },
    #[error("site with {b} baskets cannot hold {c} balls")]
    Overfull { b: u32, c: u32 },
    #[error("cell value {0} is not 0 or 1")]
    BadCell(u8),
}

/// Occupancy counts of one site. Fields are private so every constructed
/// value satisfies the site invariants.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32, u32)", into = "(u32, u32, u32)")]
pub struct SiteState {
    a: u32,
    b: u32,
    c: u32,
}

pub const VACUUM: SiteState = SiteState { a: 1, b: 0, c: 0 };

impl SiteState {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self, StateError> {
        if i64::from(a) - i64::from(b) + i64::from(c) != 1 {
            return Err(StateError::BadBalance { a, b, c });
        }
        Ok(SiteState { a, b, c })
    }

    /// Builds a site from its basket and ball counts; `a` is implied.
    pub fn from_counts(baskets: u32, balls: u32) -> Result<Self, StateError> {
        if balls > baskets + 1 {
            return Err(StateError::Overfull {
                b: baskets,
                c: balls,
            });
        }
        Ok(SiteState {
            a: baskets + 1 - balls,
            b: baskets,
            c: balls,
        })
    }

    pub fn free(self) -> u32 {
        self.a
    }

    pub fn baskets(self) -> u32 {
        self.b
    }

    pub fn balls(self) -> u32 {
        self.c
    }

    pub fn is_vacuum(self) -> bool {
        self == VACUUM
    }

    /// Baskets not holding a ball once balls are packed box-first.
    pub fn empty_baskets(self) -> u32 {
        self.b - self.c.saturating_sub(1)
    }

    /// The token for this site, if it holds at most one ball.
    pub fn token(self) -> Option<Token> {
        match (self.b, self.c) {
            (0, 0) => Some(Token::Vacuum),
            (0, 1) => Some(Token::Ball),
            (b, 0) => Some(Token::Baskets(b)),
            (b, 1) => Some(Token::BallWithBaskets(b)),
            _ => None,
        }
    }
}

impl fmt::Debug for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Display for SiteState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.token() {
            Some(t) => t.fmt(f),
            None => write!(f, "({},{},{})", self.a, self.b, self.c),
        }
    }
}

impl TryFrom<(u32, u32, u32)> for SiteState {
    type Error = StateError;

    fn try_from((a, b, c): (u32, u32, u32)) -> Result<Self, StateError> {
        SiteState::new(a, b, c)
    }
}

impl From<SiteState> for (u32, u32, u32) {
    fn from(s: SiteState) -> Self {
        (s.a, s.b, s.c)
    }
}

/// The four named site states covering everything with at most one ball.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Token {
    /// `V`: empty box, nothing else.
    Vacuum,
    /// `F`: one ball in the box.
    Ball,
    /// `B{n}`: empty box under `n >= 1` empty baskets.
    Baskets(u32),
    /// `U{n}`: ball in the box, `n >= 1` empty baskets.
    BallWithBaskets(u32),
}

impl Token {
    pub fn site(self) -> SiteState {
        match self {
            Token::Vacuum => VACUUM,
            Token::Ball => SiteState { a: 0, b: 0, c: 1 },
            Token::Baskets(n) => SiteState {
                a: n + 1,
                b: n,
                c: 0,
            },
            Token::BallWithBaskets(n) => SiteState { a: n, b: n, c: 1 },
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Vacuum => write!(f, "V"),
            Token::Ball => write!(f, "F"),
            Token::Baskets(n) => write!(f, "B{n}"),
            Token::BallWithBaskets(n) => write!(f, "U{n}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("token {0:?} needs a count of at least 1, like {0}2")]
    MissingCount(char),
    #[error("counts must be at least 1")]
    ZeroCount,
    #[error("malformed triple, expected (a,b,c)")]
    BadTriple,
    #[error("number too large")]
    NumberOverflow,
    #[error("empty input")]
    Empty,
    #[error(transparent)]
    State(#[from] StateError),
}

/// A finite window of sites; everything outside is vacuum. `origin` is the
/// lattice index of `sites[0]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Configuration {
    #[serde(default)]
    pub origin: i64,
    pub sites: Vec<SiteState>,
}

impl Configuration {
    pub fn new(origin: i64, sites: Vec<SiteState>) -> Self {
        Configuration { origin, sites }
    }

    pub fn from_tokens<I: IntoIterator<Item = Token>>(origin: i64, tokens: I) -> Self {
        Configuration {
            origin,
            sites: tokens.into_iter().map(Token::site).collect(),
        }
    }

    /// One past the last stored lattice index.
    pub fn end(&self) -> i64 {
        self.origin + self.sites.len() as i64
    }

    /// The site at an absolute lattice position; vacuum outside the window.
    pub fn get(&self, pos: i64) -> SiteState {
        if pos < self.origin || pos >= self.end() {
            return VACUUM;
        }
        self.sites[(pos - self.origin) as usize]
    }

    pub fn ball_count(&self) -> u64 {
        self.sites.iter().map(|s| u64::from(s.balls())).sum()
    }

    pub fn basket_count(&self) -> u64 {
        self.sites.iter().map(|s| u64::from(s.baskets())).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.sites.iter().all(|s| s.is_vacuum())
    }

    /// First and last non-vacuum positions, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.sites.iter().position(|s| !s.is_vacuum())?;
        let last = self.sites.iter().rposition(|s| !s.is_vacuum()).unwrap();
        Some((self.origin + first as i64, self.origin + last as i64))
    }

    /// Trims vacuum from both ends, bumping the origin to keep absolute
    /// positions. The all-vacuum window becomes empty with origin 0.
    pub fn normalize(&mut self) {
        match self.support() {
            None => {
                self.sites.clear();
                self.origin = 0;
            }
            Some((lo, hi)) => {
                let start = (lo - self.origin) as usize;
                let len = (hi - lo + 1) as usize;
                self.sites.drain(..start);
                self.sites.truncate(len);
                self.origin = lo;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }
}

impl FromStr for Configuration {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bytes = s.as_bytes();
        let mut i = 0usize;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        fn read_u32(bytes: &[u8], i: &mut usize) -> Result<Option<u32>, ParseError> {
            let start = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            if *i == start {
                return Ok(None);
            }
            std::str::from_utf8(&bytes[start..*i])
                .unwrap()
                .parse::<u32>()
                .map(Some)
                .map_err(|_| ParseError::NumberOverflow)
        }

        skip_ws(&mut i);
        let mut origin = 0i64;
        if i < bytes.len() && bytes[i] == b'@' {
            i += 1;
            let neg = i < bytes.len() && bytes[i] == b'-';
            if neg {
                i += 1;
            }
            let n = read_u32(bytes, &mut i)?.ok_or(ParseError::MissingCount('@'))?;
            origin = if neg { -i64::from(n) } else { i64::from(n) };
        }

        let mut sites = Vec::new();
        loop {
            skip_ws(&mut i);
            if i >= bytes.len() {
                break;
            }
            match bytes[i] {
                b'V' => {
                    i += 1;
                    sites.push(VACUUM);
                }
                b'F' => {
                    i += 1;
                    sites.push(Token::Ball.site());
                }
                ch @ (b'B' | b'U') => {
                    i += 1;
                    let n = read_u32(bytes, &mut i)?.ok_or(ParseError::MissingCount(ch as char))?;
                    if n == 0 {
                        return Err(ParseError::ZeroCount);
                    }
                    sites.push(if ch == b'B' {
                        Token::Baskets(n).site()
                    } else {
                        Token::BallWithBaskets(n).site()
                    });
                }
                b'(' => {
                    i += 1;
                    let mut nums = [0u32; 3];
                    for (k, slot) in nums.iter_mut().enumerate() {
                        skip_ws(&mut i);
                        *slot = read_u32(bytes, &mut i)?.ok_or(ParseError::BadTriple)?;
                        skip_ws(&mut i);
                        let want = if k < 2 { b',' } else { b')' };
                        if i >= bytes.len() || bytes[i] != want {
                            return Err(ParseError::BadTriple);
                        }
                        i += 1;
                    }
                    sites.push(SiteState::new(nums[0], nums[1], nums[2])?);
                }
                other => return Err(ParseError::UnexpectedChar(other as char)),
            }
        }
        if sites.is_empty() {
            return Err(ParseError::Empty);
        }
        Ok(Configuration { origin, sites })
    }
}

/// Parses a soliton word: `B`/`U` with a required amplitude, `V`, and `F`
/// with an optional repeat count, so `F3` is three balls and `B1U3F` is a
/// three letter word. Whitespace may separate letters but is not required.
pub fn parse_word(s: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = s.as_bytes();
    let mut i = 0usize;
    let mut out = Vec::new();
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let count: Option<u32> = if i > start {
            let n: u32 = std::str::from_utf8(&bytes[start..i])
                .unwrap()
                .parse()
                .map_err(|_| ParseError::NumberOverflow)?;
            // Keeps F<n> from materializing an absurd ball train.
            if n > 1_000_000 {
                return Err(ParseError::NumberOverflow);
            }
            Some(n)
        } else {
            None
        };
        match (ch, count) {
            (b'V', None) => out.push(Token::Vacuum),
            (b'V', Some(_)) => return Err(ParseError::UnexpectedChar(bytes[start] as char)),
            (b'F', None) => out.push(Token::Ball),
            (b'F', Some(0)) => return Err(ParseError::ZeroCount),
            (b'F', Some(n)) => out.extend(std::iter::repeat(Token::Ball).take(n as usize)),
            (b'B' | b'U', None) => return Err(ParseError::MissingCount(ch as char)),
            (b'B' | b'U', Some(0)) => return Err(ParseError::ZeroCount),
            (b'B', Some(n)) => out.push(Token::Baskets(n)),
            (b'U', Some(n)) => out.push(Token::BallWithBaskets(n)),
            (other, _) => return Err(ParseError::UnexpectedChar(other as char)),
        }
    }
    if out.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(out)
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.origin != 0 {
            write!(f, "@{} ", self.origin)?;
        }
        if self.sites.is_empty() {
            return write!(f, "V");
        }
        for (k, s) in self.sites.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            s.fmt(f)?;
        }
        Ok(())
    }
}

/// Renders configurations as rows aligned on a common left edge, one row per
/// line. Rows are padded with vacua so equal columns mean equal positions.
pub fn render_rows(rows: &[Configuration]) -> String {
    let base = rows.iter().map(|r| r.origin).min().unwrap_or(0);
    let mut out = String::new();
    for row in rows {
        let mut line: Vec<String> = Vec::new();
        for _ in base..row.origin {
            line.push("V".to_owned());
        }
        let trimmed = match row.support() {
            Some((_, hi)) => &row.sites[..(hi - row.origin + 1) as usize],
            None => &[],
        };
        line.extend(trimmed.iter().map(|s| s.to_string()));
        if line.is_empty() {
            line.push("V".to_owned());
        }
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Renders every site as a bare `(a,b,c)` triple.
pub fn render_triples(c: &Configuration) -> String {
    let mut out = String::new();
    if c.origin != 0 {
        out.push_str(&format!("@{} ", c.origin));
    }
    if c.sites.is_empty() {
        out.push_str("(1,0,0)");
        return out;
    }
    for (k, s) in c.sites.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(&format!("({},{},{})", s.free(), s.baskets(), s.balls()));
    }
    out
}

/// Stacked picture of a configuration: one text column per site, baskets
/// drawn above the box, `o` marking balls packed box-first.
pub fn render_ascii(c: &Configuration) -> String {
    let height = c.sites.iter().map(|s| s.baskets()).max().unwrap_or(0) as usize;
    let mut lines = vec![String::new(); height + 1];
    for site in &c.sites {
        let b = site.baskets() as usize;
        let c_balls = site.balls() as usize;
        // row 0 is the box line, rows 1..=b the baskets from the bottom up
        for (level, line) in lines.iter_mut().enumerate() {
            let cell = if level == 0 {
                if c_balls >= 1 {
                    "[o]"
                } else {
                    "[ ]"
                }
            } else if level <= b {
                if level < c_balls {
                    "(o)"
                } else {
                    "( )"
                }
            } else {
                "   "
            };
            line.push_str(cell);
            line.push(' ');
        }
    }
    let mut out = String::new();
    for line in lines.iter().rev() {
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// A plain box-ball line: one bit per cell, 1 meaning the box holds a ball.
/// Deserializing rejects any other cell value.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawBoxBall")]
pub struct BoxBallConfiguration {
    pub origin: i64,
    pub cells: Vec<u8>,
}

/// Wire form of [`BoxBallConfiguration`] before the bit check.
#[derive(Deserialize)]
struct RawBoxBall {
    #[serde(default)]
    origin: i64,
    cells: Vec<u8>,
}

impl TryFrom<RawBoxBall> for BoxBallConfiguration {
    type Error = StateError;

    fn try_from(raw: RawBoxBall) -> Result<Self, StateError> {
        if let Some(&c) = raw.cells.iter().find(|&&c| c > 1) {
            return Err(StateError::BadCell(c));
        }
        Ok(BoxBallConfiguration {
            origin: raw.origin,
            cells: raw.cells,
        })
    }
}

impl BoxBallConfiguration {
    pub fn new(origin: i64, cells: Vec<u8>) -> Self {
        debug_assert!(cells.iter().all(|&c| c <= 1));
        BoxBallConfiguration { origin, cells }
    }

    pub fn ball_count(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn normalize(&mut self) {
        match self.cells.iter().position(|&c| c == 1) {
            None => {
                self.cells.clear();
                self.origin = 0;
            }
            Some(first) => {
                let last = self.cells.iter().rposition(|&c| c == 1).unwrap();
                self.cells.drain(..first);
                self.cells.truncate(last - first + 1);
                self.origin += first as i64;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }
}

impl fmt::Display for BoxBallConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.origin != 0 {
            write!(f, "@{} ", self.origin)?;
        }
        if self.cells.is_empty() {
            return write!(f, "0");
        }
        for (k, c) in self.cells.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
