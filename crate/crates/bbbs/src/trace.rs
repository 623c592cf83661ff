//! Instrumented fast-slow scattering under the unbounded carrier.
//!
//! The step decomposes into three moves: (A) every empty basket slides one
//! site right, (B) balls fly in reading order to the first free container
//! strictly right, boxes before lower-numbered baskets, (C) each site
//! repacks, box first, and a slow ball takes the box when there is a
//! choice. The tracer keeps fast and slow designations for the balls while
//! a fast train overtakes one basic slow soliton, applying two renaming
//! rules in move (B):
//!
//! * a fast ball placed inside a special basket becomes slow the moment it
//!   lands, and the ball paired with that basket becomes fast and takes
//!   over the pairing;
//! * once per run, when a fast ball first lands strictly beyond the
//!   initial slow ball, the fast ball earliest in reading order becomes
//!   slow and the initial ball becomes fast.
//!
//! At every integral time the tracer checks the run against the laws the
//! designations obey: special baskets are empty; every fast ball sits in a
//! box or a non-special basket, and the basket numbers holding fast balls
//! form advancing windows that visit each non-special basket exactly once;
//! a paired ball rides one site ahead of its special basket before
//! activation and in the same site afterwards; a displaced initial ball's
//! replacement reoccupies its position two steps later. At the end it
//! checks the per-entity phase shifts: 2b - a for the fast train, 0 for
//! special baskets, -1 for other baskets and non-initial balls, -2 for the
//! initial ball. Any failure lands in the violation log.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::combinatorial::{entity_step, Container, EntityConfiguration, StepHooks};
use crate::scatter::default_horizon;
use crate::soliton::{classify_basic, decompose, slow_anatomy, Classification, SolitonKind};
use crate::state::{Configuration, Token};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("fast amplitude must be at least 2, got {0}")]
    BadFast(u32),
    #[error("not a basic slow soliton: {0}")]
    BadSlow(String),
    #[error("horizon {horizon} too small, last state {last}")]
    HorizonTooSmall { horizon: u64, last: String },
    #[error("lemma violated: {which} at time {t}")]
    LemmaViolation { which: String, t: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub which: String,
    pub t: u64,
    pub detail: String,
}

/// Basket numbers holding fast balls at integral time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalRecord {
    pub t: u64,
    pub lo: u32,
    pub hi: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub fast_amplitude: u32,
    pub slow_tokens: String,
    pub steps: u64,
    pub specials: Vec<u32>,
    /// Pairs (special basket, global ball id) before and after the run.
    pub initial_pairing: Vec<(u32, u32)>,
    pub final_pairing: Vec<(u32, u32)>,
    /// First integral time each special basket held a fast ball.
    pub activation: BTreeMap<u32, u64>,
    pub intervals: Vec<IntervalRecord>,
    pub initial_ball: Option<u32>,
    pub initial_switch_at: Option<u64>,
    /// Measured shift of the fast train; the laws demand 2b - a.
    pub fast_shift: i64,
    /// Measured shift per basket number.
    pub basket_shifts: BTreeMap<u32, i64>,
    /// Measured shift per slow-soliton ball, in reading order.
    pub ball_shifts: Vec<i64>,
    pub violations: Vec<Violation>,
}

impl TraceReport {
    /// Surfaces the first logged violation as an error.
    pub fn ensure_clean(&self) -> Result<(), TraceError> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(TraceError::LemmaViolation {
                which: format!("{}: {}", v.which, v.detail),
                t: v.t,
            }),
        }
    }
}

struct Tracer {
    t: u64,
    fast: BTreeSet<u32>,
    specials: BTreeSet<u32>,
    pairing: BTreeMap<u32, u32>,
    activation: BTreeMap<u32, u64>,
    initial_ball: Option<u32>,
    initial_switch_at: Option<u64>,
    lag_check: Option<(u64, i64, u32)>,
    ball_sites: BTreeMap<u32, i64>,
    pre_step: BTreeMap<u32, i64>,
    violations: Vec<Violation>,
}

impl StepHooks for Tracer {
    fn on_land(&mut self, ball: u32, site: i64, container: Container) {
        self.ball_sites.insert(ball, site);
        if let Some(initial) = self.initial_ball {
            if self.fast.contains(&ball) && site > self.ball_sites[&initial] {
                // Reading order of balls never changes, so the leftmost
                // fast ball is the one with the smallest id.  Positions in
                // `ball_sites` are no guide here: balls later in reading
                // order have not flown yet and still carry last step's
                // site.
                let leftmost = *self.fast.iter().next().expect("fast set is never empty");
                self.fast.remove(&leftmost);
                self.fast.insert(initial);
                self.initial_switch_at = Some(self.t + 1);
                self.lag_check = Some((self.t + 2, self.pre_step[&initial], leftmost));
                self.initial_ball = None;
            }
        }
        if let Container::Basket(basket) = container {
            if self.specials.contains(&basket) && self.fast.contains(&ball) {
                let partner = self.pairing[&basket];
                self.fast.remove(&ball);
                self.fast.insert(partner);
                self.pairing.insert(basket, ball);
                self.activation.entry(basket).or_insert(self.t + 1);
            }
        }
    }

    fn box_pick(&mut self, _site: i64, balls: &[u32]) -> usize {
        balls
            .iter()
            .position(|b| !self.fast.contains(b))
            .unwrap_or(0)
    }
}

impl Tracer {
    fn flag(&mut self, which: &str, t: u64, detail: String) {
        self.violations.push(Violation {
            which: which.to_string(),
            t,
            detail,
        });
    }
}

/// True once the state is the finished scattering: a separated union whose
/// last block is the intact fast train and whose other blocks all crawl at
/// speed 1.
fn scattering_done(state: &Configuration, m: u32) -> bool {
    let Some(d) = decompose(state) else {
        return false;
    };
    let Some((last, rest)) = d.solitons.split_last() else {
        return false;
    };
    last.kind == SolitonKind::Fast(m) && rest.iter().all(|s| s.speed() == 1)
}

/// Runs one fast train over one basic slow soliton under the unbounded
/// carrier with full instrumentation. The violation log of a healthy run
/// is empty; anything in it signals an implementation bug.
pub fn trace_fast_slow(m: u32, slow: &[Token]) -> Result<TraceReport, TraceError> {
    if m < 2 {
        return Err(TraceError::BadFast(m));
    }
    match classify_basic(slow) {
        Ok(Classification::Slow) => {}
        Ok(other) => return Err(TraceError::BadSlow(format!("classified {other:?}"))),
        Err(err) => return Err(TraceError::BadSlow(err.to_string())),
    }
    let anatomy = slow_anatomy(slow).expect("classified slow above");
    let gap = i64::from(m.max(2)) + 2;
    let slow_start = i64::from(m) + gap;
    let mut tokens = vec![Token::Ball; m as usize];
    tokens.extend(std::iter::repeat(Token::Vacuum).take(gap as usize));
    tokens.extend(slow.iter().copied());
    let initial = Configuration::from_tokens(0, tokens);
    let horizon = default_horizon(&initial);

    let mut ec = EntityConfiguration::from_configuration(&initial);
    let ball_count = anatomy.ball_count;
    let basket_count = anatomy.basket_count;
    let mut tracer = Tracer {
        t: 0,
        fast: (1..=m).collect(),
        specials: anatomy.specials().into_iter().collect(),
        pairing: anatomy
            .pairing
            .iter()
            .map(|&(basket, ball)| (basket, m + ball))
            .collect(),
        activation: BTreeMap::new(),
        initial_ball: anatomy.initial_ball.map(|ball| m + ball),
        initial_switch_at: None,
        lag_check: None,
        ball_sites: (1..=m + ball_count)
            .map(|id| {
                let (site, _) = ec.ball_location(id).expect("fresh numbering is dense");
                (id, site)
            })
            .collect(),
        pre_step: BTreeMap::new(),
        violations: Vec::new(),
    };
    let non_specials: Vec<u32> = (1..=basket_count)
        .filter(|b| !tracer.specials.contains(b))
        .collect();

    let mut intervals = Vec::new();
    let mut fast_visits: BTreeMap<u32, u64> = BTreeMap::new();
    let mut last_window_end: Option<usize> = None;
    let mut steps = None;

    integral_checks(
        &mut tracer,
        &ec,
        0,
        &non_specials,
        &mut intervals,
        &mut fast_visits,
        &mut last_window_end,
    );
    for t in 0..horizon {
        if scattering_done(&ec.counts(), m) {
            steps = Some(t);
            break;
        }
        tracer.pre_step = tracer.ball_sites.clone();
        entity_step(&mut ec, &mut tracer);
        tracer.t = t + 1;
        integral_checks(
            &mut tracer,
            &ec,
            t + 1,
            &non_specials,
            &mut intervals,
            &mut fast_visits,
            &mut last_window_end,
        );
    }
    let Some(steps) = steps else {
        return Err(TraceError::HorizonTooSmall {
            horizon,
            last: ec.counts().to_string(),
        });
    };

    // Every non-special basket hosts the fast stream at exactly one time.
    for &basket in &non_specials {
        let visits = fast_visits.get(&basket).copied().unwrap_or(0);
        if visits != 1 {
            tracer.flag(
                "basket-occupancy",
                steps,
                format!("non-special basket {basket} held fast balls at {visits} integral times"),
            );
        }
    }
    if tracer.fast.len() != m as usize {
        tracer.flag(
            "fast-count",
            steps,
            format!("{} balls designated fast, expected {m}", tracer.fast.len()),
        );
    }

    let n = i64::try_from(steps).expect("step count fits i64");
    let expected_fast = 2 * i64::from(ball_count) - i64::from(basket_count);
    let mut fast_positions: Vec<i64> = tracer.fast.iter().map(|id| tracer.ball_sites[id]).collect();
    fast_positions.sort_unstable();
    let fast_shift = fast_positions
        .first()
        .map(|&p| p - n * i64::from(m))
        .unwrap_or(0);
    for (k, &pos) in fast_positions.iter().enumerate() {
        let shift = pos - (k as i64 + n * i64::from(m));
        if shift != expected_fast {
            tracer.flag(
                "fast-shift",
                steps,
                format!(
                    "fast ball rank {} shifted {shift}, expected {expected_fast}",
                    k + 1
                ),
            );
        }
    }

    let mut basket_shifts = BTreeMap::new();
    for basket in 1..=basket_count {
        let site = ec.basket_location(basket).expect("baskets persist");
        let shift = site - (slow_start + anatomy.basket_offsets[basket as usize] + n);
        let expected = if tracer.specials.contains(&basket) {
            0
        } else {
            -1
        };
        if shift != expected {
            tracer.flag(
                "basket-shift",
                steps,
                format!("basket {basket} shifted {shift}, expected {expected}"),
            );
        }
        basket_shifts.insert(basket, shift);
    }

    let mut slow_positions: Vec<i64> = (1..=m + ball_count)
        .filter(|id| !tracer.fast.contains(id))
        .map(|id| tracer.ball_sites[&id])
        .collect();
    slow_positions.sort_unstable();
    let mut ball_shifts = Vec::new();
    for (k, &pos) in slow_positions.iter().enumerate() {
        let index = k as u32 + 1;
        let shift = pos - (slow_start + anatomy.ball_offsets[index as usize] + n);
        let expected = if anatomy.initial_ball == Some(index) {
            -2
        } else {
            -1
        };
        if shift != expected {
            tracer.flag(
                "slow-ball-shift",
                steps,
                format!("slow ball {index} shifted {shift}, expected {expected}"),
            );
        }
        ball_shifts.push(shift);
    }

    if fast_shift != expected_fast {
        tracer.flag(
            "fast-shift",
            steps,
            format!("fast train shifted {fast_shift}, expected {expected_fast}"),
        );
    }

    Ok(TraceReport {
        fast_amplitude: m,
        slow_tokens: {
            let words: Vec<String> = slow.iter().map(Token::to_string).collect();
            words.join(" ")
        },
        steps,
        specials: anatomy.specials(),
        initial_pairing: anatomy
            .pairing
            .iter()
            .map(|&(basket, ball)| (basket, m + ball))
            .collect(),
        final_pairing: tracer.pairing.iter().map(|(&b, &ball)| (b, ball)).collect(),
        activation: tracer.activation.clone(),
        intervals,
        initial_ball: anatomy.initial_ball.map(|ball| m + ball),
        initial_switch_at: tracer.initial_switch_at,
        fast_shift,
        basket_shifts,
        ball_shifts,
        violations: tracer.violations,
    })
}

/// The integral-time assertions: special baskets empty, fast balls confined
/// to boxes and one advancing window of non-special baskets, paired balls
/// one site ahead before activation and level after, and the two-step lag
/// of a displaced initial ball.
fn integral_checks(
    tracer: &mut Tracer,
    ec: &EntityConfiguration,
    t: u64,
    non_specials: &[u32],
    intervals: &mut Vec<IntervalRecord>,
    fast_visits: &mut BTreeMap<u32, u64>,
    last_window_end: &mut Option<usize>,
) {
    let specials: Vec<u32> = tracer.specials.iter().copied().collect();
    for basket in specials {
        match ec.basket_ball(basket) {
            Some(None) => {}
            Some(Some(ball)) => {
                tracer.flag(
                    "special-occupied",
                    t,
                    format!("special basket {basket} holds ball {ball}"),
                );
            }
            None => tracer.flag("special-occupied", t, format!("basket {basket} missing")),
        }
    }

    let mut window: Vec<u32> = Vec::new();
    let fast_ids: Vec<u32> = tracer.fast.iter().copied().collect();
    for ball in fast_ids {
        let (_, container) = ec.ball_location(ball).expect("balls persist");
        if let Container::Basket(basket) = container {
            if tracer.specials.contains(&basket) {
                tracer.flag(
                    "fast-in-special",
                    t,
                    format!("fast ball {ball} rests in special basket {basket}"),
                );
            } else {
                window.push(basket);
                *fast_visits.entry(basket).or_insert(0) += 1;
            }
        }
    }
    if !window.is_empty() {
        window.sort_unstable();
        let lo = window[0];
        let hi = *window.last().expect("nonempty");
        intervals.push(IntervalRecord { t, lo, hi });
        let indices: Vec<usize> = window
            .iter()
            .filter_map(|b| non_specials.iter().position(|n| n == b))
            .collect();
        let contiguous =
            indices.len() == window.len() && indices.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous {
            tracer.flag(
                "window-gap",
                t,
                format!("fast balls occupy non-contiguous baskets {window:?}"),
            );
        }
        if let (Some(end), Some(&start)) = (*last_window_end, indices.first()) {
            if start <= end {
                tracer.flag(
                    "window-regress",
                    t,
                    format!("window starting at basket {} does not advance", window[0]),
                );
            }
        }
        *last_window_end = indices.last().copied().or(*last_window_end);
    }

    let pairs: Vec<(u32, u32)> = tracer.pairing.iter().map(|(&b, &ball)| (b, ball)).collect();
    for (basket, ball) in pairs {
        let basket_site = ec.basket_location(basket).expect("baskets persist");
        let ball_site = tracer.ball_sites[&ball];
        let activated = tracer.activation.contains_key(&basket);
        let ok = if activated {
            ball_site == basket_site
        } else {
            ball_site == basket_site + 1
        };
        if !ok {
            tracer.flag(
                "pairing-geometry",
                t,
                format!(
                    "basket {basket} at {basket_site}, paired ball {ball} at {ball_site}, activated {activated}"
                ),
            );
        }
    }

    if let Some((due, expected, ball)) = tracer.lag_check {
        if due == t {
            let actual = tracer.ball_sites[&ball];
            if actual != expected {
                tracer.flag(
                    "initial-lag",
                    t,
                    format!("replacement ball {ball} at {actual}, expected {expected}"),
                );
            }
            tracer.lag_check = None;
        }
    }
}
