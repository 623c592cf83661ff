//! Carrier time evolutions of whole configurations.
//!
//! A carrier of capacity `l` (possibly unbounded) sweeps the line once from
//! the left, exchanging baskets and balls with each site through a fixed
//! piecewise-linear map. The map below is exact min-plus arithmetic; the
//! combinatorial module implements the same dynamics entity by entity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minplus::{min3, MinPlus};
use crate::state::{BoxBallConfiguration, Configuration, SiteState, VACUUM};

/// Cargo of the carrier: capacity plus the baskets and balls on board.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CarrierState {
    pub capacity: MinPlus,
    pub baskets: u32,
    pub balls: u32,
}

impl CarrierState {
    /// The empty carrier the sweep starts and must end with.
    pub fn fresh(capacity: MinPlus) -> Self {
        CarrierState {
            capacity,
            baskets: 0,
            balls: 0,
        }
    }

    pub fn is_fresh(self) -> bool {
        self.baskets == 0 && self.balls == 0
    }

    /// Room for more balls: capacity + baskets - balls.
    pub fn free(self) -> MinPlus {
        self.capacity + i64::from(self.baskets) - i64::from(self.balls)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvolveError {
    #[error("carrier capacity must be at least 1")]
    InvalidCapacity,
    #[error("carrier still held cargo {pending_balls} balls / {pending_baskets} baskets after {swept} trailing vacua")]
    CarrierNotReturned {
        swept: usize,
        pending_balls: u32,
        pending_baskets: u32,
    },
}

/// One carrier-site interaction `(C, S) -> (S', C')`.
///
/// Balance `d - e + f` of the site and `a - b + c` of the carrier are both
/// preserved, as are the ball and basket totals of the pair.
pub fn carrier_step(carrier: CarrierState, site: SiteState) -> (SiteState, CarrierState) {
    let a = carrier.free();
    let b = i64::from(carrier.baskets);
    let c = i64::from(carrier.balls);
    let d = i64::from(site.free());
    let e = i64::from(site.baskets());
    let f = i64::from(site.balls());

    // Each of the three minima has a term free of `a`, so all are finite.
    let m1 = min3(a + b, a + c, MinPlus::Finite(b + f)).expect_finite("m1");
    let m2 = min3(e + c, d + c, d + b);
    let m3 = min3(a + e, MinPlus::Finite(d + f), MinPlus::Finite(e + f)).expect_finite("m3");

    let cast = |v: i64, what: &str| -> u32 {
        u32::try_from(v).unwrap_or_else(|_| panic!("carrier step drove {what} negative"))
    };
    let new_site = SiteState::new(
        cast(d + m1 - m2, "site free"),
        cast(e + m1 - m3, "site baskets"),
        cast(f + m2 - m3, "site balls"),
    )
    .expect("carrier step broke the site balance");
    let new_carrier = CarrierState {
        capacity: carrier.capacity,
        baskets: cast(b - m1 + m3, "carrier baskets"),
        balls: cast(c - m2 + m3, "carrier balls"),
    };
    debug_assert_eq!(
        i64::from(new_carrier.balls) + i64::from(new_site.balls()),
        c + f
    );
    debug_assert_eq!(
        i64::from(new_carrier.baskets) + i64::from(new_site.baskets()),
        b + e
    );
    (new_site, new_carrier)
}

/// One time step `T_l`. The sweep covers the stored window and then as many
/// trailing vacua as the carrier needs to come back empty; it always does so
/// within ball-count + 1 vacua, and we keep one site of slack before
/// declaring a bug.
pub fn evolve(config: &Configuration, capacity: MinPlus) -> Result<Configuration, EvolveError> {
    if matches!(capacity, MinPlus::Finite(n) if n < 1) {
        return Err(EvolveError::InvalidCapacity);
    }

    let mut carrier = CarrierState::fresh(capacity);
    let mut sites = Vec::with_capacity(config.sites.len() + 8);
    for &site in &config.sites {
        let (s, c) = carrier_step(carrier, site);
        sites.push(s);
        carrier = c;
    }
    let bound = config.ball_count() as usize + 2;
    let mut swept = 0;
    while !carrier.is_fresh() && swept < bound {
        let (s, c) = carrier_step(carrier, VACUUM);
        sites.push(s);
        carrier = c;
        swept += 1;
    }
    if !carrier.is_fresh() {
        return Err(EvolveError::CarrierNotReturned {
            swept,
            pending_balls: carrier.balls,
            pending_baskets: carrier.baskets,
        });
    }
    let out = Configuration::new(config.origin, sites).normalized();
    debug_assert_eq!(out.ball_count(), config.ball_count());
    debug_assert_eq!(out.basket_count(), config.basket_count());
    Ok(out)
}

/// Iterates `evolve`; element 0 is the normalized input, so the result has
/// `steps + 1` entries.
pub fn orbit(
    config: &Configuration,
    capacity: MinPlus,
    steps: usize,
) -> Result<Vec<Configuration>, EvolveError> {
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(config.clone().normalized());
    for _ in 0..steps {
        let next = evolve(rows.last().unwrap(), capacity)?;
        rows.push(next);
    }
    Ok(rows)
}

/// Classic single-box evolution with a capacity-`l` carrier: pick up a ball
/// when there is room, drop one into every empty box while loaded.
pub fn evolve_boxball(config: &BoxBallConfiguration, capacity: MinPlus) -> BoxBallConfiguration {
    let mut carry = 0u64;
    let mut cells = Vec::with_capacity(config.cells.len() + 4);
    for &cell in &config.cells {
        if cell == 1 {
            if MinPlus::Finite(carry as i64) < capacity {
                carry += 1;
                cells.push(0);
            } else {
                cells.push(1);
            }
        } else if carry > 0 {
            carry -= 1;
            cells.push(1);
        } else {
            cells.push(0);
        }
    }
    for _ in 0..carry {
        cells.push(1);
    }
    BoxBallConfiguration::new(config.origin, cells).normalized()
}
