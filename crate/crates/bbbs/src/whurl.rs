//! Birational whurl maps and their tropicalizations.
//!
//! Two families are implemented on positive rational vertex weights: the
//! two-wire map (both wires oriented the same way) and the mixed three-wire
//! map (two wires one way, one the other).  Replacing `(+, *)` by
//! `(min, +)` turns each rational map into a piecewise-linear one; the
//! three-wire tropical map with an infinite first carrier weight is exactly
//! the carrier step of the box-basket-ball system, and the two-wire one is
//! the classical box-ball carrier.  Both maps satisfy the Yang-Baxter
//! relation, which [`check_yang_baxter_2`] and [`check_yang_baxter_3`]
//! test on concrete triples.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::evolve::CarrierState;
use crate::minplus::{min3, MinPlus};
use crate::state::SiteState;

pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WhurlError {
    /// Whurl weights live in the positive orthant; zero or negative weights
    /// would put a pole of the map on the evaluation point.
    #[error("whurl weights must be positive, got {0}")]
    NonPositiveWeight(String),
}

fn ensure_positive(weights: &[&Rat]) -> Result<(), WhurlError> {
    for w in weights {
        if **w <= Rat::zero() {
            return Err(WhurlError::NonPositiveWeight(w.to_string()));
        }
    }
    Ok(())
}

/// The two-wire whurl map on weight pairs `x`, `y`.
///
/// Returns `(x', y')`.  The products `x1*x2` and `y1*y2` are exchanged by
/// the map, which is checked in debug builds.
pub fn whurl_2wire(x: &[Rat; 2], y: &[Rat; 2]) -> Result<([Rat; 2], [Rat; 2]), WhurlError> {
    ensure_positive(&[&x[0], &x[1], &y[0], &y[1]])?;
    let p = &x[0] + &y[1];
    let q = &y[0] + &x[1];
    let x1 = &y[0] * &p / &q;
    let x2 = &y[1] * &q / &p;
    let y1 = &x[0] * &q / &p;
    let y2 = &x[1] * &p / &q;
    debug_assert_eq!(&x1 * &x2, &y[0] * &y[1]);
    debug_assert_eq!(&y1 * &y2, &x[0] * &x[1]);
    Ok(([x1, x2], [y1, y2]))
}

/// The mixed three-wire whurl map on weight triples `x`, `y`.
///
/// Returns `(x', y')`.  The product of all six weights is preserved,
/// which is checked in debug builds.
pub fn whurl_3wire_mixed(x: &[Rat; 3], y: &[Rat; 3]) -> Result<([Rat; 3], [Rat; 3]), WhurlError> {
    ensure_positive(&[&x[0], &x[1], &x[2], &y[0], &y[1], &y[2]])?;
    let p = &x[0] * &x[1] + &x[0] * &x[2] + &x[1] * &y[2];
    let q = &y[1] * &x[2] + &y[0] * &x[2] + &y[0] * &x[1];
    let s = &x[0] * &y[1] + &y[0] * &y[2] + &y[1] * &y[2];
    let x1 = &y[0] * &p / &q;
    let x2 = &y[1] * &p / &s;
    let x3 = &y[2] * &q / &s;
    let y1 = &x[0] * &q / &p;
    let y2 = &x[1] * &s / &p;
    let y3 = &x[2] * &s / &q;
    debug_assert_eq!(
        &x1 * &x2 * &x3 * &y1 * &y2 * &y3,
        &x[0] * &x[1] * &x[2] * &y[0] * &y[1] * &y[2],
    );
    Ok(([x1, x2, x3], [y1, y2, y3]))
}

/// Tropicalization of [`whurl_2wire`]: `(+, *)` replaced by `(min, +)`.
///
/// Only `x[0]` may be infinite (an unbounded carrier); all other entries
/// must be finite.
pub fn tropical_2wire(x: [MinPlus; 2], y: [MinPlus; 2]) -> ([MinPlus; 2], [MinPlus; 2]) {
    let p = x[0].min(y[1]);
    let q = y[0].min(x[1]);
    let x1 = tropical_ratio(y[0], p, q);
    let x2 = tropical_ratio(y[1], q, p);
    let y1 = tropical_ratio(x[0], q, p);
    let y2 = tropical_ratio(x[1], p, q);
    ([x1, x2], [y1, y2])
}

/// Tropicalization of [`whurl_3wire_mixed`].
///
/// Only `x[0]` may be infinite (an unbounded carrier); all other entries
/// must be finite.
pub fn tropical_3wire(x: [MinPlus; 3], y: [MinPlus; 3]) -> ([MinPlus; 3], [MinPlus; 3]) {
    let p = min3(x[0] + x[1], x[0] + x[2], x[1] + y[2]);
    let q = min3(y[1] + x[2], y[0] + x[2], y[0] + x[1]);
    let s = min3(x[0] + y[1], y[0] + y[2], y[1] + y[2]);
    let x1 = tropical_ratio(y[0], p, q);
    let x2 = tropical_ratio(y[1], p, s);
    let x3 = tropical_ratio(y[2], q, s);
    let y1 = tropical_ratio(x[0], q, p);
    let y2 = tropical_ratio(x[1], s, p);
    let y3 = tropical_ratio(x[2], s, q);
    ([x1, x2, x3], [y1, y2, y3])
}

// base + num - den in min-plus arithmetic.  A finite denominator is required:
// subtracting an infinite one has no tropical meaning and indicates weights
// outside the supported domain.
fn tropical_ratio(base: MinPlus, num: MinPlus, den: MinPlus) -> MinPlus {
    let den = den.expect_finite("tropical whurl denominator must be finite");
    match num {
        MinPlus::Infinity => MinPlus::Infinity,
        MinPlus::Finite(n) => base + (n - den),
    }
}

/// The carrier step realized through [`tropical_3wire`].
///
/// The carrier contents ride on `x` and the site contents on `y`; the
/// outputs swap roles, so `x'` is the new site and `y'` the new carrier.
pub fn carrier_step_via_whurl(carrier: CarrierState, site: SiteState) -> (SiteState, CarrierState) {
    let x = [
        carrier.free(),
        MinPlus::from(carrier.baskets),
        MinPlus::from(carrier.balls),
    ];
    let y = [
        MinPlus::from(site.free()),
        MinPlus::from(site.baskets()),
        MinPlus::from(site.balls()),
    ];
    let (site_out, carrier_out) = tropical_3wire(x, y);
    let cast = |m: MinPlus, what: &str| {
        u32::try_from(m.expect_finite(what)).unwrap_or_else(|_| panic!("{what} went negative"))
    };
    let out = SiteState::new(
        cast(site_out[0], "site slots"),
        cast(site_out[1], "site baskets"),
        cast(site_out[2], "site balls"),
    )
    .expect("tropical whurl output satisfies the site invariants");
    let carrier = CarrierState {
        capacity: carrier.capacity,
        baskets: cast(carrier_out[1], "carrier baskets"),
        balls: cast(carrier_out[2], "carrier balls"),
    };
    (out, carrier)
}

/// Checks the Yang-Baxter relation for [`whurl_2wire`] on one triple.
///
/// Both sides of `(R12)(R23)(R12) = (R23)(R12)(R23)` are evaluated in exact
/// arithmetic, innermost factor first, and compared for equality.
pub fn check_yang_baxter_2(
    w1: &[Rat; 2],
    w2: &[Rat; 2],
    w3: &[Rat; 2],
) -> Result<bool, WhurlError> {
    let lhs = {
        let (a, b) = whurl_2wire(w1, w2)?;
        let (b, c) = whurl_2wire(&b, w3)?;
        let (a, b) = whurl_2wire(&a, &b)?;
        (a, b, c)
    };
    let rhs = {
        let (b, c) = whurl_2wire(w2, w3)?;
        let (a, b) = whurl_2wire(w1, &b)?;
        let (b, c) = whurl_2wire(&b, &c)?;
        (a, b, c)
    };
    Ok(lhs == rhs)
}

/// Checks the Yang-Baxter relation for [`whurl_3wire_mixed`] on one triple.
pub fn check_yang_baxter_3(
    w1: &[Rat; 3],
    w2: &[Rat; 3],
    w3: &[Rat; 3],
) -> Result<bool, WhurlError> {
    let lhs = {
        let (a, b) = whurl_3wire_mixed(w1, w2)?;
        let (b, c) = whurl_3wire_mixed(&b, w3)?;
        let (a, b) = whurl_3wire_mixed(&a, &b)?;
        (a, b, c)
    };
    let rhs = {
        let (b, c) = whurl_3wire_mixed(w2, w3)?;
        let (a, b) = whurl_3wire_mixed(w1, &b)?;
        let (b, c) = whurl_3wire_mixed(&b, &c)?;
        (a, b, c)
    };
    Ok(lhs == rhs)
}

/// Checks the tropical Yang-Baxter relation for [`tropical_2wire`] on one
/// triple of finite weight pairs.
pub fn check_tropical_yang_baxter_2(w1: [MinPlus; 2], w2: [MinPlus; 2], w3: [MinPlus; 2]) -> bool {
    let lhs = {
        let (a, b) = tropical_2wire(w1, w2);
        let (b, c) = tropical_2wire(b, w3);
        let (a, b) = tropical_2wire(a, b);
        (a, b, c)
    };
    let rhs = {
        let (b, c) = tropical_2wire(w2, w3);
        let (a, b) = tropical_2wire(w1, b);
        let (b, c) = tropical_2wire(b, c);
        (a, b, c)
    };
    lhs == rhs
}

/// Checks the tropical Yang-Baxter relation for [`tropical_3wire`] on one
/// triple of finite weight triples.
pub fn check_tropical_yang_baxter_3(w1: [MinPlus; 3], w2: [MinPlus; 3], w3: [MinPlus; 3]) -> bool {
    let lhs = {
        let (a, b) = tropical_3wire(w1, w2);
        let (b, c) = tropical_3wire(b, w3);
        let (a, b) = tropical_3wire(a, b);
        (a, b, c)
    };
    let rhs = {
        let (b, c) = tropical_3wire(w2, w3);
        let (a, b) = tropical_3wire(w1, b);
        let (b, c) = tropical_3wire(b, c);
        (a, b, c)
    };
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::carrier_step;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    // Monomial tables for the three-wire map, evaluated generically.  The
    // production code above writes the polynomials out by hand; this second
    // reading of the same printed formulas guards against transcription
    // slips.  Variables are indexed x1,x2,x3,y1,y2,y3 = 0..6.
    const P_MONOMIALS: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 5]];
    const Q_MONOMIALS: [[usize; 2]; 3] = [[4, 2], [3, 2], [3, 1]];
    const S_MONOMIALS: [[usize; 2]; 3] = [[0, 4], [3, 5], [4, 5]];
    // (base variable, numerator table, denominator table) per output,
    // ordered x'1, x'2, x'3, y'1, y'2, y'3.
    const OUTPUTS: [(usize, &[[usize; 2]; 3], &[[usize; 2]; 3]); 6] = [
        (3, &P_MONOMIALS, &Q_MONOMIALS),
        (4, &P_MONOMIALS, &S_MONOMIALS),
        (5, &Q_MONOMIALS, &S_MONOMIALS),
        (0, &Q_MONOMIALS, &P_MONOMIALS),
        (1, &S_MONOMIALS, &P_MONOMIALS),
        (2, &S_MONOMIALS, &Q_MONOMIALS),
    ];

    fn table_eval_rational(vars: &[Rat; 6], table: &[[usize; 2]; 3]) -> Rat {
        table
            .iter()
            .map(|m| &vars[m[0]] * &vars[m[1]])
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    fn table_3wire_rational(x: &[Rat; 3], y: &[Rat; 3]) -> ([Rat; 3], [Rat; 3]) {
        let vars = [
            x[0].clone(),
            x[1].clone(),
            x[2].clone(),
            y[0].clone(),
            y[1].clone(),
            y[2].clone(),
        ];
        let mut out: Vec<Rat> = Vec::new();
        for (base, num, den) in OUTPUTS {
            out.push(
                &vars[base] * table_eval_rational(&vars, num) / table_eval_rational(&vars, den),
            );
        }
        (
            [out[0].clone(), out[1].clone(), out[2].clone()],
            [out[3].clone(), out[4].clone(), out[5].clone()],
        )
    }

    fn table_eval_tropical(vars: &[MinPlus; 6], table: &[[usize; 2]; 3]) -> MinPlus {
        table.iter().map(|m| vars[m[0]] + vars[m[1]]).min().unwrap()
    }

    fn table_3wire_tropical(x: [MinPlus; 3], y: [MinPlus; 3]) -> ([MinPlus; 3], [MinPlus; 3]) {
        let vars = [x[0], x[1], x[2], y[0], y[1], y[2]];
        let mut out = [MinPlus::Infinity; 6];
        for (i, (base, num, den)) in OUTPUTS.iter().enumerate() {
            out[i] = tropical_ratio(
                vars[*base],
                table_eval_tropical(&vars, num),
                table_eval_tropical(&vars, den),
            );
        }
        ([out[0], out[1], out[2]], [out[3], out[4], out[5]])
    }

    #[test]
    fn two_wire_worked_example() {
        let x = [rat(1, 1), rat(1, 1)];
        let y = [rat(2, 1), rat(3, 1)];
        let (xp, yp) = whurl_2wire(&x, &y).unwrap();
        assert_eq!(xp, [rat(8, 3), rat(9, 4)]);
        assert_eq!(yp, [rat(3, 4), rat(4, 3)]);
    }

    #[test]
    fn three_wire_worked_example() {
        let x = [rat(1, 1), rat(2, 1), rat(3, 1)];
        let y = [rat(1, 1), rat(1, 1), rat(1, 1)];
        let (xp, yp) = whurl_3wire_mixed(&x, &y).unwrap();
        assert_eq!(xp, [rat(7, 8), rat(7, 3), rat(8, 3)]);
        assert_eq!(yp, [rat(8, 7), rat(6, 7), rat(9, 8)]);
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let bad = [rat(0, 1), rat(1, 1)];
        let good = [rat(1, 1), rat(1, 1)];
        assert!(matches!(
            whurl_2wire(&bad, &good),
            Err(WhurlError::NonPositiveWeight(_))
        ));
        let bad3 = [rat(1, 1), rat(-2, 1), rat(1, 1)];
        let good3 = [rat(1, 1), rat(1, 1), rat(1, 1)];
        assert!(matches!(
            whurl_3wire_mixed(&good3, &bad3),
            Err(WhurlError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn hand_written_formulas_match_monomial_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x3717);
        for _ in 0..200 {
            let mut draw = || rat(rng.gen_range(1..=1000), rng.gen_range(1..=1000));
            let x = [draw(), draw(), draw()];
            let y = [draw(), draw(), draw()];
            let got = whurl_3wire_mixed(&x, &y).unwrap();
            let want = table_3wire_rational(&x, &y);
            assert_eq!(got, want);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x3718);
        for _ in 0..500 {
            let mut draw = || MinPlus::Finite(rng.gen_range(-50..=50));
            let x = [draw(), draw(), draw()];
            let y = [draw(), draw(), draw()];
            assert_eq!(tropical_3wire(x, y), table_3wire_tropical(x, y));
        }
    }

    #[test]
    fn yang_baxter_on_worked_examples() {
        let w1 = [rat(1, 1), rat(1, 1)];
        let w2 = [rat(2, 1), rat(3, 1)];
        let w3 = [rat(5, 7), rat(11, 2)];
        assert!(check_yang_baxter_2(&w1, &w2, &w3).unwrap());
        let v1 = [rat(1, 1), rat(2, 1), rat(3, 1)];
        let v2 = [rat(1, 1), rat(1, 1), rat(1, 1)];
        let v3 = [rat(4, 3), rat(9, 5), rat(1, 6)];
        assert!(check_yang_baxter_3(&v1, &v2, &v3).unwrap());
    }

    #[test]
    fn tropical_yang_baxter_on_random_integer_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
        for _ in 0..200 {
            let mut draw = || MinPlus::Finite(rng.gen_range(-20..=20));
            assert!(check_tropical_yang_baxter_2(
                [draw(), draw()],
                [draw(), draw()],
                [draw(), draw()],
            ));
            assert!(check_tropical_yang_baxter_3(
                [draw(), draw(), draw()],
                [draw(), draw(), draw()],
                [draw(), draw(), draw()],
            ));
        }
    }

    #[test]
    fn tropical_three_wire_reproduces_the_carrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xcafe);
        for _ in 0..500 {
            let baskets = rng.gen_range(0..6u32);
            let balls = rng.gen_range(0..=baskets + 1);
            let site = SiteState::from_counts(baskets, balls).unwrap();
            let carrier = CarrierState {
                capacity: if rng.gen_bool(0.5) {
                    MinPlus::Infinity
                } else {
                    MinPlus::Finite(rng.gen_range(1..8))
                },
                baskets: rng.gen_range(0..6),
                balls: rng.gen_range(0..6),
            };
            if carrier.free() < MinPlus::Finite(0) {
                continue;
            }
            assert_eq!(
                carrier_step_via_whurl(carrier, site),
                carrier_step(carrier, site),
                "carrier {carrier:?} at site {site:?}",
            );
        }
    }

    // The classical box-ball carrier as a two-wire tropicalization: ride the
    // carrier on x = (free room, carried balls) and the box on
    // y = (1 - occupancy, occupancy).
    #[test]
    fn tropical_two_wire_reproduces_the_boxball_carrier() {
        for capacity in [MinPlus::Finite(1), MinPlus::Finite(3), MinPlus::Infinity] {
            for carry in 0..5i64 {
                if MinPlus::Finite(carry) > capacity {
                    continue;
                }
                for cell in 0..=1i64 {
                    let x = [capacity + (-carry), MinPlus::Finite(carry)];
                    let y = [MinPlus::Finite(1 - cell), MinPlus::Finite(cell)];
                    let ([new_empty, new_cell], [new_free, new_carry]) = tropical_2wire(x, y);
                    // Direct statement of the carrier rule.
                    let picks = cell == 1 && MinPlus::Finite(carry) < capacity;
                    let drops = cell == 0 && carry > 0;
                    let want_cell = if picks {
                        0
                    } else if drops {
                        1
                    } else {
                        cell
                    };
                    let want_carry = carry + i64::from(picks) - i64::from(drops);
                    assert_eq!(new_cell, MinPlus::Finite(want_cell));
                    assert_eq!(new_carry, MinPlus::Finite(want_carry));
                    assert_eq!(new_empty, MinPlus::Finite(1 - want_cell));
                    assert_eq!(new_free, capacity + (-want_carry));
                }
            }
        }
    }
}
