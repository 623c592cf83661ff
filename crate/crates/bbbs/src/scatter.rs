//! Scattering experiments: phase-shift measurement and prediction.
//!
//! An experiment lines up basic solitons left to right in decreasing speed
//! with vacuum gaps between them, evolves until the state is a separated,
//! speed-sorted union of blocks, and reads off phase shifts. A soliton that
//! started at position p with effective speed v sits at p + Nv + delta after
//! N steps; delta is its phase shift. Entity shifts compare the k-th ball
//! (or basket) of an incoming soliton with the k-th ball of its outgoing
//! counterpart, which is the only correspondence under which the measured
//! tables reproduce the two-body laws; reports carry that convention by
//! name. Measured shifts are capacity independent, so reports for different
//! carriers can be compared directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorial::evolve_combinatorial;
use crate::evolve::evolve;
use crate::minplus::MinPlus;
use crate::soliton::{
    classify_basic, count_solitons, decompose, slow_anatomy, Classification, Decomposition,
    SolitonCensus, SolitonDescriptor, SolitonKind,
};
use crate::state::{Configuration, Token};

/// A ball or basket named by its global reading-order number in the initial
/// state of an experiment. Balls and baskets are numbered independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityId {
    Basket(u32),
    Ball(u32),
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityId::Basket(n) => write!(f, "basket:{n}"),
            EntityId::Ball(n) => write!(f, "ball:{n}"),
        }
    }
}

impl FromStr for EntityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, num) = s
            .split_once(':')
            .ok_or_else(|| format!("bad entity id {s:?}"))?;
        let n: u32 = num
            .parse()
            .map_err(|_| format!("bad entity number {num:?}"))?;
        match kind {
            "basket" => Ok(EntityId::Basket(n)),
            "ball" => Ok(EntityId::Ball(n)),
            _ => Err(format!("bad entity kind {kind:?}")),
        }
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct ScatteringExperiment {
    pub capacity: MinPlus,
    pub horizon: u64,
    /// Initial solitons with their absolute positions, left to right.
    pub solitons: Vec<SolitonDescriptor>,
    pub initial: Configuration,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("spec {index} is not a basic soliton: {reason}")]
    NotBasic { index: usize, reason: String },
    #[error("soliton {index} is slower than its right neighbor ({left} then {right})")]
    BadOrdering { index: usize, left: u32, right: u32 },
    #[error("gap {index} must hold at least one vacuum site, got {gap}")]
    InsufficientGap { index: usize, gap: i64 },
    #[error("{solitons} solitons need {expected} gaps, got {got}")]
    GapCount {
        solitons: usize,
        expected: usize,
        got: usize,
    },
    #[error("carrier capacity must be at least 1")]
    BadCapacity,
}

/// Generous step budget: four sweeps of the support plus all amplitudes.
pub fn default_horizon(config: &Configuration) -> u64 {
    4 * (config.sites.len() as u64 + config.ball_count() + config.basket_count()) + 8
}

/// Lays out basic solitons with the requested vacuum gaps.
///
/// Speeds (free-propagation, so capacity independent) must be non-increasing
/// left to right. A horizon of 0 asks for the default budget.
pub fn build_experiment(
    specs: &[Vec<Token>],
    gaps: &[i64],
    capacity: MinPlus,
    horizon: u64,
) -> Result<ScatteringExperiment, BuildError> {
    if capacity < MinPlus::Finite(1) {
        return Err(BuildError::BadCapacity);
    }
    let expected = specs.len().saturating_sub(1);
    if gaps.len() != expected {
        return Err(BuildError::GapCount {
            solitons: specs.len(),
            expected,
            got: gaps.len(),
        });
    }
    let mut solitons = Vec::with_capacity(specs.len());
    let mut tokens = Vec::new();
    let mut cursor = 0i64;
    for (index, spec) in specs.iter().enumerate() {
        let kind = match classify_basic(spec) {
            Ok(Classification::Fast(k)) => SolitonKind::Fast(k),
            Ok(Classification::Slow) => SolitonKind::Slow,
            Ok(Classification::NotBasic(reason)) => {
                return Err(BuildError::NotBasic {
                    index,
                    reason: reason.to_string(),
                })
            }
            Err(err) => {
                return Err(BuildError::NotBasic {
                    index,
                    reason: err.to_string(),
                })
            }
        };
        if index > 0 {
            let gap = gaps[index - 1];
            if gap < 1 {
                return Err(BuildError::InsufficientGap {
                    index: index - 1,
                    gap,
                });
            }
            for _ in 0..gap {
                tokens.push(Token::Vacuum);
            }
            cursor += gap;
        }
        let descriptor = SolitonDescriptor {
            kind,
            tokens: spec.clone(),
            position: cursor,
        };
        if let Some(prev) = solitons.last() {
            let prev: &SolitonDescriptor = prev;
            if prev.speed() < descriptor.speed() {
                return Err(BuildError::BadOrdering {
                    index,
                    left: prev.speed(),
                    right: descriptor.speed(),
                });
            }
        }
        cursor += spec.len() as i64;
        tokens.extend(spec.iter().copied());
        solitons.push(descriptor);
    }
    let initial = Configuration::from_tokens(0, tokens);
    let horizon = if horizon == 0 {
        default_horizon(&initial)
    } else {
        horizon
    };
    Ok(ScatteringExperiment {
        capacity,
        horizon,
        solitons,
        initial,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolitonDelta {
    pub tokens: String,
    pub position: i64,
    pub velocity: u32,
    pub delta: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseReport {
    pub capacity: MinPlus,
    pub steps: u64,
    /// One entry per initial soliton, in initial left-to-right order.
    pub solitons: Vec<SolitonDelta>,
    pub entities: BTreeMap<EntityId, i64>,
    /// How outgoing entities were matched to incoming ones.
    pub entity_convention: &'static str,
    pub final_state: String,
    pub final_decomposition: String,
}

impl PhaseReport {
    /// The capacity-independent content: soliton shifts plus entity shifts.
    pub fn shifts(&self) -> (Vec<i64>, &BTreeMap<EntityId, i64>) {
        (
            self.solitons.iter().map(|s| s.delta).collect(),
            &self.entities,
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("horizon {horizon} too small, last state {last}")]
    HorizonTooSmall { horizon: u64, last: String },
    #[error("unsupported experiment: {0}")]
    Unsupported(String),
}

const ENTITY_CONVENTION: &str = "rank-within-matched-soliton";

struct SolMeta {
    tokens: Vec<Token>,
    position: i64,
    velocity: u32,
    first_ball: u32,
    ball_positions: Vec<i64>,
    first_basket: u32,
    basket_positions: Vec<i64>,
}

fn tokens_text(tokens: &[Token]) -> String {
    let words: Vec<String> = tokens.iter().map(Token::to_string).collect();
    words.join(" ")
}

fn entity_positions(tokens: &[Token], position: i64) -> (Vec<i64>, Vec<i64>) {
    let mut balls = Vec::new();
    let mut baskets = Vec::new();
    for (offset, token) in tokens.iter().enumerate() {
        let site = token.site();
        let pos = position + offset as i64;
        for _ in 0..site.balls() {
            balls.push(pos);
        }
        for _ in 0..site.baskets() {
            baskets.push(pos);
        }
    }
    (balls, baskets)
}

fn soliton_metas(solitons: &[SolitonDescriptor], capacity: MinPlus) -> Vec<SolMeta> {
    let mut next_ball = 1u32;
    let mut next_basket = 1u32;
    solitons
        .iter()
        .map(|s| {
            let (ball_positions, basket_positions) = entity_positions(&s.tokens, s.position);
            let meta = SolMeta {
                tokens: s.tokens.clone(),
                position: s.position,
                velocity: s.speed_under(capacity),
                first_ball: next_ball,
                ball_positions,
                first_basket: next_basket,
                basket_positions,
            };
            next_ball += meta.ball_positions.len() as u32;
            next_basket += meta.basket_positions.len() as u32;
            meta
        })
        .collect()
}

struct Identified {
    decomposition: Decomposition,
    /// Leftmost letter of each initial soliton's outgoing counterpart.
    positions: Vec<i64>,
    ball_groups: Vec<Vec<i64>>,
    basket_groups: Vec<Vec<i64>>,
}

/// Matches a separated, speed-sorted state against the initial solitons.
///
/// Movers (effective speed above 1) must reappear token for token; repeats
/// are matched in order, which is sound because equal tokens mean equal
/// speed and equal speeds never pass each other. Everything slower moves at
/// speed 1 and keeps its relative order. A single slow soliton may leave
/// as several blocks (an initial ball lags the rest), so with one incoming
/// crawler the whole residue counts as its outgoing counterpart; with more,
/// blocks must match one for one.
fn try_identify(state: &Configuration, metas: &[SolMeta], capacity: MinPlus) -> Option<Identified> {
    let decomposition = decompose(state)?;
    let out = &decomposition.solitons;
    let speeds: Vec<u32> = out.iter().map(|s| s.speed_under(capacity)).collect();
    if speeds.windows(2).any(|w| w[0] > w[1]) {
        return None;
    }
    let mut used = vec![false; out.len()];
    let mut positions = vec![0i64; metas.len()];
    let mut ball_groups: Vec<Vec<i64>> = vec![Vec::new(); metas.len()];
    let mut basket_groups: Vec<Vec<i64>> = vec![Vec::new(); metas.len()];

    for (k, meta) in metas.iter().enumerate() {
        if meta.velocity <= 1 {
            continue;
        }
        let found = out
            .iter()
            .enumerate()
            .position(|(i, s)| !used[i] && speeds[i] > 1 && s.tokens == meta.tokens)?;
        used[found] = true;
        positions[k] = out[found].position;
        let (balls, baskets) = entity_positions(&out[found].tokens, out[found].position);
        ball_groups[k] = balls;
        basket_groups[k] = baskets;
    }
    if out
        .iter()
        .enumerate()
        .any(|(i, _)| speeds[i] > 1 && !used[i])
    {
        return None;
    }

    let crawler_indices: Vec<usize> = (0..metas.len())
        .filter(|&k| metas[k].velocity <= 1)
        .collect();
    let residue: Vec<usize> = (0..out.len()).filter(|&i| speeds[i] <= 1).collect();
    match crawler_indices.len() {
        0 => {
            if !residue.is_empty() {
                return None;
            }
        }
        1 => {
            let k = crawler_indices[0];
            if residue.is_empty() {
                return None;
            }
            let mut balls = Vec::new();
            let mut baskets = Vec::new();
            for &i in &residue {
                let (b, bk) = entity_positions(&out[i].tokens, out[i].position);
                balls.extend(b);
                baskets.extend(bk);
            }
            if balls.len() != metas[k].ball_positions.len()
                || baskets.len() != metas[k].basket_positions.len()
            {
                return None;
            }
            positions[k] = out[residue[0]].position;
            ball_groups[k] = balls;
            basket_groups[k] = baskets;
        }
        _ => {
            if residue.len() != crawler_indices.len() {
                return None;
            }
            for (&k, &i) in crawler_indices.iter().zip(&residue) {
                if out[i].tokens != metas[k].tokens {
                    return None;
                }
                positions[k] = out[i].position;
                let (b, bk) = entity_positions(&out[i].tokens, out[i].position);
                ball_groups[k] = b;
                basket_groups[k] = bk;
            }
        }
    }
    Some(Identified {
        decomposition,
        positions,
        ball_groups,
        basket_groups,
    })
}

fn advance(state: &Configuration, capacity: MinPlus) -> Configuration {
    if capacity.is_infinite() {
        evolve_combinatorial(state)
    } else {
        evolve(state, capacity).expect("capacity validated at build time")
    }
}

struct MeasuredCore {
    steps: u64,
    final_state: Configuration,
    identified: Identified,
}

fn measure_core(
    initial: &Configuration,
    metas: &[SolMeta],
    capacity: MinPlus,
    horizon: u64,
) -> Result<MeasuredCore, PhaseError> {
    let mut state = initial.clone().normalized();
    for step in 0..=horizon {
        if let Some(identified) = try_identify(&state, metas, capacity) {
            return Ok(MeasuredCore {
                steps: step,
                final_state: state,
                identified,
            });
        }
        if step < horizon {
            state = advance(&state, capacity);
        }
    }
    Err(PhaseError::HorizonTooSmall {
        horizon,
        last: state.to_string(),
    })
}

fn assemble_report(capacity: MinPlus, metas: &[SolMeta], core: MeasuredCore) -> PhaseReport {
    let n = i64::try_from(core.steps).expect("step count fits i64");
    let mut entities = BTreeMap::new();
    let mut solitons = Vec::with_capacity(metas.len());
    for (k, meta) in metas.iter().enumerate() {
        let v = i64::from(meta.velocity);
        let delta = core.identified.positions[k] - (meta.position + n * v);
        solitons.push(SolitonDelta {
            tokens: tokens_text(&meta.tokens),
            position: meta.position,
            velocity: meta.velocity,
            delta,
        });
        for (j, &initial_pos) in meta.ball_positions.iter().enumerate() {
            let shift = core.identified.ball_groups[k][j] - (initial_pos + n * v);
            entities.insert(EntityId::Ball(meta.first_ball + j as u32), shift);
        }
        for (j, &initial_pos) in meta.basket_positions.iter().enumerate() {
            let shift = core.identified.basket_groups[k][j] - (initial_pos + n * v);
            entities.insert(EntityId::Basket(meta.first_basket + j as u32), shift);
        }
        if meta.velocity > 1 {
            debug_assert!(
                meta.ball_positions
                    .iter()
                    .enumerate()
                    .all(|(j, &p)| { core.identified.ball_groups[k][j] - (p + n * v) == delta }),
                "a translated soliton shifts rigidly"
            );
        }
    }
    PhaseReport {
        capacity,
        steps: core.steps,
        solitons,
        entities,
        entity_convention: ENTITY_CONVENTION,
        final_state: core.final_state.to_string(),
        final_decomposition: core.identified.decomposition.to_string(),
    }
}

/// Evolves the experiment until its solitons separate in sorted order, then
/// reports phase shifts per soliton and per entity.
pub fn measure_phase(e: &ScatteringExperiment) -> Result<PhaseReport, PhaseError> {
    let metas = soliton_metas(&e.solitons, e.capacity);
    let core = measure_core(&e.initial, &metas, e.capacity, e.horizon)?;
    Ok(assemble_report(e.capacity, &metas, core))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhasePrediction {
    /// Per-soliton shift, [faster, slower].
    pub solitons: Vec<i64>,
    pub entities: BTreeMap<EntityId, i64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredictError {
    #[error("unsupported pair: {0}")]
    UnsupportedPair(String),
}

/// Two-body phase-shift table.
///
/// Fast over fast: the faster gains 2n, the slower loses 2n, where n is the
/// slower amplitude. Fast over slow: the fast soliton shifts by 2b - a for
/// b balls and a baskets in the slow one; special baskets keep phase 0,
/// every other basket and every non-initial slow ball loses 1, an initial
/// ball loses 2. A pure basket run is the b = 0 case: the run loses 1 and
/// the fast soliton loses a. Pairs with equal effective speed never meet.
pub fn predict_two_body(
    a: &SolitonDescriptor,
    b: &SolitonDescriptor,
    capacity: MinPlus,
) -> Result<PhasePrediction, PredictError> {
    if capacity < MinPlus::Finite(1) {
        return Err(PredictError::UnsupportedPair(
            "carrier capacity must be at least 1".into(),
        ));
    }
    let va = a.speed_under(capacity);
    let vb = b.speed_under(capacity);
    if va <= vb {
        return Err(PredictError::UnsupportedPair(format!(
            "speeds {va} then {vb} under capacity {capacity}: the left soliton never overtakes"
        )));
    }
    let mut entities = BTreeMap::new();
    let m = match a.kind {
        SolitonKind::Fast(m) => m,
        SolitonKind::Slow => unreachable!("slow solitons have speed 1, never faster"),
    };
    match b.kind {
        SolitonKind::Fast(n) => {
            let gain = 2 * i64::from(n);
            for ball in 1..=m {
                entities.insert(EntityId::Ball(ball), gain);
            }
            for ball in m + 1..=m + n {
                entities.insert(EntityId::Ball(ball), -gain);
            }
            Ok(PhasePrediction {
                solitons: vec![gain, -gain],
                entities,
            })
        }
        SolitonKind::Slow => {
            let anatomy = slow_anatomy(&b.tokens).expect("descriptor tokens are basic");
            let fast_shift = 2 * i64::from(anatomy.ball_count) - i64::from(anatomy.basket_count);
            for ball in 1..=m {
                entities.insert(EntityId::Ball(ball), fast_shift);
            }
            let mut slow_shift = i64::MAX;
            for basket in 1..=anatomy.basket_count {
                let shift = if anatomy.is_special(basket) { 0 } else { -1 };
                entities.insert(EntityId::Basket(basket), shift);
                slow_shift = slow_shift.min(anatomy.basket_offsets[basket as usize] + shift);
            }
            for ball in 1..=anatomy.ball_count {
                let shift = if anatomy.initial_ball == Some(ball) {
                    -2
                } else {
                    -1
                };
                entities.insert(EntityId::Ball(m + ball), shift);
                slow_shift = slow_shift.min(anatomy.ball_offsets[ball as usize] + shift);
            }
            Ok(PhasePrediction {
                solitons: vec![fast_shift, slow_shift],
                entities,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub mismatches: Vec<String>,
    pub measured: PhaseReport,
    pub predicted: PhasePrediction,
}

/// Measures a two-soliton experiment and checks it against the prediction
/// table, reporting any per-soliton or per-entity disagreement.
pub fn run_and_verify(e: &ScatteringExperiment) -> Result<VerifyOutcome, PhaseError> {
    if e.solitons.len() != 2 {
        return Err(PhaseError::Unsupported(format!(
            "two-body verification needs exactly 2 solitons, got {}",
            e.solitons.len()
        )));
    }
    let predicted = predict_two_body(&e.solitons[0], &e.solitons[1], e.capacity)
        .map_err(|err| PhaseError::Unsupported(err.to_string()))?;
    let measured = measure_phase(e)?;
    let mut mismatches = Vec::new();
    for (k, soliton) in measured.solitons.iter().enumerate() {
        if soliton.delta != predicted.solitons[k] {
            mismatches.push(format!(
                "soliton {k} ({}): measured {} predicted {}",
                soliton.tokens, soliton.delta, predicted.solitons[k]
            ));
        }
    }
    for (id, &want) in &predicted.entities {
        match measured.entities.get(id) {
            Some(&got) if got == want => {}
            Some(&got) => mismatches.push(format!("{id}: measured {got} predicted {want}")),
            None => mismatches.push(format!("{id}: missing from measurement")),
        }
    }
    if measured.entities.len() != predicted.entities.len() {
        mismatches.push(format!(
            "entity counts differ: measured {} predicted {}",
            measured.entities.len(),
            predicted.entities.len()
        ));
    }
    Ok(VerifyOutcome {
        pass: mismatches.is_empty(),
        mismatches,
        measured,
        predicted,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StageSummary {
    pub capacity: MinPlus,
    pub steps: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NBodyReport {
    pub report: PhaseReport,
    /// Sum of two-body predictions over every overtaking pair.
    pub predicted: Vec<i64>,
    /// Totals accumulated by evolving with carriers 2, 3, ... in turn.
    pub staged: Vec<i64>,
    pub stages: Vec<StageSummary>,
    pub pass: bool,
    pub mismatches: Vec<String>,
}

/// Runs an n-soliton experiment and verifies that every total shift is the
/// sum of its two-body predictions, measured twice: directly under the
/// experiment's capacity and through the staged schedule that evolves with
/// capacity 2 until sorted, then 3, and so on.
///
/// Fast solitons must have pairwise distinct amplitudes and speed-1 solitons
/// must be pure basket runs, so every outgoing block is identifiable.
pub fn run_n_body(e: &ScatteringExperiment) -> Result<NBodyReport, PhaseError> {
    let mut max_fast = 0u32;
    let mut fast_lengths = Vec::new();
    for s in &e.solitons {
        match s.kind {
            SolitonKind::Fast(k) if k >= 2 => {
                if fast_lengths.contains(&k) {
                    return Err(PhaseError::Unsupported(format!(
                        "two fast solitons of amplitude {k}: outgoing blocks would be ambiguous"
                    )));
                }
                fast_lengths.push(k);
                max_fast = max_fast.max(k);
            }
            SolitonKind::Fast(_) | SolitonKind::Slow => {
                let pure_run = s.tokens.iter().all(|t| matches!(t, Token::Baskets(_)));
                if !pure_run {
                    return Err(PhaseError::Unsupported(format!(
                        "speed-1 soliton {} is not a pure basket run; its outgoing shape differs",
                        tokens_text(&s.tokens)
                    )));
                }
            }
        }
    }
    if e.capacity < MinPlus::Finite(i64::from(max_fast.max(1))) {
        return Err(PhaseError::Unsupported(format!(
            "capacity {} caps a fast soliton; every pair must scatter as under the unbounded carrier",
            e.capacity
        )));
    }

    let n = e.solitons.len();
    let mut predicted = vec![0i64; n];
    for i in 0..n {
        for j in i + 1..n {
            let (vi, vj) = (e.solitons[i].speed(), e.solitons[j].speed());
            if vi <= vj {
                continue;
            }
            let pair = predict_two_body(&e.solitons[i], &e.solitons[j], MinPlus::Infinity)
                .expect("left strictly faster");
            predicted[i] += pair.solitons[0];
            predicted[j] += pair.solitons[1];
        }
    }

    let report = measure_phase(e)?;

    let mut staged = vec![0i64; n];
    let mut stages = Vec::new();
    let mut state = e.initial.clone().normalized();
    let mut positions: Vec<i64> = e.solitons.iter().map(|s| s.position).collect();
    for stage_capacity in 2..=i64::from(max_fast) {
        let capacity = MinPlus::Finite(stage_capacity);
        let solitons: Vec<SolitonDescriptor> = e
            .solitons
            .iter()
            .zip(&positions)
            .map(|(s, &p)| SolitonDescriptor {
                kind: s.kind,
                tokens: s.tokens.clone(),
                position: p,
            })
            .collect();
        let metas = soliton_metas(&solitons, capacity);
        let core = measure_core(&state, &metas, capacity, default_horizon(&state))?;
        let steps = i64::try_from(core.steps).expect("step count fits i64");
        for k in 0..n {
            staged[k] += core.identified.positions[k]
                - (positions[k] + steps * i64::from(metas[k].velocity));
        }
        positions = core.identified.positions.clone();
        stages.push(StageSummary {
            capacity,
            steps: core.steps,
        });
        state = core.final_state;
    }

    let mut mismatches = Vec::new();
    for k in 0..n {
        let direct = report.solitons[k].delta;
        if direct != predicted[k] || staged[k] != predicted[k] {
            mismatches.push(format!(
                "soliton {k} ({}): direct {direct}, staged {}, predicted {}",
                report.solitons[k].tokens, staged[k], predicted[k]
            ));
        }
    }
    Ok(NBodyReport {
        report,
        predicted,
        staged,
        stages,
        pass: mismatches.is_empty(),
        mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SortingReport {
    pub first_separation: u64,
    pub stable_at: u64,
    pub census: SolitonCensus,
    pub final_decomposition: String,
    pub violations: Vec<String>,
    #[serde(skip_serializing)]
    pub decomposition: Decomposition,
}

/// Evolves an arbitrary state under the unbounded carrier until it is a
/// stable union of basic solitons.
///
/// Stability means decompose succeeds at two consecutive times with the same
/// shapes, each advanced by its own speed; a one-shot success can be a
/// transient. The census is pinned the first time the state separates (at
/// step 0 that is the composite accounting of the input itself) and any
/// later separated census must agree.
pub fn check_sorting(config: &Configuration, horizon: u64) -> Result<SortingReport, PhaseError> {
    let mut state = config.clone().normalized();
    let horizon = if horizon == 0 {
        default_horizon(&state)
    } else {
        horizon
    };
    let mut first_separation = None;
    let mut reference: Option<SolitonCensus> = None;
    let mut violations = Vec::new();
    let mut prev: Option<Decomposition> = None;
    for step in 0..=horizon {
        let current = decompose(&state);
        if let Some(d) = &current {
            let census = count_solitons(d);
            match (&reference, first_separation) {
                (None, _) => {
                    reference = Some(census.clone());
                    first_separation = Some(step);
                }
                (Some(want), _) if *want != census => {
                    violations.push(format!(
                        "census changed after separation at step {step}: {want:?} then {census:?}"
                    ));
                    reference = Some(census.clone());
                }
                _ => {}
            }
            if let Some(before) = &prev {
                let stable = before.solitons.len() == d.solitons.len()
                    && before.solitons.iter().zip(&d.solitons).all(|(p, q)| {
                        p.tokens == q.tokens && q.position == p.position + i64::from(p.speed())
                    });
                if stable {
                    return Ok(SortingReport {
                        first_separation: first_separation.expect("separation recorded"),
                        stable_at: step,
                        census,
                        final_decomposition: d.to_string(),
                        violations,
                        decomposition: d.clone(),
                    });
                }
            }
        }
        prev = current;
        if step < horizon {
            state = evolve(&state, MinPlus::Infinity).expect("unbounded carrier always returns");
        }
    }
    Err(PhaseError::HorizonTooSmall {
        horizon,
        last: state.to_string(),
    })
}
