//! Executable probes for the mechanisms' game-theoretic properties.
//!
//! Rather than trusting the analysis, these probes hammer the mechanisms
//! with randomized instances: deviation sweeps for truthfulness, Sybil-set
//! injections for Sybil-proofness, and a Monte Carlo best-response search
//! for the equilibrium Sybil strategy. Every probe is deterministic for a
//! fixed seed regardless of thread count — trials draw from per-index
//! sub-streams and reduce in order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curve::{PoolState, TradingCurve};
use crate::error::{Error, Result};
use crate::mechanism::{
    arbitrageur_utility, run_mechanism, user_utility, ArbitrageurReport, MechanismKind, SlotInput,
};
use crate::orders::{limit_state, SwapOrder};
use crate::pool::{Direction, PoolConfig};
use crate::valuation::tx_value;

/// An arbitrageur as the probes see it: a true belief, token budgets for
/// Sybil orders, and the prior other players believe the belief is drawn
/// from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArbitrageurProfile {
    pub true_belief: f64,
    pub budget_x: f64,
    pub budget_y: f64,
    pub prior: BeliefPrior,
}

impl ArbitrageurProfile {
    pub fn new(true_belief: f64, budget_x: f64, budget_y: f64, prior: BeliefPrior) -> Result<Self> {
        if !(true_belief > 0.0 && true_belief.is_finite()) {
            return Err(Error::InvalidPrice(true_belief));
        }
        if budget_x < 0.0 || budget_y < 0.0 {
            return Err(Error::InvalidOrder("budgets must be non-negative".into()));
        }
        prior.validate()?;
        Ok(Self {
            true_belief,
            budget_x,
            budget_y,
            prior,
        })
    }
}

/// Priors over beliefs used by the Sybil-strategy optimizer and the
/// equilibrium probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BeliefPrior {
    Uniform { lo: f64, hi: f64 },
    PointMass { v: f64 },
}

impl BeliefPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BeliefPrior::Uniform { lo, hi } => {
                if lo > 0.0 && lo.is_finite() && hi >= lo && hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidPrior)
                }
            }
            BeliefPrior::PointMass { v } => {
                if v > 0.0 && v.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidPrior)
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            BeliefPrior::Uniform { lo, hi } => {
                if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            }
            BeliefPrior::PointMass { v } => v,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            BeliefPrior::Uniform { hi, .. } => hi,
            BeliefPrior::PointMass { v } => v,
        }
    }

    pub fn lower(&self) -> f64 {
        match *self {
            BeliefPrior::Uniform { lo, .. } => lo,
            BeliefPrior::PointMass { v } => v,
        }
    }
}

/// One Sybil order: spend the whole budget, demand `delta_out` back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SybilLeg {
    pub delta_in: f64,
    pub delta_out: f64,
    pub expected_profit: f64,
}

/// Up to one Sybil order per direction, as the equilibrium construction
/// merges same-direction orders anyway.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SybilStrategy {
    pub sell_x: Option<SybilLeg>,
    pub buy_x: Option<SybilLeg>,
}

impl SybilStrategy {
    pub fn is_empty(&self) -> bool {
        self.sell_x.is_none() && self.buy_x.is_none()
    }

    pub fn expected_profit(&self) -> f64 {
        self.sell_x.map_or(0.0, |l| l.expected_profit) + self.buy_x.map_or(0.0, |l| l.expected_profit)
    }

    pub fn orders(&self, owner: &str) -> Vec<SwapOrder> {
        let mut out = Vec::new();
        if let Some(leg) = self.sell_x {
            out.push(SwapOrder::sell_x(leg.delta_in, leg.delta_out, owner).expect("positive leg"));
        }
        if let Some(leg) = self.buy_x {
            out.push(SwapOrder::buy_x(leg.delta_in, leg.delta_out, owner).expect("positive leg"));
        }
        out
    }
}

/// A randomized mechanism instance: constant product pool, pending orders,
/// and one true belief per arbitrageur (ids are positions).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub k: f64,
    pub fee: f64,
    pub s0: PoolState,
    pub orders: Vec<SwapOrder>,
    pub beliefs: Vec<f64>,
}

impl Instance {
    pub fn config(&self) -> PoolConfig {
        PoolConfig::new(crate::curve::ConstantProduct::new(self.k).expect("valid k"), self.fee)
            .expect("valid fee")
    }

    pub fn truthful_reports(&self) -> Vec<ArbitrageurReport> {
        self.beliefs
            .iter()
            .enumerate()
            .map(|(i, &v)| ArbitrageurReport { arb: i, q: v })
            .collect()
    }

    pub fn slot_input(&self, reports: Vec<ArbitrageurReport>, seed: u64) -> SlotInput {
        SlotInput {
            s0: self.s0,
            orders: self.orders.clone(),
            reports,
            seed,
        }
    }
}

/// Draws random instances: log-uniform pool size and prices, a handful of
/// orders with limit prices scattered around spot.
#[derive(Debug, Clone)]
pub struct InstanceSampler {
    pub k_range: (f64, f64),
    pub price_range: (f64, f64),
    pub arbs: (usize, usize),
    pub orders: (usize, usize),
}

impl Default for InstanceSampler {
    fn default() -> Self {
        Self {
            k_range: (100.0, 1e6),
            price_range: (0.1, 100.0),
            arbs: (2, 4),
            orders: (0, 3),
        }
    }
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        lo * (hi / lo).powf(rng.random_range(0.0..1.0))
    } else {
        lo
    }
}

impl InstanceSampler {
    pub fn sample(&self, rng: &mut impl Rng) -> Instance {
        let k = log_uniform(rng, self.k_range.0, self.k_range.1);
        let spot = log_uniform(rng, self.price_range.0, self.price_range.1);
        let s0 = PoolState {
            x: (k / spot).sqrt(),
            y: (k * spot).sqrt(),
        };
        let n = rng.random_range(self.arbs.0..=self.arbs.1);
        let beliefs: Vec<f64> = (0..n)
            .map(|_| log_uniform(rng, self.price_range.0, self.price_range.1))
            .collect();
        let m = rng.random_range(self.orders.0..=self.orders.1);
        let orders = (0..m)
            .map(|i| {
                let target = spot * rng.random_range(-0.7f64..0.7).exp();
                if rng.random_bool(0.5) {
                    let delta_in = s0.x * rng.random_range(0.05..0.6);
                    SwapOrder::sell_x(delta_in, delta_in * target, format!("user{i}")).expect("valid order")
                } else {
                    let delta_in = s0.y * rng.random_range(0.05..0.6);
                    SwapOrder::buy_x(delta_in, delta_in / target, format!("user{i}")).expect("valid order")
                }
            })
            .collect();
        Instance {
            k,
            fee: 0.0,
            s0,
            orders,
            beliefs,
        }
    }
}

/// Draws Sybil sets for the Sybil-proofness probe. Orders are sized as a
/// multiple of the pool reserves and priced *between* the lowest and highest
/// beliefs, so some arbitrageurs value them and others do not — the shape
/// that dilutes proportional refunds.
#[derive(Debug, Clone)]
pub struct SybilSampler {
    pub max_orders: usize,
    /// Order size as a multiple of the matching reserve.
    pub scale: f64,
}

impl SybilSampler {
    pub fn none() -> Self {
        Self {
            max_orders: 0,
            scale: 0.0,
        }
    }

    pub fn large_overpriced() -> Self {
        Self {
            max_orders: 2,
            scale: 2.0,
        }
    }

    pub fn sample(&self, instance: &Instance, rng: &mut impl Rng) -> Vec<SwapOrder> {
        if self.max_orders == 0 {
            return Vec::new();
        }
        let lo = instance.beliefs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = instance.beliefs.iter().cloned().fold(0.0f64, f64::max);
        let count = rng.random_range(1..=self.max_orders);
        (0..count)
            .map(|i| {
                let target = if hi > lo { rng.random_range(lo..hi) } else { lo };
                if rng.random_bool(0.5) {
                    let delta_in = instance.s0.x * self.scale * rng.random_range(0.5..2.0);
                    SwapOrder::sell_x(delta_in, delta_in * target, format!("sybil{i}")).expect("valid order")
                } else {
                    let delta_in = instance.s0.y * self.scale * rng.random_range(0.5..2.0);
                    SwapOrder::buy_x(delta_in, delta_in / target, format!("sybil{i}")).expect("valid order")
                }
            })
            .collect()
    }
}

/// Probe output; `max_violation <= tolerance` means the property survived.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    pub mechanism: String,
    pub trials: u64,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_difference: Option<f64>,
    pub witness: Option<serde_json::Value>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

const PROBE_TOLERANCE: f64 = 1e-9;

/// Geometric grid of multiplicative deviation factors spanning [0.5, 2.0];
/// an odd point count puts 1.0 exactly in the middle.
pub fn deviation_grid(points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![1.0];
    }
    (0..points)
        .map(|i| 0.5 * 4.0f64.powf(i as f64 / (points - 1) as f64))
        .collect()
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

/// Sweeps reports of a designated arbitrageur across `deviation_factors`
/// (multiples of the true belief) and records the largest utility gain over
/// truthful reporting. A truthful mechanism keeps the gain at zero.
pub fn truthfulness_probe(
    mechanism: MechanismKind,
    sampler: &InstanceSampler,
    deviation_factors: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::SchemaMismatch("trials must be at least 1".into()));
    }
    let results: Vec<(f64, Option<serde_json::Value>)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, Option<serde_json::Value>)> {
            let mut rng = trial_rng(seed, trial);
            let instance = sampler.sample(&mut rng);
            let config = instance.config();
            let truthful = run_mechanism(mechanism, &config, &instance.slot_input(instance.truthful_reports(), seed ^ trial))?;
            let baseline = arbitrageur_utility(&truthful, 0, instance.beliefs[0], &[])?;
            let mut worst = (f64::NEG_INFINITY, 1.0);
            for &factor in deviation_factors {
                let mut reports = instance.truthful_reports();
                reports[0].q = instance.beliefs[0] * factor;
                let outcome = run_mechanism(mechanism, &config, &instance.slot_input(reports, seed ^ trial))?;
                let utility = arbitrageur_utility(&outcome, 0, instance.beliefs[0], &[])?;
                let gain = utility - baseline;
                if gain > worst.0 {
                    worst = (gain, factor);
                }
            }
            let witness = (worst.0 > PROBE_TOLERANCE).then(|| {
                json!({
                    "instance": instance,
                    "deviation_factor": worst.1,
                    "gain": worst.0,
                })
            });
            Ok((worst.0, witness))
        })
        .collect::<Result<_>>()?;

    let (max_violation, witness) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, None), |acc, (gain, witness)| {
            if gain > acc.0 {
                (gain, witness)
            } else {
                acc
            }
        });
    Ok(ProbeReport {
        probe: "truthfulness".into(),
        mechanism: mechanism_name(mechanism),
        trials,
        seed,
        max_violation,
        tolerance: PROBE_TOLERANCE,
        max_abs_difference: None,
        witness,
    })
}

/// Injects random Sybil sets and compares every real user's utility with and
/// without them, reports fixed. Records the worst utility drop and, for the
/// stronger identity check, the largest absolute difference.
pub fn sybil_probe(
    mechanism: MechanismKind,
    sampler: &InstanceSampler,
    sybil_sampler: &SybilSampler,
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::SchemaMismatch("trials must be at least 1".into()));
    }
    let results: Vec<(f64, f64, Option<serde_json::Value>)> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, f64, Option<serde_json::Value>)> {
            let mut rng = trial_rng(seed, trial);
            let instance = sampler.sample(&mut rng);
            let config = instance.config();
            let reports = instance.truthful_reports();
            let sybils = sybil_sampler.sample(&instance, &mut rng);

            let without = run_mechanism(mechanism, &config, &instance.slot_input(reports.clone(), seed ^ trial))?;
            let mut with_input = instance.slot_input(reports, seed ^ trial);
            with_input.orders.extend(sybils.iter().cloned());
            let with = run_mechanism(mechanism, &config, &with_input)?;

            let mut max_drop = 0.0f64;
            let mut max_abs = 0.0f64;
            let mut victim = None;
            for j in 0..instance.orders.len() {
                let before = user_utility(&without, j)?;
                let after = user_utility(&with, j)?;
                let drop = before - after;
                if drop > max_drop {
                    max_drop = drop;
                    victim = Some(j);
                }
                max_abs = max_abs.max(drop.abs());
            }
            let witness = (max_drop > PROBE_TOLERANCE).then(|| {
                json!({
                    "instance": instance,
                    "sybil_orders": sybils,
                    "victim_order": victim,
                    "utility_drop": max_drop,
                })
            });
            Ok((max_drop, max_abs, witness))
        })
        .collect::<Result<_>>()?;

    let mut max_violation = 0.0f64;
    let mut max_abs_difference = 0.0f64;
    let mut witness = None;
    for (drop, abs, w) in results {
        if drop > max_violation {
            max_violation = drop;
            witness = w;
        }
        max_abs_difference = max_abs_difference.max(abs);
    }
    Ok(ProbeReport {
        probe: "sybil".into(),
        mechanism: mechanism_name(mechanism),
        trials,
        seed,
        max_violation,
        tolerance: PROBE_TOLERANCE,
        max_abs_difference: Some(max_abs_difference),
        witness,
    })
}

fn mechanism_name(kind: MechanismKind) -> String {
    match kind {
        MechanismKind::Strawman => "strawman".into(),
        MechanismKind::Rediswap => "rediswap".into(),
    }
}

/// Arbitrageur `own_index`'s profit from one of its Sybil orders under the
/// per-item auction, given the realized competitor reports.
///
/// Zero when the order has no limit state, when nobody values it (the item
/// is skipped), or when `own_index` wins its own item — winning means paying
/// yourself, and the sandwich gain cancels the execution loss. Otherwise the
/// profit is the execution value at the true belief plus the second-price
/// refund, which may include the arbitrageur's own bid.
#[allow(clippy::too_many_arguments)]
pub fn sybil_profit_gamma(
    curve: &dyn TradingCurve,
    profile: &ArbitrageurProfile,
    leg: Direction,
    report: f64,
    t_out: f64,
    own_index: usize,
    other_reports: &[f64],
) -> f64 {
    let delta_in = match leg {
        Direction::XtoY => profile.budget_x,
        Direction::YtoX => profile.budget_y,
    };
    if delta_in <= 0.0 || t_out <= 0.0 {
        return 0.0;
    }
    let order = match leg {
        Direction::XtoY => SwapOrder::sell_x(delta_in, t_out, "sybil"),
        Direction::YtoX => SwapOrder::buy_x(delta_in, t_out, "sybil"),
    };
    let Ok(order) = order else { return 0.0 };
    if limit_state(curve, &order).is_err() {
        return 0.0;
    }
    gamma_auction_value(profile, leg, report, t_out, own_index, other_reports)
}

/// The auction arithmetic of [`sybil_profit_gamma`], with the limit-state
/// existence already established. Hot path for the grid search.
fn gamma_auction_value(
    profile: &ArbitrageurProfile,
    leg: Direction,
    report: f64,
    t_out: f64,
    own_index: usize,
    other_reports: &[f64],
) -> f64 {
    let delta_in = match leg {
        Direction::XtoY => profile.budget_x,
        Direction::YtoX => profile.budget_y,
    };
    // potential value of the Sybil order to a report q
    let value_at = |q: f64| match leg {
        Direction::XtoY => delta_in * q - t_out,
        Direction::YtoX => delta_in - t_out * q,
    };
    let n = other_reports.len() + 1;
    let q_at = |pos: usize| {
        if pos == own_index {
            report
        } else if pos < own_index {
            other_reports[pos]
        } else {
            other_reports[pos - 1]
        }
    };

    let mut winner = 0;
    let mut best = f64::NEG_INFINITY;
    for pos in 0..n {
        let v = value_at(q_at(pos));
        if v > best {
            best = v;
            winner = pos;
        }
    }
    if best < 0.0 || winner == own_index {
        return 0.0;
    }
    let mut refund = 0.0f64;
    for pos in 0..n {
        if pos != winner {
            refund = refund.max(value_at(q_at(pos)).max(0.0));
        }
    }
    let execution = -value_at(profile.true_belief);
    execution + refund
}

/// Grid-searches the Sybil order sizes that maximize expected profit against
/// competitor belief priors, one leg per direction. Returns an empty leg
/// whenever no positive expected profit exists.
pub fn optimize_sybil(
    profile: &ArbitrageurProfile,
    competitor_priors: &[BeliefPrior],
    grid_n: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<SybilStrategy> {
    if grid_n < 2 || mc_samples < 1 {
        return Err(Error::SchemaMismatch("optimize_sybil needs grid_n >= 2 and mc_samples >= 1".into()));
    }
    for prior in competitor_priors {
        prior.validate()?;
    }
    if competitor_priors.is_empty() {
        return Ok(SybilStrategy::default());
    }
    if profile.budget_x == 0.0 && profile.budget_y == 0.0 {
        return Ok(SybilStrategy::default());
    }
    // limit-state existence on a constant product curve does not depend on
    // k, so a unit curve stands in for the pool's
    let curve = crate::curve::ConstantProduct::new(1.0).expect("unit curve");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..mc_samples)
        .map(|_| competitor_priors.iter().map(|p| p.sample(&mut rng)).collect())
        .collect();

    let v = profile.true_belief;
    let q_max = competitor_priors.iter().map(|p| p.upper()).fold(0.0f64, f64::max);
    let q_min = competitor_priors
        .iter()
        .map(|p| p.lower())
        .fold(f64::INFINITY, f64::min);

    let expected = |leg: Direction, t: f64| -> f64 {
        // the limit-state check does not depend on the sampled beliefs
        let order = match leg {
            Direction::XtoY => SwapOrder::sell_x(profile.budget_x, t, "sybil"),
            Direction::YtoX => SwapOrder::buy_x(profile.budget_y, t, "sybil"),
        };
        let Ok(order) = order else { return 0.0 };
        if limit_state(&curve, &order).is_err() {
            return 0.0;
        }
        let total: f64 = samples
            .iter()
            .map(|others| gamma_auction_value(profile, leg, v, t, 0, others))
            .sum();
        total / samples.len() as f64
    };

    let search = |leg: Direction, lo: f64, hi: f64| -> Option<SybilLeg> {
        if !(lo > 0.0 && hi > lo) {
            return None;
        }
        let mut best: Option<(f64, f64)> = None;
        for i in 0..grid_n {
            let t = lo * (hi / lo).powf(i as f64 / (grid_n - 1) as f64);
            let profit = expected(leg, t);
            if best.is_none_or(|(_, p)| profit > p) {
                best = Some((t, profit));
            }
        }
        let (t, profit) = best?;
        (profit > 0.0).then_some(SybilLeg {
            delta_in: match leg {
                Direction::XtoY => profile.budget_x,
                Direction::YtoX => profile.budget_y,
            },
            delta_out: t,
            expected_profit: profit,
        })
    };

    let sell_x = (profile.budget_x > 0.0)
        .then(|| search(Direction::XtoY, profile.budget_x * v, profile.budget_x * q_max))
        .flatten();
    let buy_x = (profile.budget_y > 0.0 && q_min > 0.0)
        .then(|| search(Direction::YtoX, profile.budget_y / v, profile.budget_y / q_min))
        .flatten();
    Ok(SybilStrategy { sell_x, buy_x })
}

/// Knobs for the equilibrium (best-response) probe.
#[derive(Debug, Clone)]
pub struct NeProbeConfig {
    /// Multiplicative report deviations around the true belief.
    pub report_factors: Vec<f64>,
    /// Sybil-size deviations per leg (plus "no order").
    pub t_grid: usize,
    /// Outer Monte Carlo samples over competitor beliefs.
    pub mc_samples: usize,
    /// Inner grid for each player's equilibrium strategy.
    pub sybil_grid: usize,
    /// Inner Monte Carlo samples for each player's equilibrium strategy.
    pub sybil_mc: usize,
}

impl Default for NeProbeConfig {
    fn default() -> Self {
        Self {
            report_factors: vec![0.6, 0.8, 0.9, 1.0, 1.1, 1.25, 1.5],
            t_grid: 5,
            mc_samples: 2000,
            sybil_grid: 48,
            sybil_mc: 400,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct DeviationStrategy {
    report: f64,
    sell_t: Option<f64>,
    buy_t: Option<f64>,
}

/// Checks that no joint (report, Sybil-size) deviation beats the equilibrium
/// strategy by more than two Monte Carlo standard errors.
///
/// Every outer sample draws competitor beliefs from their priors, equips
/// each competitor with their own optimized Sybil strategy, and evaluates
/// the deviator's utility (at the true belief) under the equilibrium play
/// and under every deviation, using common random numbers. The reported
/// violation is the largest mean paired gain minus twice its standard error.
pub fn ne_probe(
    config: &PoolConfig,
    s0: PoolState,
    profiles: &[ArbitrageurProfile],
    real_orders: &[SwapOrder],
    ne: &NeProbeConfig,
    seed: u64,
) -> Result<ProbeReport> {
    if profiles.len() < 2 {
        return Err(Error::SchemaMismatch("equilibrium probe needs at least 2 arbitrageurs".into()));
    }
    if ne.mc_samples == 0 {
        return Err(Error::SchemaMismatch("trials must be at least 1".into()));
    }
    let deviator = &profiles[0];
    let v0 = deviator.true_belief;
    let other_priors: Vec<BeliefPrior> = profiles[1..].iter().map(|p| p.prior).collect();
    let equilibrium = optimize_sybil(deviator, &other_priors, ne.sybil_grid, ne.sybil_mc, seed ^ 0x5eed)?;

    // Deviation grid: reports around v0 joined with per-leg t grids (index
    // t_grid means "drop the leg"). The equilibrium strategy is entry 0.
    let q_max = other_priors.iter().map(|p| p.upper()).fold(0.0f64, f64::max);
    let q_min = other_priors.iter().map(|p| p.lower()).fold(f64::INFINITY, f64::min);
    let t_choice = |lo: f64, hi: f64, idx: usize| -> Option<f64> {
        if idx == ne.t_grid || !(lo > 0.0 && hi > lo) {
            return None;
        }
        Some(lo * (hi / lo).powf(idx as f64 / (ne.t_grid.max(2) - 1) as f64))
    };
    let mut strategies: Vec<DeviationStrategy> = vec![DeviationStrategy {
        report: v0,
        sell_t: equilibrium.sell_x.map(|l| l.delta_out),
        buy_t: equilibrium.buy_x.map(|l| l.delta_out),
    }];
    for &factor in &ne.report_factors {
        for sell_idx in 0..=ne.t_grid {
            for buy_idx in 0..=ne.t_grid {
                strategies.push(DeviationStrategy {
                    report: v0 * factor,
                    sell_t: t_choice(deviator.budget_x * v0, deviator.budget_x * q_max, sell_idx),
                    buy_t: if q_min > 0.0 {
                        t_choice(deviator.budget_y / v0, deviator.budget_y / q_min, buy_idx)
                    } else {
                        None
                    },
                });
            }
        }
    }

    let utilities: Vec<Vec<f64>> = (0..ne.mc_samples as u64)
        .into_par_iter()
        .map(|sample| -> Result<Vec<f64>> {
            let mut rng = trial_rng(seed, sample);
            // competitor beliefs and their equilibrium Sybil strategies
            let mut competitor_orders: Vec<(usize, Vec<SwapOrder>)> = Vec::new();
            let mut reports = vec![ArbitrageurReport { arb: 0, q: v0 }];
            for (offset, profile) in profiles[1..].iter().enumerate() {
                let belief = profile.prior.sample(&mut rng);
                let realized = ArbitrageurProfile {
                    true_belief: belief,
                    ..profile.clone()
                };
                let their_priors: Vec<BeliefPrior> = profiles
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != offset + 1)
                    .map(|(_, p)| p.prior)
                    .collect();
                let strategy = optimize_sybil(
                    &realized,
                    &their_priors,
                    ne.sybil_grid,
                    ne.sybil_mc,
                    seed ^ sample.wrapping_mul(31).wrapping_add(offset as u64),
                )?;
                reports.push(ArbitrageurReport {
                    arb: offset + 1,
                    q: belief,
                });
                competitor_orders.push((offset + 1, strategy.orders(&format!("arb{}", offset + 1))));
            }

            let mut row = Vec::with_capacity(strategies.len());
            for strategy in &strategies {
                let mut orders = real_orders.to_vec();
                let mut own_sybil = Vec::new();
                if let Some(t) = strategy.sell_t {
                    own_sybil.push(orders.len());
                    orders.push(SwapOrder::sell_x(deviator.budget_x, t, "arb0").expect("positive leg"));
                }
                if let Some(t) = strategy.buy_t {
                    own_sybil.push(orders.len());
                    orders.push(SwapOrder::buy_x(deviator.budget_y, t, "arb0").expect("positive leg"));
                }
                for (_arb, sybils) in &competitor_orders {
                    orders.extend(sybils.iter().cloned());
                }
                let mut sample_reports = reports.clone();
                sample_reports[0].q = strategy.report;
                let input = SlotInput {
                    s0,
                    orders,
                    reports: sample_reports,
                    seed: seed ^ sample,
                };
                let outcome = crate::mechanism::rediswap_run(config, &input)?;
                row.push(arbitrageur_utility(&outcome, 0, v0, &own_sybil)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let samples = utilities.len() as f64;
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    for (index, strategy) in strategies.iter().enumerate().skip(1) {
        let diffs: Vec<f64> = utilities.iter().map(|row| row[index] - row[0]).collect();
        let mean = diffs.iter().sum::<f64>() / samples;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (samples - 1.0).max(1.0);
        let stderr = (var / samples).sqrt();
        let excess = mean - 2.0 * stderr;
        if excess > max_violation {
            max_violation = excess;
            if excess > PROBE_TOLERANCE {
                witness = Some(json!({
                    "report": strategy.report,
                    "sell_t": strategy.sell_t,
                    "buy_t": strategy.buy_t,
                    "mean_gain": mean,
                    "stderr": stderr,
                }));
            }
        }
    }

    Ok(ProbeReport {
        probe: "ne".into(),
        mechanism: "rediswap".into(),
        trials: ne.mc_samples as u64,
        seed,
        max_violation,
        tolerance: PROBE_TOLERANCE,
        max_abs_difference: None,
        witness,
    })
}

/// Total value the winners extract from a RediSwap outcome, measured at each
/// winner's own report: the per-item maxima summed. Used by the maximal
/// extraction check.
pub fn extraction_at_reports(outcome: &crate::mechanism::MechanismOutcome) -> f64 {
    outcome
        .bundle
        .arbitrageur_steps()
        .map(|step| {
            let arb = match step.origin {
                crate::pool::StepOrigin::Arbitrageur { arb, .. } => arb,
                _ => unreachable!("filtered to arbitrageur steps"),
            };
            let q = outcome
                .reports
                .iter()
                .find(|r| r.arb == arb)
                .map(|r| r.q)
                .unwrap_or(0.0);
            step.value_at(q)
        })
        .sum()
}

/// The extraction ceiling `max_i phi_i(s0) + sum_j max_i V_i(TX_j)` for a
/// slot input, skipping orders without limit states.
pub fn extraction_ceiling(config: &PoolConfig, input: &SlotInput) -> Result<f64> {
    let mut total = input
        .reports
        .iter()
        .map(|r| crate::valuation::potential(config.curve(), input.s0, r.q))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    for order in &input.orders {
        match limit_state(config.curve(), order) {
            Ok(_) => {
                total += input
                    .reports
                    .iter()
                    .map(|r| tx_value(order, r.q))
                    .fold(0.0f64, f64::max);
            }
            Err(Error::NoLimitState) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::ConstantProduct;

    #[test]
    fn gamma_zero_when_winning_own_item() {
        let curve = ConstantProduct::new(400.0).unwrap();
        let profile = ArbitrageurProfile::new(4.0, 10.0, 0.0, BeliefPrior::PointMass { v: 4.0 }).unwrap();
        // own report 5 beats the competitor's 3: wins its own item
        let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, 5.0, 41.0, 0, &[3.0]);
        assert_eq!(profit, 0.0);
    }

    #[test]
    fn gamma_zero_when_item_skipped() {
        let curve = ConstantProduct::new(400.0).unwrap();
        let profile = ArbitrageurProfile::new(4.0, 10.0, 0.0, BeliefPrior::PointMass { v: 4.0 }).unwrap();
        // t_out too high: nobody values the order
        let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, 1.0, 500.0, 0, &[3.0]);
        assert_eq!(profit, 0.0);
    }

    #[test]
    fn gamma_at_binding_bound_matches_hand_computation() {
        let curve = ConstantProduct::new(400.0).unwrap();
        let v_star = 4.0;
        let v_c = 6.0;
        let b = 10.0;
        let profile = ArbitrageurProfile::new(v_star, b, 0.0, BeliefPrior::PointMass { v: v_star }).unwrap();
        // t = b * v_c: competitor still (weakly) values the order; profit is
        // execution (t - b*v*) plus refund max(0, b*q_i - t) with q_i = v*.
        let t = b * v_c;
        let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, v_star, t, 0, &[v_c]);
        assert!((profit - (t - b * v_star)).abs() < 1e-12, "profit={profit}");
    }

    #[test]
    fn gamma_matches_full_mechanism_pipeline() {
        // profit from the Sybil item == utility(with sybil) - utility(without)
        let sampler = InstanceSampler::default();
        for trial in 0..50u64 {
            let mut rng = trial_rng(9, trial);
            let instance = sampler.sample(&mut rng);
            let config = instance.config();
            let curve = config.curve();
            let profile = ArbitrageurProfile::new(
                instance.beliefs[0],
                instance.s0.x * 0.1,
                0.0,
                BeliefPrior::PointMass { v: instance.beliefs[0] },
            )
            .unwrap();
            let t_out = profile.budget_x * instance.beliefs[0] * rng.random_range(0.8..2.0);

            let gamma = sybil_profit_gamma(
                curve,
                &profile,
                Direction::XtoY,
                instance.beliefs[0],
                t_out,
                0,
                &instance.beliefs[1..],
            );

            let reports = instance.truthful_reports();
            let without = rediswap_or_panic(&config, &instance.slot_input(reports.clone(), 0));
            let u_without = arbitrageur_utility(&without, 0, instance.beliefs[0], &[]).unwrap();
            let mut with_input = instance.slot_input(reports, 0);
            let sybil_index = with_input.orders.len();
            with_input
                .orders
                .push(SwapOrder::sell_x(profile.budget_x, t_out, "sybil").unwrap());
            let with = rediswap_or_panic(&config, &with_input);
            let u_with = arbitrageur_utility(&with, 0, instance.beliefs[0], &[sybil_index]).unwrap();

            let pipeline = u_with - u_without;
            assert!(
                (gamma - pipeline).abs() <= 1e-9 * pipeline.abs().max(1.0),
                "trial {trial}: gamma={gamma} pipeline={pipeline}"
            );
        }
    }

    fn rediswap_or_panic(
        config: &PoolConfig,
        input: &SlotInput,
    ) -> crate::mechanism::MechanismOutcome {
        crate::mechanism::rediswap_run(config, input).unwrap()
    }

    #[test]
    fn optimize_sybil_no_competitors_is_empty() {
        let profile = ArbitrageurProfile::new(4.0, 10.0, 40.0, BeliefPrior::PointMass { v: 4.0 }).unwrap();
        let strategy = optimize_sybil(&profile, &[], 16, 64, 1).unwrap();
        assert!(strategy.is_empty());
        assert_eq!(strategy.expected_profit(), 0.0);
    }

    #[test]
    fn optimize_sybil_zero_budget_is_empty() {
        let profile = ArbitrageurProfile::new(4.0, 0.0, 0.0, BeliefPrior::PointMass { v: 4.0 }).unwrap();
        let priors = [BeliefPrior::Uniform { lo: 2.0, hi: 8.0 }];
        let strategy = optimize_sybil(&profile, &priors, 16, 64, 1).unwrap();
        assert!(strategy.is_empty());
    }

    #[test]
    fn optimize_sybil_point_mass_competitor_binds_at_bound() {
        // competitor belief v_c > v*: the sell leg should size its demand at
        // delta_out = budget * v_c, capturing the whole gap.
        let v_star = 4.0;
        let v_c = 6.0;
        let b = 10.0;
        let profile = ArbitrageurProfile::new(v_star, b, 0.0, BeliefPrior::PointMass { v: v_star }).unwrap();
        let priors = [BeliefPrior::PointMass { v: v_c }];
        let strategy = optimize_sybil(&profile, &priors, 128, 32, 1).unwrap();
        let leg = strategy.sell_x.expect("profitable sell leg");
        assert!(
            (leg.delta_out - b * v_c).abs() <= 1e-9 * (b * v_c),
            "delta_out={}",
            leg.delta_out
        );
        assert!((leg.expected_profit - b * (v_c - v_star)).abs() < 1e-9);
        // grid oracle: no grid point beats the bound
        let curve = ConstantProduct::new(400.0).unwrap();
        for i in 0..200 {
            let t = b * v_star + (b * v_c * 1.5 - b * v_star) * i as f64 / 199.0;
            let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, v_star, t, 0, &[v_c]);
            assert!(profit <= leg.expected_profit + 1e-9);
        }
    }

    #[test]
    fn gamma_monotone_in_t_before_the_bound() {
        let curve = ConstantProduct::new(400.0).unwrap();
        let profile = ArbitrageurProfile::new(4.0, 10.0, 0.0, BeliefPrior::PointMass { v: 4.0 }).unwrap();
        let others = [6.0, 5.0];
        let mut last = f64::NEG_INFINITY;
        for i in 0..50 {
            let t = 40.0 + (60.0 - 40.0) * i as f64 / 49.0; // up to b * 6
            let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, 4.0, t, 0, &others);
            assert!(profit >= last - 1e-12, "t={t}: {profit} < {last}");
            last = profit;
        }
    }

    #[test]
    fn rediswap_sybil_probe_finds_nothing() {
        let report = sybil_probe(
            MechanismKind::Rediswap,
            &InstanceSampler::default(),
            &SybilSampler::large_overpriced(),
            60,
            5,
        )
        .unwrap();
        assert!(report.passed(), "violation {}", report.max_violation);
        assert!(report.max_abs_difference.unwrap() <= 1e-9);
    }

    #[test]
    fn strawman_sybil_probe_finds_violation() {
        let report = sybil_probe(
            MechanismKind::Strawman,
            &InstanceSampler::default(),
            &SybilSampler::large_overpriced(),
            60,
            5,
        )
        .unwrap();
        assert!(!report.passed());
        assert!(report.witness.is_some());
    }

    #[test]
    fn empty_sybil_sampler_reports_zero_drop() {
        let report = sybil_probe(
            MechanismKind::Strawman,
            &InstanceSampler::default(),
            &SybilSampler::none(),
            20,
            5,
        )
        .unwrap();
        assert_eq!(report.max_violation, 0.0);
    }

    #[test]
    fn degenerate_deviation_grid_gains_zero() {
        let report = truthfulness_probe(MechanismKind::Rediswap, &InstanceSampler::default(), &[1.0], 20, 5).unwrap();
        assert_eq!(report.max_violation, 0.0);
    }
}
