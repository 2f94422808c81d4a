//! MEV-redistribution mechanisms: bundle generation, payments, refunds.
//!
//! Two mechanisms share the same outcome shape:
//!
//! * **Strawman** — sells *all* arbitrage opportunities to the single
//!   arbitrageur whose report implies the highest total extractable value,
//!   charges the second-highest total, and splits the payment across orders
//!   and LPs in proportion to each party's contribution.
//! * **RediSwap** — sells each pending order and the initial-state
//!   rebalancing opportunity in separate second-price auctions. Every
//!   winning order is wrapped in a sandwich that returns the pool to `s0`,
//!   so sub-bundles never interfere; refunds go to the order's owner and
//!   the rebalance payment goes to LPs.
//!
//! Payments and refunds are numéraire transfers. All valuations use the
//! arbitrageurs' *reports*; utilities evaluate outcomes at *true* beliefs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{execute_bundle, Bundle};
use crate::curve::{ConstantProduct, PoolState, TradingCurve};
use crate::error::{Error, Result};
use crate::numeric;
use crate::optimal::optimal_bundle;
use crate::orders::{limit_state, SwapOrder};
use crate::pool::{ArbRole, FeeLedger, PoolConfig, StepOrigin, SwapStep};
use crate::valuation::{potential, tx_potential_value, tx_value};

/// An arbitrageur's report of the external price of the risky asset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArbitrageurReport {
    /// Caller-chosen id; must be unique within a slot.
    pub arb: usize,
    /// Reported external price, > 0.
    pub q: f64,
}

impl ArbitrageurReport {
    pub fn new(arb: usize, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidPrice(q));
        }
        Ok(Self { arb, q })
    }
}

/// Everything a mechanism run consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotInput {
    pub s0: PoolState,
    pub orders: Vec<SwapOrder>,
    pub reports: Vec<ArbitrageurReport>,
    /// Seeds the strawman's random tie-breaking.
    #[serde(default)]
    pub seed: u64,
}

/// Which mechanism produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismKind {
    Strawman,
    Rediswap,
}

impl std::str::FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strawman" => Ok(MechanismKind::Strawman),
            "rediswap" => Ok(MechanismKind::Rediswap),
            other => Err(Error::SchemaMismatch(format!("unknown mechanism {other:?}"))),
        }
    }
}

/// What was auctioned in one audit entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuctionItem {
    /// One pending order, by index.
    Order(usize),
    /// The rebalancing opportunity of the initial state.
    InitialState,
    /// The strawman's single all-in-one item.
    AllOpportunities,
}

impl Serialize for AuctionItem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AuctionItem::Order(j) => serializer.serialize_u64(*j as u64),
            AuctionItem::InitialState => serializer.serialize_str("initial-state"),
            AuctionItem::AllOpportunities => serializer.serialize_str("all-opportunities"),
        }
    }
}

impl<'de> Deserialize<'de> for AuctionItem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ItemVisitor;
        impl serde::de::Visitor<'_> for ItemVisitor {
            type Value = AuctionItem;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an order index, \"initial-state\", or \"all-opportunities\"")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<AuctionItem, E> {
                Ok(AuctionItem::Order(v as usize))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<AuctionItem, E> {
                match v {
                    "initial-state" => Ok(AuctionItem::InitialState),
                    "all-opportunities" => Ok(AuctionItem::AllOpportunities),
                    other => Err(E::custom(format!("unknown auction item {other:?}"))),
                }
            }
        }
        deserializer.deserialize_any(ItemVisitor)
    }
}

/// One per-item auction record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemAward {
    pub item: AuctionItem,
    /// Winning arbitrageur id.
    pub winner: usize,
    /// The winner's value for the item (measured at their report).
    pub winning_value: f64,
    /// The second-highest value, i.e. the payment; 0 when `competitors` is 0,
    /// where the second price defaults for lack of competition.
    pub second_value: f64,
    /// Number of competing arbitrageurs (n - 1).
    pub competitors: usize,
    /// Ids of arbitrageurs whose value tied the winner's exactly, if any.
    pub tied_with: Vec<usize>,
    /// Whether the item's transactions were placed in the bundle.
    pub executed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaymentEntry {
    pub arb: usize,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefundEntry {
    pub order: usize,
    pub owner: String,
    pub amount: f64,
}

/// The auditable result of one mechanism run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MechanismOutcome {
    pub mechanism: MechanismKind,
    pub s0: PoolState,
    pub orders: Vec<SwapOrder>,
    pub reports: Vec<ArbitrageurReport>,
    pub bundle: Bundle,
    /// Per-arbitrageur payments, aligned with `reports`.
    pub payments: Vec<PaymentEntry>,
    /// Per-order refunds, aligned with `orders`.
    pub refunds: Vec<RefundEntry>,
    pub lp_refund: f64,
    pub audit: Vec<ItemAward>,
    /// Orders skipped because no limit state exists.
    pub skipped_orders: Vec<usize>,
    pub final_state: PoolState,
    pub fees: FeeLedger,
}

impl MechanismOutcome {
    pub fn payment_of(&self, arb: usize) -> Result<f64> {
        self.payments
            .iter()
            .find(|p| p.arb == arb)
            .map(|p| p.amount)
            .ok_or(Error::UnknownArbitrageur(arb))
    }

    pub fn refund_of(&self, order: usize) -> Result<f64> {
        self.refunds
            .get(order)
            .map(|r| r.amount)
            .ok_or(Error::UnknownOrder(order))
    }

    pub fn total_payments(&self) -> f64 {
        self.payments.iter().map(|p| p.amount).sum()
    }

    pub fn total_refunds(&self) -> f64 {
        self.refunds.iter().map(|r| r.amount).sum()
    }

    /// Checks budget balance, sign constraints, second-price consistency,
    /// token conservation, and (for RediSwap) sub-bundle independence.
    pub fn verify(&self, config: &PoolConfig) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        for p in &self.payments {
            if p.amount < 0.0 {
                return fail(format!("negative payment for arb {}", p.arb));
            }
        }
        for r in &self.refunds {
            if r.amount < 0.0 {
                return fail(format!("negative refund for order {}", r.order));
            }
        }
        if self.lp_refund < 0.0 {
            return fail("negative LP refund".into());
        }
        let paid = self.total_payments();
        let returned = self.total_refunds() + self.lp_refund;
        if !numeric::close(paid, returned, 1e-9) {
            return fail(format!("budget imbalance: payments {paid} vs refunds {returned}"));
        }
        for award in &self.audit {
            if award.second_value > award.winning_value + 1e-9 * award.winning_value.abs().max(1.0) {
                return fail(format!("second price exceeds winning value for {:?}", award.item));
            }
        }
        let trace = execute_bundle(config, &self.bundle)?;
        let conservation = trace.conservation_error();
        if conservation > 1e-9 {
            return fail(format!("token conservation error {conservation:.3e}"));
        }
        if !trace.final_state().approx_eq(&self.final_state, 1e-9) {
            return fail("recorded final state disagrees with execution".into());
        }
        if self.mechanism == MechanismKind::Rediswap {
            for (step, state) in self.bundle.steps.iter().zip(trace.states.iter().skip(1)) {
                if matches!(
                    step.origin,
                    StepOrigin::Arbitrageur {
                        role: ArbRole::Back,
                        ..
                    }
                ) && !state.approx_eq(&self.s0, 1e-9)
                {
                    return fail("sandwich sub-bundle did not return to s0".into());
                }
            }
        }
        Ok(())
    }
}

fn validate_reports(reports: &[ArbitrageurReport]) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::NoReports);
    }
    for (i, r) in reports.iter().enumerate() {
        if !(r.q > 0.0 && r.q.is_finite()) {
            return Err(Error::InvalidPrice(r.q));
        }
        if reports[..i].iter().any(|other| other.arb == r.arb) {
            return Err(Error::SchemaMismatch(format!("duplicate arbitrageur id {}", r.arb)));
        }
    }
    Ok(())
}

/// Limit states for each order; `None` marks orders the mechanisms skip.
fn limit_states(config: &PoolConfig, orders: &[SwapOrder]) -> Result<Vec<Option<PoolState>>> {
    orders
        .iter()
        .map(|order| match limit_state(config.curve(), order) {
            Ok(state) => Ok(Some(state)),
            Err(Error::NoLimitState) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// First position attaining the maximum (ties go to the lowest index), plus
/// the ids of any exact ties.
fn argmax(values: &[f64], reports: &[ArbitrageurReport]) -> (usize, f64, Vec<usize>) {
    let mut best = f64::NEG_INFINITY;
    let mut pos = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            pos = i;
        }
    }
    let tied = values
        .iter()
        .enumerate()
        .filter(|&(i, &v)| i != pos && v == best)
        .map(|(i, _)| reports[i].arb)
        .collect();
    (pos, best, tied)
}

fn second_highest(values: &[f64], winner_pos: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != winner_pos)
        .map(|(_, &v)| v)
        .fold(0.0f64, f64::max)
}

/// Runs the strawman mechanism: one sealed-bid second-price auction over the
/// whole opportunity set, with proportional refunds.
pub fn strawman_run(config: &PoolConfig, input: &SlotInput) -> Result<MechanismOutcome> {
    validate_reports(&input.reports)?;
    config.curve().check_on_curve(input.s0)?;
    let curve = config.curve();
    let limits = limit_states(config, &input.orders)?;
    let skipped: Vec<usize> = limits
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_none())
        .map(|(j, _)| j)
        .collect();

    let n = input.reports.len();
    let mut phi = Vec::with_capacity(n);
    let mut values = vec![vec![0.0; input.orders.len()]; n];
    let mut mev = Vec::with_capacity(n);
    for (i, report) in input.reports.iter().enumerate() {
        let p = potential(curve, input.s0, report.q)?;
        let mut total = p;
        for (j, order) in input.orders.iter().enumerate() {
            if limits[j].is_some() {
                values[i][j] = tx_value(order, report.q);
                total += values[i][j];
            }
        }
        phi.push(p);
        mev.push(total);
    }

    // Highest total wins; exact ties break uniformly at random by seed.
    let (mut winner_pos, best, mut tied) = argmax(&mev, &input.reports);
    if !tied.is_empty() {
        let pool: Vec<usize> = mev
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == best)
            .map(|(i, _)| i)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
        winner_pos = pool[rng.random_range(0..pool.len())];
        tied = pool
            .iter()
            .filter(|&&pos| pos != winner_pos)
            .map(|&pos| input.reports[pos].arb)
            .collect();
    }
    let payment = second_highest(&mev, winner_pos);
    let winner = input.reports[winner_pos];
    let bundle = optimal_bundle(config, input.s0, &input.orders, winner.q, winner.arb)?;

    let mev_w = mev[winner_pos];
    let share = |value: f64| if mev_w > 0.0 { value / mev_w * payment } else { 0.0 };
    let refunds: Vec<RefundEntry> = input
        .orders
        .iter()
        .enumerate()
        .map(|(j, order)| RefundEntry {
            order: j,
            owner: order.owner.clone(),
            amount: share(values[winner_pos][j]),
        })
        .collect();
    let lp_refund = share(phi[winner_pos]);

    let mut payments: Vec<PaymentEntry> = input
        .reports
        .iter()
        .map(|r| PaymentEntry { arb: r.arb, amount: 0.0 })
        .collect();
    payments[winner_pos].amount = payment;

    let audit = vec![ItemAward {
        item: AuctionItem::AllOpportunities,
        winner: winner.arb,
        winning_value: mev_w,
        second_value: payment,
        competitors: n - 1,
        tied_with: tied,
        executed: !bundle.is_empty(),
    }];

    let trace = execute_bundle(config, &bundle)?;
    let outcome = MechanismOutcome {
        mechanism: MechanismKind::Strawman,
        s0: input.s0,
        orders: input.orders.clone(),
        reports: input.reports.clone(),
        final_state: trace.final_state(),
        fees: trace.fees,
        bundle,
        payments,
        refunds,
        lp_refund,
        audit,
        skipped_orders: skipped,
    };
    #[cfg(debug_assertions)]
    if let Err(e) = outcome.verify(config) {
        panic!("strawman outcome failed its own audit: {e}");
    }
    Ok(outcome)
}

/// Runs the RediSwap mechanism: per-item second-price auctions with
/// independent sandwich sub-bundles and a final rebalance.
pub fn rediswap_run(config: &PoolConfig, input: &SlotInput) -> Result<MechanismOutcome> {
    validate_reports(&input.reports)?;
    config.curve().check_on_curve(input.s0)?;
    let curve = config.curve();
    let limits = limit_states(config, &input.orders)?;
    let n = input.reports.len();

    let mut bundle = Bundle::new(input.s0);
    let mut payments: Vec<PaymentEntry> = input
        .reports
        .iter()
        .map(|r| PaymentEntry { arb: r.arb, amount: 0.0 })
        .collect();
    let mut refunds: Vec<RefundEntry> = input
        .orders
        .iter()
        .enumerate()
        .map(|(j, order)| RefundEntry {
            order: j,
            owner: order.owner.clone(),
            amount: 0.0,
        })
        .collect();
    let mut audit = Vec::new();
    let mut skipped = Vec::new();

    for (j, order) in input.orders.iter().enumerate() {
        let Some(limit) = limits[j] else {
            skipped.push(j);
            continue;
        };
        let dphi: Vec<f64> = input
            .reports
            .iter()
            .map(|r| tx_potential_value(order, r.q))
            .collect();
        let (w_pos, best, tied) = argmax(&dphi, &input.reports);
        let second = second_highest(&dphi, w_pos).max(0.0);
        let winner = input.reports[w_pos].arb;
        let executed = best >= 0.0;
        if executed {
            let front = StepOrigin::Arbitrageur {
                arb: winner,
                role: ArbRole::Front,
            };
            if let Some(step) = SwapStep::between(input.s0, limit, front) {
                bundle.push(step);
            }
            let user = SwapStep {
                direction: order.direction,
                amount_in: order.delta_in,
                amount_out: order.delta_out,
                origin: StepOrigin::User { order: j },
            };
            let (dx, dy) = user.reserve_delta();
            let post = PoolState {
                x: limit.x + dx,
                y: limit.y + dy,
            };
            bundle.push(user);
            let back = StepOrigin::Arbitrageur {
                arb: winner,
                role: ArbRole::Back,
            };
            if let Some(step) = SwapStep::between(post, input.s0, back) {
                bundle.push(step);
            }
            payments[w_pos].amount += second;
            refunds[j].amount = second;
        }
        audit.push(ItemAward {
            item: AuctionItem::Order(j),
            winner,
            winning_value: best.max(0.0),
            second_value: if executed { second } else { 0.0 },
            competitors: n - 1,
            tied_with: tied,
            executed,
        });
    }

    // The rebalancing opportunity of the initial state.
    let phi: Vec<f64> = input
        .reports
        .iter()
        .map(|r| potential(curve, input.s0, r.q))
        .collect::<Result<_>>()?;
    let (w_pos, best, tied) = argmax(&phi, &input.reports);
    let second = second_highest(&phi, w_pos);
    let winner = input.reports[w_pos].arb;
    let target = curve.state_at_price(input.reports[w_pos].q)?;
    let rebalance = StepOrigin::Arbitrageur {
        arb: winner,
        role: ArbRole::Rebalance,
    };
    let mut rebalanced = false;
    if let Some(step) = SwapStep::between(input.s0, target, rebalance) {
        bundle.push(step);
        rebalanced = true;
    }
    payments[w_pos].amount += second;
    let lp_refund = second;
    audit.push(ItemAward {
        item: AuctionItem::InitialState,
        winner,
        winning_value: best,
        second_value: second,
        competitors: n - 1,
        tied_with: tied,
        executed: rebalanced,
    });

    let trace = execute_bundle(config, &bundle)?;
    let outcome = MechanismOutcome {
        mechanism: MechanismKind::Rediswap,
        s0: input.s0,
        orders: input.orders.clone(),
        reports: input.reports.clone(),
        final_state: trace.final_state(),
        fees: trace.fees,
        bundle,
        payments,
        refunds,
        lp_refund,
        audit,
        skipped_orders: skipped,
    };
    #[cfg(debug_assertions)]
    if let Err(e) = outcome.verify(config) {
        panic!("rediswap outcome failed its own audit: {e}");
    }
    Ok(outcome)
}

/// Dispatches on the mechanism kind.
pub fn run_mechanism(kind: MechanismKind, config: &PoolConfig, input: &SlotInput) -> Result<MechanismOutcome> {
    match kind {
        MechanismKind::Strawman => strawman_run(config, input),
        MechanismKind::Rediswap => rediswap_run(config, input),
    }
}

/// The utility of the order's originator: final holdings weighted at the
/// order's own exchange rate. The originator starts holding exactly the
/// input amount; execution always happens at the limit state, and refunds
/// arrive in numéraire.
pub fn user_utility(outcome: &MechanismOutcome, order_index: usize) -> Result<f64> {
    let order = outcome
        .orders
        .get(order_index)
        .ok_or(Error::UnknownOrder(order_index))?;
    let refund = outcome.refund_of(order_index)?;
    let executed = outcome.bundle.includes_order(order_index);
    use crate::pool::Direction;
    let (x_held, y_held, rate) = match order.direction {
        Direction::XtoY => {
            let rate = order.delta_out / order.delta_in;
            if executed {
                (0.0, order.delta_out + refund, rate)
            } else {
                (order.delta_in, refund, rate)
            }
        }
        Direction::YtoX => {
            let rate = order.delta_in / order.delta_out;
            if executed {
                (order.delta_out, refund, rate)
            } else {
                (0.0, order.delta_in + refund, rate)
            }
        }
    };
    Ok(rate * x_held + y_held)
}

/// The utility of arbitrageur `arb` (by id) with true belief `true_belief`:
/// execution value of their included Sybil orders plus refunds, plus the
/// value of their inserted arbitrage steps, minus their payment. All risky
/// legs are valued at the true belief.
pub fn arbitrageur_utility(
    outcome: &MechanismOutcome,
    arb: usize,
    true_belief: f64,
    sybil_orders: &[usize],
) -> Result<f64> {
    let payment = outcome.payment_of(arb)?;
    let mut utility = -payment;
    for &j in sybil_orders {
        let order = outcome.orders.get(j).ok_or(Error::UnknownOrder(j))?;
        if outcome.bundle.includes_order(j) {
            utility += -tx_potential_value(order, true_belief) + outcome.refund_of(j)?;
        }
    }
    for step in outcome.bundle.arbitrageur_steps() {
        if matches!(step.origin, StepOrigin::Arbitrageur { arb: a, .. } if a == arb) {
            utility += step.value_at(true_belief);
        }
    }
    Ok(utility)
}

/// A round engine that feeds timed orders and reports into consecutive
/// RediSwap slots, carrying the pool state and fee ledger forward.
#[derive(Debug, Clone)]
pub struct SlotEngine {
    config: PoolConfig,
    state: PoolState,
    fees: FeeLedger,
}

impl SlotEngine {
    pub fn new(config: PoolConfig, s0: PoolState) -> Result<Self> {
        config.curve().check_on_curve(s0)?;
        Ok(Self {
            config,
            state: s0,
            fees: FeeLedger::default(),
        })
    }

    pub fn state(&self) -> PoolState {
        self.state
    }

    pub fn fees(&self) -> FeeLedger {
        self.fees
    }

    /// Runs one slot: orders and reports with logical time `< cutoff`
    /// participate; later arrivals wait for a future slot.
    pub fn run_slot(
        &mut self,
        order_feed: &[(u64, SwapOrder)],
        report_feed: &[(u64, ArbitrageurReport)],
        cutoff: u64,
        seed: u64,
    ) -> Result<MechanismOutcome> {
        let orders: Vec<SwapOrder> = order_feed
            .iter()
            .filter(|(t, _)| *t < cutoff)
            .map(|(_, o)| o.clone())
            .collect();
        let reports: Vec<ArbitrageurReport> = report_feed
            .iter()
            .filter(|(t, _)| *t < cutoff)
            .map(|(_, r)| *r)
            .collect();
        let input = SlotInput {
            s0: self.state,
            orders,
            reports,
            seed,
        };
        let outcome = rediswap_run(&self.config, &input)?;
        self.state = outcome.final_state;
        self.fees.x += outcome.fees.x;
        self.fees.y += outcome.fees.y;
        Ok(outcome)
    }
}

/// One-shot form of [`SlotEngine::run_slot`].
pub fn run_slot(
    config: &PoolConfig,
    s0: PoolState,
    order_feed: &[(u64, SwapOrder)],
    report_feed: &[(u64, ArbitrageurReport)],
    cutoff: u64,
    seed: u64,
) -> Result<MechanismOutcome> {
    SlotEngine::new(config.clone(), s0)?.run_slot(order_feed, report_feed, cutoff, seed)
}

/// On-disk form of a slot input: pool description plus orders and reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotInputFile {
    pub pool: PoolJson,
    #[serde(default)]
    pub orders: Vec<SwapOrder>,
    #[serde(default)]
    pub reports: Vec<ArbitrageurReport>,
    #[serde(default)]
    pub seed: u64,
}

/// Pool fragment: `{"curve": {"type": "constant_product", "k": 400}, "fee": 0}`
/// or `{"curve": {"reserves": [4, 100]}, "fee": 0}`. Reserves, when present,
/// double as the initial state; with only `k` given the pool starts balanced
/// at spot price 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolJson {
    pub curve: CurveJson,
    #[serde(default)]
    pub reserves: Option<[f64; 2]>,
    #[serde(default)]
    pub fee: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveJson {
    #[serde(rename = "type", default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub reserves: Option<[f64; 2]>,
}

impl PoolJson {
    pub fn resolve(&self) -> Result<(PoolConfig, PoolState)> {
        if let Some(kind) = &self.curve.kind {
            if kind != "constant_product" {
                return Err(Error::SchemaMismatch(format!("unsupported curve type {kind:?}")));
            }
        }
        let reserves = self.reserves.or(self.curve.reserves);
        let k = match (self.curve.k, reserves) {
            (Some(k), _) => k,
            (None, Some([x, y])) => x * y,
            (None, None) => {
                return Err(Error::SchemaMismatch("curve needs either k or reserves".into()));
            }
        };
        let curve = ConstantProduct::new(k)?;
        let s0 = match reserves {
            Some([x, y]) => {
                let state = PoolState::new(x, y)?;
                curve.check_on_curve(state)?;
                state
            }
            None => PoolState::new(k.sqrt(), k.sqrt())?,
        };
        Ok((PoolConfig::new(curve, self.fee)?, s0))
    }
}

impl SlotInputFile {
    pub fn into_parts(self) -> Result<(PoolConfig, SlotInput)> {
        let (config, s0) = self.pool.resolve()?;
        for order in &self.orders {
            // surface bad amounts as schema errors at parse time
            SwapOrder::new(order.direction, order.delta_in, order.delta_out, order.owner.clone())
                .map_err(|e| Error::SchemaMismatch(e.to_string()))?;
        }
        for report in &self.reports {
            ArbitrageurReport::new(report.arb, report.q).map_err(|e| Error::SchemaMismatch(e.to_string()))?;
        }
        Ok((
            config,
            SlotInput {
                s0,
                orders: self.orders,
                reports: self.reports,
                seed: self.seed,
            },
        ))
    }
}
