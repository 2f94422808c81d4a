//! Optimal arbitrage under public order flow.
//!
//! [`optimal_bundle`] builds the profit-maximizing bundle for a single
//! arbitrageur: walk the pending orders in sequence, front-run each order
//! with non-negative potential value to its limit state, execute it there,
//! and finish with one rebalance to the no-arbitrage state of the belief.
//! The realized profit equals `potential(s0) + sum of tx_value` — the
//! extraction ceiling — which [`brute_force_best_profit`] verifies
//! independently by exhaustive search over a discretized strategy space.

use crate::bundle::{execute_bundle, Bundle};
use crate::curve::{PoolState, SOLVER_TOLERANCE};
use crate::error::{Error, Result};
use crate::numeric;
use crate::orders::{execute_at_state, limit_state, SwapOrder};
use crate::pool::{ArbRole, PoolConfig, StepOrigin, SwapStep};
use crate::valuation::tx_potential_value;

/// Builds the maximal-extraction bundle for one arbitrageur with belief `v`,
/// tagging inserted steps with `arb`. Orders without a limit state are
/// skipped (they cannot execute and carry zero value).
pub fn optimal_bundle(
    config: &PoolConfig,
    s0: PoolState,
    orders: &[SwapOrder],
    v: f64,
    arb: usize,
) -> Result<Bundle> {
    config.curve().check_on_curve(s0)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidPrice(v));
    }
    let curve = config.curve();
    let mut bundle = Bundle::new(s0);
    let mut state = s0;

    for (index, order) in orders.iter().enumerate() {
        let limit = match limit_state(curve, order) {
            Ok(limit) => limit,
            Err(Error::NoLimitState) => continue,
            Err(e) => return Err(e),
        };
        if tx_potential_value(order, v) < 0.0 {
            continue;
        }
        let front = StepOrigin::Arbitrageur {
            arb,
            role: ArbRole::Front,
        };
        if let Some(step) = SwapStep::between(state, limit, front) {
            bundle.push(step);
        }
        let user = SwapStep {
            direction: order.direction,
            amount_in: order.delta_in,
            amount_out: order.delta_out,
            origin: StepOrigin::User { order: index },
        };
        let (dx, dy) = user.reserve_delta();
        state = PoolState {
            x: limit.x + dx,
            y: limit.y + dy,
        };
        bundle.push(user);
    }

    let target = curve.state_at_price(v)?;
    let rebalance = StepOrigin::Arbitrageur {
        arb,
        role: ArbRole::Rebalance,
    };
    if let Some(step) = SwapStep::between(state, target, rebalance) {
        bundle.push(step);
    }
    Ok(bundle)
}

/// The arbitrageur's realized profit from a bundle at price `v`: the summed
/// value of the arbitrageur-tagged steps only.
pub fn bundle_profit(config: &PoolConfig, bundle: &Bundle, v: f64) -> Result<f64> {
    execute_bundle(config, bundle)?;
    Ok(bundle.arbitrageur_steps().map(|s| s.value_at(v)).sum())
}

/// The extraction ceiling `potential(s0) + sum_j tx_value(order_j)`,
/// counting only orders that have a limit state.
pub fn theoretical_best_profit(
    config: &PoolConfig,
    s0: PoolState,
    orders: &[SwapOrder],
    v: f64,
) -> Result<f64> {
    let mut total = crate::valuation::potential(config.curve(), s0, v)?;
    for order in orders {
        match limit_state(config.curve(), order) {
            Ok(_) => total += crate::valuation::tx_value(order, v),
            Err(Error::NoLimitState) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

const BRUTE_FORCE_MAX_ORDERS: usize = 4;

/// Exhaustive search for the best arbitrage profit on small instances.
///
/// Enumerates every subset and permutation of the orders. Between
/// consecutive user executions — and before the first and after the last —
/// the arbitrageur may move the pool to any state from a candidate set: a
/// geometric price grid of `grid_n` points spanning the spot price of `s0`,
/// the belief `v`, and every order's limit price, plus the exact limit
/// states and the exact no-arbitrage state of `v`. A user execution pays the
/// full input and is feasible only where the curve output covers the
/// minimum. Independent of [`optimal_bundle`] by construction.
pub fn brute_force_best_profit(
    config: &PoolConfig,
    s0: PoolState,
    orders: &[SwapOrder],
    v: f64,
    grid_n: usize,
) -> Result<f64> {
    if orders.len() > BRUTE_FORCE_MAX_ORDERS {
        return Err(Error::TooManyOrders {
            max: BRUTE_FORCE_MAX_ORDERS,
            got: orders.len(),
        });
    }
    let curve = config.curve();
    curve.check_on_curve(s0)?;

    // Usable orders keep their limit states; the rest can never execute.
    let mut usable: Vec<&SwapOrder> = Vec::new();
    let mut anchor_prices = vec![crate::curve::spot_price(curve, s0)?, v];
    let mut candidates: Vec<PoolState> = vec![s0, curve.state_at_price(v)?];
    for order in orders {
        match limit_state(curve, order) {
            Ok(limit) => {
                anchor_prices.push(curve.price_at_x(limit.x));
                candidates.push(limit);
                usable.push(order);
            }
            Err(Error::NoLimitState) => {}
            Err(e) => return Err(e),
        }
    }

    let (lo, hi) = anchor_prices
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    for i in 0..grid_n {
        let t = if grid_n > 1 { i as f64 / (grid_n - 1) as f64 } else { 0.5 };
        let p = lo * (hi / lo).powf(t);
        candidates.push(curve.state_at_price(p)?);
    }
    candidates.sort_by(|a, b| a.x.total_cmp(&b.x));
    candidates.dedup_by(|a, b| numeric::close(a.x, b.x, SOLVER_TOLERANCE));

    // Arbitrage move s -> c costs nothing but credits the price-v value of
    // the reserve change; path-independent, so one move per gap suffices.
    let move_profit = |from: PoolState, to: PoolState| (from.x - to.x) * v + (from.y - to.y);

    let mut best = f64::NEG_INFINITY;
    let fee_free = PoolConfig::from_arc(config.curve_arc(), 0.0)?;

    for subset in 0usize..(1 << usable.len()) {
        let chosen: Vec<&SwapOrder> = usable
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, o)| *o)
            .collect();
        for perm in permutations(chosen.len()) {
            // Dynamic program over reachable states. Frontier entries are
            // (state, best profit so far); the arbitrageur may hop to any
            // candidate in each gap.
            let mut frontier: Vec<(PoolState, f64)> = vec![(s0, 0.0)];
            let mut feasible = true;
            for &pick in &perm {
                let order = chosen[pick];
                let mut next: Vec<(PoolState, f64)> = Vec::with_capacity(candidates.len() + 1);
                for &(state, profit) in &frontier {
                    // no insertion
                    push_execution(&fee_free, state, order, profit, &mut next);
                    // hop to each candidate first
                    for &c in &candidates {
                        push_execution(&fee_free, c, order, profit + move_profit(state, c), &mut next);
                    }
                }
                if next.is_empty() {
                    feasible = false;
                    break;
                }
                // collapse duplicates, keeping the best profit per state
                next.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(b.1.total_cmp(&a.1)));
                next.dedup_by(|a, b| numeric::close(a.0.x, b.0.x, SOLVER_TOLERANCE));
                frontier = next;
            }
            if !feasible {
                continue;
            }
            for &(state, profit) in &frontier {
                let closing = candidates
                    .iter()
                    .map(|&c| move_profit(state, c))
                    .fold(0.0f64, f64::max); // staying put is always allowed
                best = best.max(profit + closing);
            }
        }
    }
    Ok(best)
}

/// Executes `order` at `state` (fee-free) and pushes the resulting frontier
/// entry when the fill is feasible. Accepts a hair below the minimum output
/// so exact limit-state executions survive rounding.
fn push_execution(
    config: &PoolConfig,
    state: PoolState,
    order: &SwapOrder,
    profit: f64,
    next: &mut Vec<(PoolState, f64)>,
) {
    let Ok(fill) = execute_at_state(config, state, order) else {
        return;
    };
    let slack = 1e-9 * order.delta_out.max(1.0);
    if fill.received >= order.delta_out - slack {
        // Re-derive the post state: borderline fills report the input state.
        let curve = config.curve();
        let post = match order.direction {
            crate::pool::Direction::XtoY => {
                let x = state.x + order.delta_in;
                PoolState { x, y: curve.y_at_x(x) }
            }
            crate::pool::Direction::YtoX => {
                let y = state.y + order.delta_in;
                PoolState { x: curve.x_at_y(y), y }
            }
        };
        if post.x > 0.0 && post.y > 0.0 {
            next.push((post, profit));
        }
    }
}

/// All permutations of `0..n` for tiny `n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut result);
    result
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
