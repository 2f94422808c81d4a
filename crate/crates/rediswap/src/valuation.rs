//! The measurement layer: potential values, transaction values, and LVR.
//!
//! For an external price `v`, the potential of a pool state is the profit
//! available from rebalancing the pool to the no-arbitrage state of `v`. It
//! is non-negative everywhere and zero exactly at that state. Transaction
//! values are the (clamped) change in potential an order causes when
//! executed at its limit state; summed with the initial potential they
//! account for the whole of the extractable value.

use crate::bundle::{execute_bundle, Bundle};
use crate::curve::{PoolState, TradingCurve};
use crate::error::{Error, Result};
use crate::orders::{impact, SwapOrder};
use crate::pool::PoolConfig;

/// A price belief together with its no-arbitrage state on a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belief {
    pub v: f64,
    pub state: PoolState,
}

impl Belief {
    pub fn new(curve: &dyn TradingCurve, v: f64) -> Result<Self> {
        let state = curve.state_at_price(v)?;
        Ok(Self { v, state })
    }
}

/// Potential value of `state` under external price `v`:
/// `(x*v + y) - (x'*v + y')` where `(x', y')` is the no-arbitrage state
/// for `v`. Always non-negative.
pub fn potential(curve: &dyn TradingCurve, state: PoolState, v: f64) -> Result<f64> {
    curve.check_on_curve(state)?;
    let target = curve.state_at_price(v)?;
    Ok((state.x * v + state.y) - (target.x * v + target.y))
}

/// The order's potential value under `v`: `dx*v + dy` at limit-state
/// execution. May be negative.
pub fn tx_potential_value(order: &SwapOrder, v: f64) -> f64 {
    let im = impact(order);
    im.dx * v + im.dy
}

/// The order's actual value to an arbitrageur with belief `v`:
/// `max(0, tx_potential_value)`.
pub fn tx_value(order: &SwapOrder, v: f64) -> f64 {
    tx_potential_value(order, v).max(0.0)
}

/// Loss-versus-rebalancing of an executed bundle at price `v`: the profit of
/// an off-chain portfolio mirroring every pool trade at the external price,
/// summed over all steps. Telescopes to `potential(s0) - potential(end)`.
pub fn lvr(config: &PoolConfig, bundle: &Bundle, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidPrice(v));
    }
    let trace = execute_bundle(config, bundle)?;
    let mut total = 0.0;
    for pair in trace.states.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        total += (prev.x - next.x) * v - (next.y - prev.y);
    }
    Ok(total)
}
