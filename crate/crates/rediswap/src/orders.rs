//! User swap intents, their pool impact, and the limit-state solver.
//!
//! An order `(direction, delta_in, delta_out)` spends at most `delta_in` of
//! the input token and insists on at least `delta_out` of the output token.
//! Amounts are net of swap fees. The *limit state* is the unique pool state
//! at which the order pays exactly `delta_in` and receives exactly
//! `delta_out` — the worst execution its owner accepts.

use serde::{Deserialize, Serialize};

use crate::curve::{PoolState, TradingCurve, SOLVER_MAX_ITER};
use crate::error::{Error, Result};
use crate::numeric;
use crate::pool::{Direction, PoolConfig, Token};

/// A user swap intent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapOrder {
    #[serde(rename = "side")]
    pub direction: Direction,
    pub delta_in: f64,
    pub delta_out: f64,
    #[serde(default)]
    pub owner: String,
}

impl SwapOrder {
    pub fn new(direction: Direction, delta_in: f64, delta_out: f64, owner: impl Into<String>) -> Result<Self> {
        if !(delta_in > 0.0 && delta_in.is_finite()) {
            return Err(Error::InvalidOrder(format!("delta_in must be positive, got {delta_in}")));
        }
        if !(delta_out > 0.0 && delta_out.is_finite()) {
            return Err(Error::InvalidOrder(format!("delta_out must be positive, got {delta_out}")));
        }
        let worst_price = delta_out / delta_in;
        if !(worst_price > 0.0 && worst_price.is_finite()) {
            return Err(Error::InvalidOrder(format!("implied price {worst_price} out of range")));
        }
        Ok(Self {
            direction,
            delta_in,
            delta_out,
            owner: owner.into(),
        })
    }

    /// Sell `delta_in` risky units for at least `delta_out` numéraire.
    pub fn sell_x(delta_in: f64, delta_out: f64, owner: impl Into<String>) -> Result<Self> {
        Self::new(Direction::XtoY, delta_in, delta_out, owner)
    }

    /// Spend `delta_in` numéraire for at least `delta_out` risky units.
    pub fn buy_x(delta_in: f64, delta_out: f64, owner: impl Into<String>) -> Result<Self> {
        Self::new(Direction::YtoX, delta_in, delta_out, owner)
    }

    /// The numéraire-side quantity of the order (`delta_out` when selling
    /// risky, `delta_in` when buying risky).
    pub fn numeraire_leg(&self) -> f64 {
        match self.direction {
            Direction::XtoY => self.delta_out,
            Direction::YtoX => self.delta_in,
        }
    }

    /// The order's worst acceptable price in numéraire per risky unit.
    pub fn limit_price(&self) -> f64 {
        match self.direction {
            Direction::XtoY => self.delta_out / self.delta_in,
            Direction::YtoX => self.delta_in / self.delta_out,
        }
    }
}

/// Signed reserve change the order applies when executed at its limit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impact {
    pub dx: f64,
    pub dy: f64,
}

/// The order's impact `(dx, dy)` on the pool at limit-state execution.
pub fn impact(order: &SwapOrder) -> Impact {
    match order.direction {
        Direction::XtoY => Impact {
            dx: order.delta_in,
            dy: -order.delta_out,
        },
        Direction::YtoX => Impact {
            dx: -order.delta_out,
            dy: order.delta_in,
        },
    }
}

/// Solves for the order's limit state on the curve.
///
/// Selling risky: find `x_l` with `F_y(x_l) - F_y(x_l + delta_in) = delta_out`.
/// Buying risky: find `y_l` with `F_x(y_l) - F_x(y_l + delta_in) = delta_out`.
/// Both residuals are strictly decreasing in the solved coordinate, so a
/// geometrically grown bracket plus bisection converges globally. Fails with
/// [`Error::NoLimitState`] when no positive-reserve solution exists (the
/// post-execution state must keep both reserves positive too).
pub fn limit_state(curve: &dyn TradingCurve, order: &SwapOrder) -> Result<PoolState> {
    let state = match order.direction {
        Direction::XtoY => {
            let g = |x: f64| curve.y_at_x(x) - curve.y_at_x(x + order.delta_in) - order.delta_out;
            let (lo, hi) = numeric::bracket_decreasing(&g, 1.0).ok_or(Error::NoLimitState)?;
            let x = numeric::bisect_decreasing(g, lo, hi, 0.0, SOLVER_MAX_ITER);
            PoolState::new(x, curve.y_at_x(x)).map_err(|_| Error::NoLimitState)?
        }
        Direction::YtoX => {
            let g = |y: f64| curve.x_at_y(y) - curve.x_at_y(y + order.delta_in) - order.delta_out;
            let (lo, hi) = numeric::bracket_decreasing(&g, 1.0).ok_or(Error::NoLimitState)?;
            let y = numeric::bisect_decreasing(g, lo, hi, 0.0, SOLVER_MAX_ITER);
            PoolState::new(curve.x_at_y(y), y).map_err(|_| Error::NoLimitState)?
        }
    };
    let im = impact(order);
    let post_x = state.x + im.dx;
    let post_y = state.y + im.dy;
    if !(post_x > 0.0 && post_y > 0.0 && post_x.is_finite() && post_y.is_finite()) {
        return Err(Error::NoLimitState);
    }
    Ok(state)
}

/// Result of replay-mode execution at an arbitrary state.
#[derive(Debug, Clone, Copy)]
pub struct Fill {
    /// Whether the curve-determined output met the order's minimum.
    pub filled: bool,
    /// Post-state when filled; the input state otherwise.
    pub state: PoolState,
    /// The curve-determined output at this state (reported even when the
    /// order goes unfilled).
    pub received: f64,
    /// Fee credited on fill, in the input token.
    pub fee: f64,
    pub fee_token: Token,
}

/// Executes an order at the given state: the full `delta_in` is paid and the
/// curve determines the output. The order fills iff the output covers
/// `delta_out`; otherwise the state is unchanged. Unfilled is a normal
/// outcome, not an error.
pub fn execute_at_state(config: &PoolConfig, state: PoolState, order: &SwapOrder) -> Result<Fill> {
    config.curve().check_on_curve(state)?;
    let curve = config.curve();
    let (received, post) = match order.direction {
        Direction::XtoY => {
            let new_x = state.x + order.delta_in;
            let new_y = curve.y_at_x(new_x);
            (state.y - new_y, PoolState { x: new_x, y: new_y })
        }
        Direction::YtoX => {
            let new_y = state.y + order.delta_in;
            let new_x = curve.x_at_y(new_y);
            (state.x - new_x, PoolState { x: new_x, y: new_y })
        }
    };
    let fee_token = match order.direction {
        Direction::XtoY => Token::Risky,
        Direction::YtoX => Token::Numeraire,
    };
    // boundary fills (exactly at the limit state) survive solver rounding
    let slack = 1e-9 * order.delta_out.max(1.0);
    if received < order.delta_out - slack || post.x <= 0.0 || post.y <= 0.0 {
        return Ok(Fill {
            filled: false,
            state,
            received,
            fee: 0.0,
            fee_token,
        });
    }
    let fee = if config.fee() > 0.0 {
        order.delta_in * config.fee() / (1.0 - config.fee())
    } else {
        0.0
    };
    Ok(Fill {
        filled: true,
        state: post,
        received,
        fee,
        fee_token,
    })
}
