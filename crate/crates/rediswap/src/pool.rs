//! Pool configuration, swap steps, and state transitions.
//!
//! All values are immutable; [`apply_swap`] returns the post-state plus the
//! fee credited by the step, and callers thread a [`FeeLedger`] through a
//! sequence themselves. Swap fees are charged on user steps only and are
//! stored outside the reserves; arbitrage steps trade fee-free.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{ConstantProduct, PoolState, TradingCurve};
use crate::error::{Error, Result};

/// Swap direction: which token flows into the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Risky asset in, numéraire out.
    #[serde(rename = "XY")]
    XtoY,
    /// Numéraire in, risky asset out.
    #[serde(rename = "YX")]
    YtoX,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::XtoY => Direction::YtoX,
            Direction::YtoX => Direction::XtoY,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::XtoY => "XY",
            Direction::YtoX => "YX",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "XY" => Ok(Direction::XtoY),
            "YX" => Ok(Direction::YtoX),
            other => Err(Error::SchemaMismatch(format!("unknown side {other:?}, expected XY or YX"))),
        }
    }
}

/// Role of an arbitrageur-inserted step inside a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArbRole {
    /// Moves the pool to an order's limit state before the order executes.
    Front,
    /// Returns the pool to the sub-bundle's starting state.
    Back,
    /// Final move to the no-arbitrage state of a belief.
    Rebalance,
}

/// Who a bundle step belongs to.
///
/// Serialized as `{"order": j}` for user steps and `{"arb": i, "role": ...}`
/// for arbitrageur insertions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepOrigin {
    /// A pending order, by its index in the slot input.
    User { order: usize },
    /// An arbitrageur-inserted step.
    Arbitrageur { arb: usize, role: ArbRole },
}

impl StepOrigin {
    pub fn is_user(&self) -> bool {
        matches!(self, StepOrigin::User { .. })
    }

    pub fn is_arbitrageur(&self) -> bool {
        matches!(self, StepOrigin::Arbitrageur { .. })
    }
}

/// One executable swap inside a bundle: both legs are fixed amounts and the
/// step must map one on-curve state to another.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapStep {
    pub direction: Direction,
    pub amount_in: f64,
    pub amount_out: f64,
    pub origin: StepOrigin,
}

impl SwapStep {
    /// The arbitrage step connecting two on-curve states, or `None` when the
    /// states coincide (no step needed). Degenerate rounding leftovers that
    /// would produce a non-positive leg also collapse to `None`.
    pub fn between(from: PoolState, to: PoolState, origin: StepOrigin) -> Option<SwapStep> {
        if crate::numeric::close(from.x, to.x, crate::curve::SOLVER_TOLERANCE) {
            return None;
        }
        let (direction, amount_in, amount_out) = if to.x > from.x {
            (Direction::XtoY, to.x - from.x, from.y - to.y)
        } else {
            (Direction::YtoX, to.y - from.y, from.x - to.x)
        };
        if amount_in <= 0.0 || amount_out <= 0.0 {
            return None;
        }
        Some(SwapStep {
            direction,
            amount_in,
            amount_out,
            origin,
        })
    }

    /// Signed reserve change `(dx, dy)` the step applies to the pool.
    pub fn reserve_delta(&self) -> (f64, f64) {
        match self.direction {
            Direction::XtoY => (self.amount_in, -self.amount_out),
            Direction::YtoX => (-self.amount_out, self.amount_in),
        }
    }

    /// The step originator's profit in numéraire terms when the risky leg is
    /// valued at `price`: what the originator receives minus what they pay.
    pub fn value_at(&self, price: f64) -> f64 {
        match self.direction {
            Direction::XtoY => self.amount_out - self.amount_in * price,
            Direction::YtoX => self.amount_out * price - self.amount_in,
        }
    }
}

/// Which token a fee is denominated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Risky,
    Numeraire,
}

/// Accumulated swap fees, stored outside the reserves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FeeLedger {
    pub x: f64,
    pub y: f64,
}

impl FeeLedger {
    pub fn credit(&mut self, token: Token, amount: f64) {
        debug_assert!(amount >= 0.0);
        match token {
            Token::Risky => self.x += amount,
            Token::Numeraire => self.y += amount,
        }
    }
}

/// Pool configuration: the trading curve and the user swap fee.
#[derive(Clone)]
pub struct PoolConfig {
    curve: Arc<dyn TradingCurve>,
    fee: f64,
}

impl std::fmt::Debug for PoolConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoolConfig")
            .field("curve", &self.curve)
            .field("fee", &self.fee)
            .finish()
    }
}

impl PoolConfig {
    pub fn new(curve: impl TradingCurve + 'static, fee: f64) -> Result<Self> {
        Self::from_arc(Arc::new(curve), fee)
    }

    pub fn from_arc(curve: Arc<dyn TradingCurve>, fee: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&fee) {
            return Err(Error::SchemaMismatch(format!("fee must satisfy 0 <= f < 1, got {fee}")));
        }
        Ok(Self { curve, fee })
    }

    /// Fee-free constant product pool, the default for mechanism analysis.
    pub fn constant_product(k: f64) -> Result<Self> {
        Self::new(ConstantProduct::new(k)?, 0.0)
    }

    pub fn curve(&self) -> &dyn TradingCurve {
        self.curve.as_ref()
    }

    pub fn curve_arc(&self) -> Arc<dyn TradingCurve> {
        Arc::clone(&self.curve)
    }

    pub fn fee(&self) -> f64 {
        self.fee
    }

    /// Same curve, different fee — used by the replay fee sweep.
    pub fn with_fee(&self, fee: f64) -> Result<Self> {
        Self::from_arc(Arc::clone(&self.curve), fee)
    }
}

/// Result of applying one step: the post-state and the fee the step credited.
#[derive(Debug, Clone, Copy)]
pub struct SwapOutcome {
    pub state: PoolState,
    /// Fee amount in the step's input token; zero for arbitrage steps and
    /// fee-free pools. Order amounts are net of fees, so the gross input is
    /// `amount_in / (1 - f)` and the fee is the difference.
    pub fee: f64,
    pub fee_token: Token,
}

/// Executes one swap step against a state.
///
/// The pool always receives the step's net `amount_in`; when the step comes
/// from a user order and the pool charges a fee, the gross payment
/// `amount_in / (1 - f)` exceeds the net and the difference is reported as a
/// fee credit. The post-state must land back on the curve.
pub fn apply_swap(config: &PoolConfig, state: PoolState, step: &SwapStep) -> Result<SwapOutcome> {
    if !(step.amount_in > 0.0 && step.amount_in.is_finite()) || !(step.amount_out > 0.0 && step.amount_out.is_finite()) {
        return Err(Error::InvalidStep(format!(
            "step amounts must be positive, got in={} out={}",
            step.amount_in, step.amount_out
        )));
    }
    config.curve().check_on_curve(state)?;
    let (dx, dy) = step.reserve_delta();
    let (new_x, new_y) = (state.x + dx, state.y + dy);
    if new_x <= 0.0 || new_y <= 0.0 {
        return Err(Error::NegativeReserve);
    }
    let post = PoolState { x: new_x, y: new_y };
    config.curve().check_on_curve(post)?;

    let fee_token = match step.direction {
        Direction::XtoY => Token::Risky,
        Direction::YtoX => Token::Numeraire,
    };
    let fee = if step.origin.is_user() && config.fee() > 0.0 {
        step.amount_in * config.fee() / (1.0 - config.fee())
    } else {
        0.0
    };
    Ok(SwapOutcome {
        state: post,
        fee,
        fee_token,
    })
}
