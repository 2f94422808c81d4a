//! Trading-curve abstraction and pool states.
//!
//! A curve constrains the pool reserves `(x, y)` — risky asset and
//! numéraire — to a one-dimensional set on which `x` and `y` move in
//! opposite directions and the marginal exchange rate (spot price) is
//! strictly decreasing in `x`. The only concrete instance is the constant
//! product curve `x * y = k`, but every algorithm in this crate works
//! through the trait.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Relative tolerance for deciding whether a state lies on a curve.
pub const CURVE_TOLERANCE: f64 = 1e-9;

/// Relative precision the bisection solvers guarantee (they actually run
/// to adjacent floats); also the threshold for treating two solver outputs
/// as the same state.
pub const SOLVER_TOLERANCE: f64 = 1e-12;

/// Iteration cap for the bisection solvers.
pub const SOLVER_MAX_ITER: usize = 200;

/// Pool reserves: `x` risky-asset units, `y` numéraire units, both positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolState {
    pub x: f64,
    pub y: f64,
}

impl PoolState {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite()) {
            return Err(Error::NegativeReserve);
        }
        Ok(Self { x, y })
    }

    /// Componentwise closeness at the given relative tolerance.
    pub fn approx_eq(&self, other: &PoolState, rel_tol: f64) -> bool {
        numeric::close(self.x, other.x, rel_tol) && numeric::close(self.y, other.y, rel_tol)
    }
}

/// A constant-function trading curve.
///
/// Implementors provide the reserve maps `F_y`, `F_x` and the marginal
/// rate at a given `x`; `state_at_price` has a generic bisection default
/// that concrete curves may replace with a closed form.
pub trait TradingCurve: std::fmt::Debug + Send + Sync {
    /// `F_y(x)`: the unique `y` with `(x, y)` on the curve.
    fn y_at_x(&self, x: f64) -> f64;

    /// `F_x(y)`: the unique `x` with `(x, y)` on the curve.
    fn x_at_y(&self, y: f64) -> f64;

    /// Marginal exchange rate (numéraire per risky unit) at the on-curve
    /// point with the given `x`.
    fn price_at_x(&self, x: f64) -> f64;

    /// The unique on-curve state whose marginal rate equals `v`.
    ///
    /// Default: bisection on `price_at_x`, which is strictly decreasing.
    fn state_at_price(&self, v: f64) -> Result<PoolState> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidPrice(v));
        }
        let f = |x: f64| self.price_at_x(x) - v;
        let (lo, hi) = numeric::bracket_decreasing(&f, 1.0).ok_or(Error::InvalidPrice(v))?;
        let x = numeric::bisect_decreasing(f, lo, hi, 0.0, SOLVER_MAX_ITER);
        PoolState::new(x, self.y_at_x(x))
    }

    /// Whether `state` lies on the curve within `CURVE_TOLERANCE`.
    fn contains(&self, state: PoolState) -> bool {
        state.x > 0.0 && state.y > 0.0 && numeric::rel_dev(state.y, self.y_at_x(state.x)) <= CURVE_TOLERANCE
    }

    /// On-curve check that reports the deviation on failure.
    fn check_on_curve(&self, state: PoolState) -> Result<()> {
        let expected = self.y_at_x(state.x);
        let deviation = numeric::rel_dev(state.y, expected);
        if state.x > 0.0 && state.y > 0.0 && deviation <= CURVE_TOLERANCE {
            Ok(())
        } else {
            Err(Error::CurveViolation {
                x: state.x,
                y: state.y,
                deviation,
            })
        }
    }
}

/// Spot price (marginal exchange rate) of an on-curve state.
pub fn spot_price(curve: &dyn TradingCurve, state: PoolState) -> Result<f64> {
    curve.check_on_curve(state)?;
    Ok(curve.price_at_x(state.x))
}

/// The unique on-curve state with spot price `v`.
pub fn state_at_price(curve: &dyn TradingCurve, v: f64) -> Result<PoolState> {
    curve.state_at_price(v)
}

/// The constant product curve `x * y = k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantProduct {
    k: f64,
}

impl ConstantProduct {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidOrder(format!("curve constant must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    /// Curve through the given reserves (`k = x * y`).
    pub fn from_reserves(x: f64, y: f64) -> Result<Self> {
        let state = PoolState::new(x, y)?;
        Self::new(state.x * state.y)
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

impl TradingCurve for ConstantProduct {
    fn y_at_x(&self, x: f64) -> f64 {
        self.k / x
    }

    fn x_at_y(&self, y: f64) -> f64 {
        self.k / y
    }

    fn price_at_x(&self, x: f64) -> f64 {
        // y / x on the curve
        self.k / (x * x)
    }

    fn state_at_price(&self, v: f64) -> Result<PoolState> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidPrice(v));
        }
        PoolState::new((self.k / v).sqrt(), (self.k * v).sqrt())
    }
}
