//! A deterministic laboratory for constant-function market makers.
//!
//! The crate models a two-asset CFMM pool and the arbitrage economy around
//! it: user swap intents with limit states, the optimal extraction bundle a
//! single arbitrageur can build against public order flow, and two
//! MEV-redistribution auctions that capture that value and refund it to
//! users and liquidity providers. Executable probes check the mechanisms'
//! incentive properties (truthfulness, Sybil-proofness, equilibrium Sybil
//! strategies), and a replay harness measures execution quality and LP loss
//! over recorded or synthetic trade streams.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example pool_basics        # curve math, swaps, fees
//! cargo run --example optimal_mev        # the maximal-extraction bundle
//! cargo run --example strawman_auction   # single-item auction + Sybil attack
//! cargo run --example rediswap_auction   # per-item auctions with refunds
//! cargo run --example slot_engine        # chained slots with timed feeds
//! cargo run --example incentive_probes   # truthfulness / Sybil probes
//! cargo run --example sybil_strategy     # equilibrium Sybil-order sizing
//! cargo run --example synthetic_replay   # replay metrics on synthetic data
//! ```
//!
//! The same functionality is scriptable through the thin `rediswap` binary
//! (`demo`, `mechanism`, `probe`, `replay`).
//!
//! Everything is a pure value type; all randomness flows through explicit
//! seeds, and parallel runs reduce deterministically.

pub mod bundle;
pub mod cli;
pub mod curve;
mod error;
pub mod mechanism;
mod numeric;
pub mod optimal;
pub mod orders;
pub mod pool;
pub mod probes;
pub mod replay;
pub mod valuation;

pub use bundle::{execute_bundle, Bundle, ExecutionTrace, Participant, TokenFlow};
pub use curve::{spot_price, state_at_price, ConstantProduct, PoolState, TradingCurve, CURVE_TOLERANCE};
pub use error::{Error, Result};
pub use mechanism::{
    arbitrageur_utility, rediswap_run, run_mechanism, run_slot, strawman_run, user_utility, ArbitrageurReport,
    MechanismKind, MechanismOutcome, SlotEngine, SlotInput, SlotInputFile,
};
pub use optimal::{brute_force_best_profit, bundle_profit, optimal_bundle, theoretical_best_profit};
pub use orders::{execute_at_state, impact, limit_state, Impact, SwapOrder};
pub use pool::{apply_swap, ArbRole, Direction, FeeLedger, PoolConfig, StepOrigin, SwapStep, Token};
pub use valuation::{lvr, potential, tx_potential_value, tx_value, Belief};
