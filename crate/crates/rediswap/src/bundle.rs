//! Executable bundles: ordered swap steps with provenance.
//!
//! A bundle starts from a fixed state `s0` and chains steps so every
//! included user order executes exactly at its limit state. Execution
//! replays the steps through [`apply_swap`], validating each transition and
//! accumulating fees plus per-participant token flows for conservation
//! checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curve::PoolState;
use crate::error::Result;
use crate::pool::{apply_swap, Direction, FeeLedger, PoolConfig, StepOrigin, SwapStep, Token};

/// An ordered list of swap steps executable from `s0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub s0: PoolState,
    pub steps: Vec<SwapStep>,
    /// Indices of the user orders the bundle includes, in execution order.
    pub included_orders: Vec<usize>,
}

impl Bundle {
    pub fn new(s0: PoolState) -> Self {
        Self {
            s0,
            steps: Vec::new(),
            included_orders: Vec::new(),
        }
    }

    pub fn push(&mut self, step: SwapStep) {
        if let StepOrigin::User { order } = step.origin {
            self.included_orders.push(order);
        }
        self.steps.push(step);
    }

    pub fn includes_order(&self, order: usize) -> bool {
        self.included_orders.contains(&order)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps inserted on behalf of arbitrageurs.
    pub fn arbitrageur_steps(&self) -> impl Iterator<Item = &SwapStep> {
        self.steps.iter().filter(|s| s.origin.is_arbitrageur())
    }
}

/// A party whose token balance a bundle execution touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Participant {
    User(usize),
    Arbitrageur(usize),
}

/// Signed token flow of one participant over an execution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenFlow {
    pub x: f64,
    pub y: f64,
}

/// Full record of a bundle execution.
#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    /// Pool states before/after every step; `states[0] == s0`.
    pub states: Vec<PoolState>,
    /// Fees credited over the execution.
    pub fees: FeeLedger,
    /// Net token flow per participant (what they gained, signed).
    pub flows: BTreeMap<Participant, TokenFlow>,
}

impl ExecutionTrace {
    pub fn final_state(&self) -> PoolState {
        *self.states.last().expect("trace holds at least s0")
    }

    /// Token conservation: pool delta plus all participant flows plus fee
    /// credits must net to zero for each token. Returns the worst relative
    /// discrepancy across both tokens.
    pub fn conservation_error(&self) -> f64 {
        let first = self.states[0];
        let last = self.final_state();
        let pool_dx = last.x - first.x;
        let pool_dy = last.y - first.y;
        let (mut sum_x, mut sum_y) = (0.0, 0.0);
        let (mut gross_x, mut gross_y) = (first.x.abs(), first.y.abs());
        for flow in self.flows.values() {
            sum_x += flow.x;
            sum_y += flow.y;
            gross_x += flow.x.abs();
            gross_y += flow.y.abs();
        }
        let err_x = (pool_dx + self.fees.x + sum_x).abs() / gross_x.max(1.0);
        let err_y = (pool_dy + self.fees.y + sum_y).abs() / gross_y.max(1.0);
        err_x.max(err_y)
    }
}

/// Executes a bundle from its `s0`, validating every transition.
pub fn execute_bundle(config: &PoolConfig, bundle: &Bundle) -> Result<ExecutionTrace> {
    config.curve().check_on_curve(bundle.s0)?;
    let mut states = Vec::with_capacity(bundle.steps.len() + 1);
    states.push(bundle.s0);
    let mut fees = FeeLedger::default();
    let mut flows: BTreeMap<Participant, TokenFlow> = BTreeMap::new();

    let mut state = bundle.s0;
    for step in &bundle.steps {
        let outcome = apply_swap(config, state, step)?;
        let participant = match step.origin {
            StepOrigin::User { order } => Participant::User(order),
            StepOrigin::Arbitrageur { arb, .. } => Participant::Arbitrageur(arb),
        };
        let flow = flows.entry(participant).or_default();
        match step.direction {
            Direction::XtoY => {
                // gross input = net + fee
                flow.x -= step.amount_in + outcome.fee;
                flow.y += step.amount_out;
            }
            Direction::YtoX => {
                flow.y -= step.amount_in + outcome.fee;
                flow.x += step.amount_out;
            }
        }
        match outcome.fee_token {
            Token::Risky => fees.credit(Token::Risky, outcome.fee),
            Token::Numeraire => fees.credit(Token::Numeraire, outcome.fee),
        }
        state = outcome.state;
        states.push(state);
    }

    Ok(ExecutionTrace { states, fees, flows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::ArbRole;

    fn arb(role: ArbRole) -> StepOrigin {
        StepOrigin::Arbitrageur { arb: 0, role }
    }

    #[test]
    fn executes_chained_steps_and_tracks_flows() {
        let config = PoolConfig::constant_product(400.0).unwrap();
        let s0 = PoolState { x: 4.0, y: 100.0 };
        let mut bundle = Bundle::new(s0);
        bundle.push(SwapStep {
            direction: Direction::XtoY,
            amount_in: 4.0,
            amount_out: 50.0,
            origin: arb(ArbRole::Front),
        });
        bundle.push(SwapStep {
            direction: Direction::XtoY,
            amount_in: 8.0,
            amount_out: 25.0,
            origin: StepOrigin::User { order: 0 },
        });
        let trace = execute_bundle(&config, &bundle).unwrap();
        assert_eq!(trace.final_state(), PoolState { x: 16.0, y: 25.0 });
        assert_eq!(bundle.included_orders, vec![0]);
        assert_eq!(
            trace.flows[&Participant::Arbitrageur(0)],
            TokenFlow { x: -4.0, y: 50.0 }
        );
        assert_eq!(trace.flows[&Participant::User(0)], TokenFlow { x: -8.0, y: 25.0 });
        assert!(trace.conservation_error() < 1e-15);
    }

    #[test]
    fn broken_chain_is_rejected() {
        let config = PoolConfig::constant_product(400.0).unwrap();
        let mut bundle = Bundle::new(PoolState { x: 4.0, y: 100.0 });
        // pretends to start from (8, 50)
        bundle.push(SwapStep {
            direction: Direction::XtoY,
            amount_in: 8.0,
            amount_out: 25.0,
            origin: StepOrigin::User { order: 0 },
        });
        assert!(execute_bundle(&config, &bundle).is_err());
    }

    #[test]
    fn conservation_includes_fees() {
        let config = PoolConfig::new(crate::curve::ConstantProduct::new(400.0).unwrap(), 0.003).unwrap();
        let s0 = PoolState { x: 4.0, y: 100.0 };
        let mut bundle = Bundle::new(s0);
        bundle.push(SwapStep {
            direction: Direction::XtoY,
            amount_in: 4.0,
            amount_out: 50.0,
            origin: StepOrigin::User { order: 0 },
        });
        let trace = execute_bundle(&config, &bundle).unwrap();
        assert!(trace.fees.x > 0.0);
        assert!(trace.conservation_error() < 1e-15);
    }
}
