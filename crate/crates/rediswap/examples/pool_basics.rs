//! Curve math and swap execution: spot prices, price targeting, fees.
//!
//! ```text
//! cargo run --example pool_basics
//! ```

use rediswap::{
    apply_swap, spot_price, state_at_price, ArbRole, ConstantProduct, Direction, FeeLedger, PoolConfig, PoolState,
    Result, StepOrigin, SwapStep, Token,
};

fn main() -> Result<()> {
    // A pool holding 4 risky units against 100 numéraire: x * y = 400.
    let curve = ConstantProduct::new(400.0)?;
    let config = PoolConfig::new(curve, 0.0)?;
    let s0 = PoolState { x: 4.0, y: 100.0 };
    println!("pool: x*y = {}, reserves ({}, {})", curve.k(), s0.x, s0.y);
    println!("spot price: {}", spot_price(config.curve(), s0)?);

    // Where would the pool sit if the marginal price were 4?
    let target = state_at_price(config.curve(), 4.0)?;
    println!("state at price 4: ({}, {})", target.x, target.y);

    // Swap 4 risky units in; the curve pays out 50 numéraire.
    let step = SwapStep {
        direction: Direction::XtoY,
        amount_in: 4.0,
        amount_out: 50.0,
        origin: StepOrigin::User { order: 0 },
    };
    let outcome = apply_swap(&config, s0, &step)?;
    println!(
        "after swapping 4 X in: ({}, {}), spot {}",
        outcome.state.x,
        outcome.state.y,
        spot_price(config.curve(), outcome.state)?
    );

    // The reverse step restores the pool exactly.
    let back = SwapStep {
        direction: Direction::YtoX,
        amount_in: 50.0,
        amount_out: 4.0,
        origin: StepOrigin::Arbitrageur {
            arb: 0,
            role: ArbRole::Back,
        },
    };
    let restored = apply_swap(&config, outcome.state, &back)?;
    println!("round trip back to: ({}, {})", restored.state.x, restored.state.y);

    // With a 30 bps fee, user steps credit the ledger; arbitrage steps do not.
    let feeful = config.with_fee(0.003)?;
    let mut ledger = FeeLedger::default();
    let charged = apply_swap(&feeful, s0, &step)?;
    ledger.credit(Token::Risky, charged.fee);
    let free = apply_swap(&feeful, s0, &back_to_front(&step))?;
    ledger.credit(Token::Risky, free.fee);
    println!(
        "fee ledger after one user swap and one arbitrage swap at f=0.3%: ({:.6} X, {} Y)",
        ledger.x, ledger.y
    );
    Ok(())
}

fn back_to_front(step: &SwapStep) -> SwapStep {
    SwapStep {
        origin: StepOrigin::Arbitrageur {
            arb: 0,
            role: ArbRole::Front,
        },
        ..*step
    }
}
