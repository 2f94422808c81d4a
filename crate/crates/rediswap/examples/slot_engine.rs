//! Chained slots with logical time: orders and reports registered before the
//! cutoff trade in the current slot; the pool state carries forward.
//!
//! ```text
//! cargo run --example slot_engine
//! ```

use rediswap::mechanism::{ArbitrageurReport, SlotEngine};
use rediswap::{PoolConfig, PoolState, Result, SwapOrder};

fn main() -> Result<()> {
    let config = PoolConfig::constant_product(400.0)?;
    let mut engine = SlotEngine::new(config, PoolState { x: 4.0, y: 100.0 })?;

    // Slot 1: one order and two reports arrive in time; a third report is
    // too late and waits.
    let orders = [(2u64, SwapOrder::sell_x(8.0, 25.0, "u1")?)];
    let reports = [
        (1u64, ArbitrageurReport::new(1, 4.0)?),
        (3u64, ArbitrageurReport::new(2, 1.0)?),
        (9u64, ArbitrageurReport::new(3, 30.0)?), // misses the cutoff
    ];
    let outcome = engine.run_slot(&orders, &reports, 5, 42)?;
    println!(
        "slot 1: {} reports made the cutoff, {} bundle steps, pool now ({:.3}, {:.3})",
        outcome.reports.len(),
        outcome.bundle.steps.len(),
        engine.state().x,
        engine.state().y
    );
    for payment in &outcome.payments {
        println!("  arb{} pays {:.4}", payment.arb, payment.amount);
    }
    println!("  LPs refunded {:.4}", outcome.lp_refund);

    // Slot 2 starts from slot 1's final state; the late arbitrageur now
    // participates and drags the pool toward its own belief.
    let reports = [
        (0u64, ArbitrageurReport::new(3, 30.0)?),
        (1u64, ArbitrageurReport::new(1, 4.0)?),
    ];
    let outcome = engine.run_slot(&[], &reports, 5, 43)?;
    println!(
        "slot 2: starts at ({:.3}, {:.3}), rebalances to ({:.3}, {:.3}), LPs refunded {:.4}",
        outcome.s0.x,
        outcome.s0.y,
        engine.state().x,
        engine.state().y,
        outcome.lp_refund
    );
    println!("fees accumulated so far: ({}, {})", engine.fees().x, engine.fees().y);
    Ok(())
}
