//! The single-item auction and the Sybil order that breaks it.
//!
//! Two arbitrageurs bid for the whole opportunity set; the winner pays the
//! loser's total and the payment is split across orders and LPs pro rata.
//! A fake order then inflates the winner's total and quietly redirects most
//! of the refund pool to its owner.
//!
//! ```text
//! cargo run --example strawman_auction
//! ```

use rediswap::mechanism::{arbitrageur_utility, strawman_run, user_utility, ArbitrageurReport, SlotInput};
use rediswap::{PoolConfig, PoolState, Result, SwapOrder};

fn main() -> Result<()> {
    let config = PoolConfig::constant_product(400.0)?;
    let s0 = PoolState { x: 4.0, y: 100.0 };
    let orders = vec![
        SwapOrder::sell_x(8.0, 25.0, "u1")?,
        SwapOrder::sell_x(30.0, 12.0, "u2")?,
        SwapOrder::buy_x(20.0, 10.0, "u3")?,
    ];
    let reports = vec![ArbitrageurReport::new(1, 4.0)?, ArbitrageurReport::new(2, 1.0)?];

    let input = SlotInput {
        s0,
        orders: orders.clone(),
        reports: reports.clone(),
        seed: 7,
    };
    let honest = strawman_run(&config, &input)?;
    let award = &honest.audit[0];
    println!(
        "winner: arb{} with total {}; pays the runner-up total {}",
        award.winner, award.winning_value, award.second_value
    );
    for refund in &honest.refunds {
        println!("  refund to {} (order {}): {:.6}", refund.owner, refund.order, refund.amount);
    }
    println!("  refund to LPs: {:.6}", honest.lp_refund);
    println!("winner's utility: {}", arbitrageur_utility(&honest, 1, 4.0, &[])?);
    println!();

    // The attack: a huge sell order priced so only the winner values it.
    let sybil = SwapOrder::sell_x(260.0, 271.0, "arb1")?;
    println!(
        "arb1 slips in a fake order: sell {} X for >= {} Y (limit price {:.4})",
        sybil.delta_in,
        sybil.delta_out,
        sybil.limit_price()
    );
    let mut attacked_orders = orders;
    attacked_orders.push(sybil);
    let attacked = strawman_run(
        &config,
        &SlotInput {
            s0,
            orders: attacked_orders,
            reports,
            seed: 7,
        },
    )?;
    println!(
        "winner total inflates {} -> {}; payment stays {}",
        honest.audit[0].winning_value, attacked.audit[0].winning_value, attacked.payment_of(1)?
    );
    println!("  fake order's refund: {:.6}", attacked.refund_of(3)?);
    println!(
        "  arb1 utility: {:.6} -> {:.6}",
        arbitrageur_utility(&honest, 1, 4.0, &[])?,
        arbitrageur_utility(&attacked, 1, 4.0, &[3])?
    );
    for j in 0..3 {
        println!(
            "  user {} utility: {:.6} -> {:.6}",
            j + 1,
            user_utility(&honest, j)?,
            user_utility(&attacked, j)?
        );
    }
    println!("real users lost refunds to the fake order: not Sybil-proof");
    Ok(())
}
