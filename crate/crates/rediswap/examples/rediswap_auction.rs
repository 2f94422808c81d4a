//! Per-item auctions: each order and the rebalancing opportunity are sold
//! separately, sandwiches return to the starting state, and refunds go to
//! the parties whose value was captured.
//!
//! ```text
//! cargo run --example rediswap_auction
//! ```

use rediswap::mechanism::{rediswap_run, ArbitrageurReport, AuctionItem, SlotInput};
use rediswap::{execute_bundle, PoolConfig, PoolState, Result, SwapOrder};

fn main() -> Result<()> {
    let config = PoolConfig::constant_product(400.0)?;
    let s0 = PoolState { x: 4.0, y: 100.0 };
    let input = SlotInput {
        s0,
        orders: vec![
            SwapOrder::sell_x(8.0, 25.0, "u1")?,
            SwapOrder::sell_x(30.0, 12.0, "u2")?,
            SwapOrder::buy_x(20.0, 10.0, "u3")?,
        ],
        reports: vec![ArbitrageurReport::new(1, 4.0)?, ArbitrageurReport::new(2, 1.0)?],
        seed: 0,
    };

    let outcome = rediswap_run(&config, &input)?;
    outcome.verify(&config)?;

    println!("auction results, one item at a time:");
    for award in &outcome.audit {
        let item = match award.item {
            AuctionItem::Order(j) => format!("order {}", j + 1),
            AuctionItem::InitialState => "initial state".to_string(),
            AuctionItem::AllOpportunities => "everything".to_string(),
        };
        println!(
            "  {item:<14} -> arb{} (value {:>5.1}), pays second-highest {:>5.1}{}",
            award.winner,
            award.winning_value,
            award.second_value,
            if award.executed { "" } else { "  [not executed]" }
        );
    }

    println!();
    println!("payments: {:?}", outcome.payments.iter().map(|p| (p.arb, p.amount)).collect::<Vec<_>>());
    println!(
        "refunds:  {:?}, LPs get {}",
        outcome.refunds.iter().map(|r| r.amount).collect::<Vec<_>>(),
        outcome.lp_refund
    );

    println!();
    println!("the bundle, step by step:");
    let trace = execute_bundle(&config, &outcome.bundle)?;
    for (step, state) in outcome.bundle.steps.iter().zip(trace.states.iter().skip(1)) {
        println!(
            "  {} {:>8.3} in / {:>8.3} out  -> pool ({:.3}, {:.3})   {:?}",
            step.direction.as_str(),
            step.amount_in,
            step.amount_out,
            state.x,
            state.y,
            step.origin,
        );
    }
    println!(
        "every sandwich lands back on ({}, {}); the final rebalance ends at ({}, {})",
        s0.x, s0.y, outcome.final_state.x, outcome.final_state.y
    );
    Ok(())
}
