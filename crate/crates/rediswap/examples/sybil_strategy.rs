//! Sizing the profitable fake order: the expected-profit landscape of a
//! budget-limited Sybil leg, the optimizer's pick, and a Monte Carlo
//! best-response check that the combined strategy (truthful report + sized
//! Sybil orders) is an equilibrium.
//!
//! ```text
//! cargo run --example sybil_strategy
//! ```

use rediswap::probes::{ne_probe, optimize_sybil, sybil_profit_gamma, ArbitrageurProfile, BeliefPrior, NeProbeConfig};
use rediswap::{ConstantProduct, Direction, PoolConfig, Result, SwapOrder, TradingCurve};

fn main() -> Result<()> {
    let belief = 4.0;
    let curve = ConstantProduct::new(1e6)?;
    let s0 = curve.state_at_price(belief)?;
    let profile = ArbitrageurProfile::new(
        belief,
        s0.x * 0.1,
        s0.y * 0.1,
        BeliefPrior::Uniform { lo: 3.2, hi: 4.8 },
    )?;

    // Against a single competitor whose belief is surely 4.6, the sell-side
    // profit grows in the demanded output until the competitor stops valuing
    // the order.
    let v_c = 4.6;
    println!("profit of a sell-side fake order vs a competitor who believes {v_c}:");
    println!("  (budget {} X, true belief {belief})", profile.budget_x);
    for i in 0..9 {
        let t = profile.budget_x * (belief + (v_c * 1.1 - belief) * i as f64 / 8.0);
        let profit = sybil_profit_gamma(&curve, &profile, Direction::XtoY, belief, t, 0, &[v_c]);
        println!("  demand {:>9.1} Y -> expected profit {:>8.2}", t, profit);
    }

    let point = optimize_sybil(&profile, &[BeliefPrior::PointMass { v: v_c }], 128, 512, 7)?;
    if let Some(leg) = point.sell_x {
        println!(
            "optimizer picks demand {:.1} (= budget x competitor belief), expected profit {:.2}",
            leg.delta_out, leg.expected_profit
        );
    }

    // Under a diffuse prior both legs get sized; expected profit is smaller.
    println!();
    let uniform = optimize_sybil(&profile, &[profile.prior], 128, 2000, 7)?;
    println!("against a uniform [3.2, 4.8] competitor prior:");
    match uniform.sell_x {
        Some(leg) => println!(
            "  sell leg: spend {:.1} X demanding {:.1} Y (E[profit] {:.2})",
            leg.delta_in, leg.delta_out, leg.expected_profit
        ),
        None => println!("  sell leg: not worth placing"),
    }
    match uniform.buy_x {
        Some(leg) => println!(
            "  buy leg:  spend {:.1} Y demanding {:.2} X (E[profit] {:.2})",
            leg.delta_in, leg.delta_out, leg.expected_profit
        ),
        None => println!("  buy leg:  not worth placing"),
    }

    // Can any joint (report, sizing) deviation beat that strategy?
    println!();
    println!("best-response search (this takes a moment)...");
    let config = PoolConfig::new(curve, 0.0)?;
    let profiles = vec![profile.clone(), ArbitrageurProfile::new(4.3, s0.x * 0.1, s0.y * 0.1, profile.prior)?];
    let real_orders = vec![
        SwapOrder::sell_x(s0.x * 0.05, s0.x * 0.05 * 3.95, "u0")?,
        SwapOrder::buy_x(s0.y * 0.05, s0.y * 0.05 / 4.05, "u1")?,
    ];
    let ne = NeProbeConfig {
        mc_samples: 300,
        ..NeProbeConfig::default()
    };
    let report = ne_probe(&config, s0, &profiles, &real_orders, &ne, 11)?;
    println!(
        "  best deviation's mean gain minus 2 standard errors: {:+.4} -> {}",
        report.max_violation,
        if report.passed() {
            "equilibrium not refuted"
        } else {
            "REFUTED"
        }
    );
    Ok(())
}
