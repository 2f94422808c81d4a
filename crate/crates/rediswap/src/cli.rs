//! Command-line entry points: `demo`, `mechanism`, `probe`, `replay`.
//!
//! Exit codes are uniform: 0 success, 1 domain or assertion failure,
//! 2 usage or input/output failure. All output is reproducible for a fixed
//! `--seed`; `REDISWAP_THREADS` caps worker parallelism.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::curve::PoolState;
use crate::error::{Error, Result};
use crate::mechanism::{
    arbitrageur_utility, run_mechanism, user_utility, ArbitrageurReport, MechanismKind, SlotInput, SlotInputFile,
};
use crate::numeric::close;
use crate::orders::SwapOrder;
use crate::pool::PoolConfig;
use crate::probes::{
    deviation_grid, ne_probe, sybil_probe, truthfulness_probe, ArbitrageurProfile, BeliefPrior, InstanceSampler,
    NeProbeConfig, ProbeReport, SybilSampler,
};
use crate::replay::{
    aggregate, generate_synthetic, read_candles_csv, read_orders_csv, read_pools_csv, run_replay, write_metrics_csv,
    write_summary_json, BaselinePrice, BeliefDistribution, ReplayConfig, ReplayData, Summary, SyntheticConfig,
};

#[derive(Parser)]
#[command(
    name = "rediswap",
    version,
    about = "CFMM mechanism laboratory: optimal arbitrage, MEV-redistribution auctions, incentive probes, trade replay",
    after_help = "Set REDISWAP_THREADS=<n> to cap worker parallelism; outputs do not depend on it."
)]
struct Cli {
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Suppress progress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the three worked examples end-to-end and verify every golden value.
    Demo {
        /// Curve constant override used by the negative-control test harness.
        #[arg(long, hide = true, default_value_t = 400.0)]
        curve_k: f64,
    },
    /// Run one mechanism over a slot-input JSON file and print the outcome.
    Mechanism {
        /// Path to the slot input JSON.
        #[arg(long)]
        input: PathBuf,
        /// Which mechanism to run.
        #[arg(long, default_value = "rediswap", value_parser = parse_mechanism)]
        mech: MechanismKind,
    },
    /// Run a game-theoretic probe; exits 1 when a violation is found.
    Probe {
        #[arg(long, value_enum)]
        probe: ProbeKind,
        /// Mechanism under test (the ne probe always targets rediswap).
        #[arg(long, default_value = "rediswap", value_parser = parse_mechanism)]
        mech: MechanismKind,
        /// Number of randomized trials (Monte Carlo samples for ne).
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Deviation-grid points for the truthfulness probe.
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Replay recorded (CSV) or synthetic trade streams and write metrics.
    Replay {
        /// Orders CSV: block,side,delta_in,delta_out,owner[,ref_price].
        #[arg(long)]
        orders: Option<PathBuf>,
        /// Candles CSV: block,low,high.
        #[arg(long)]
        candles: Option<PathBuf>,
        /// Pool snapshots CSV: block,x,y.
        #[arg(long)]
        pools: Option<PathBuf>,
        /// Replay config JSON (overrides the individual flags below).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Generate this many synthetic blocks instead of reading CSVs.
        #[arg(long)]
        synthetic: Option<u64>,
        #[arg(long, default_value_t = 5)]
        n_arbs: usize,
        #[arg(long, value_enum, default_value_t = DistArg::Gaussian)]
        dist: DistArg,
        /// Gaussian standard deviation relative to the candle midpoint.
        #[arg(long, default_value_t = 0.001)]
        sigma_rel: f64,
        /// Pareto shape parameter.
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Swap-fee setting; repeat the flag to sweep several.
        #[arg(long = "fee")]
        fees: Vec<f64>,
        /// Flat per-order numéraire deduction modeling priority fees.
        #[arg(long, default_value_t = 0.0)]
        priority_fee: f64,
        /// Price the baseline rebalancing loss is computed at.
        #[arg(long, value_enum, default_value_t = BaselineArg::Midpoint)]
        baseline: BaselineArg,
        /// Output directory for metrics.csv and summary.json.
        #[arg(long, default_value = "replay_out")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeKind {
    Truthfulness,
    Sybil,
    Ne,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Gaussian,
    Pareto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    Midpoint,
    Winner,
}

fn parse_mechanism(s: &str) -> std::result::Result<MechanismKind, String> {
    MechanismKind::from_str(s).map_err(|e| e.to_string())
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Ok(threads) = std::env::var("REDISWAP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::SchemaMismatch(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Demo { curve_k } => demo(cli, *curve_k),
        Command::Mechanism { input, mech } => mechanism(cli, input, *mech),
        Command::Probe {
            probe,
            mech,
            trials,
            grid,
        } => run_probe(cli, *probe, *mech, *trials, *grid),
        Command::Replay {
            orders,
            candles,
            pools,
            config,
            synthetic,
            n_arbs,
            dist,
            sigma_rel,
            alpha,
            fees,
            priority_fee,
            baseline,
            out_dir,
        } => replay(
            cli,
            ReplayArgs {
                orders: orders.clone(),
                candles: candles.clone(),
                pools: pools.clone(),
                config: config.clone(),
                synthetic: *synthetic,
                n_arbs: *n_arbs,
                dist: *dist,
                sigma_rel: *sigma_rel,
                alpha: *alpha,
                fees: fees.clone(),
                priority_fee: *priority_fee,
                baseline: *baseline,
                out_dir: out_dir.clone(),
            },
        ),
    }
}

// ---------------------------------------------------------------------------
// demo

#[derive(Debug, Serialize)]
pub struct DemoReport {
    pub optimal: OptimalDemo,
    pub strawman: StrawmanDemo,
    pub rediswap: RediswapDemo,
}

#[derive(Debug, Serialize)]
pub struct OptimalDemo {
    pub potential_s0: f64,
    pub limit_states: Vec<PoolState>,
    pub potential_values: Vec<f64>,
    pub values: Vec<f64>,
    pub optimal_mev: f64,
    pub end_state: PoolState,
}

#[derive(Debug, Serialize)]
pub struct StrawmanDemo {
    pub winner: usize,
    pub payment: f64,
    pub refunds: Vec<f64>,
    pub lp_refund: f64,
    pub winner_utility: f64,
    pub user_utilities: Vec<f64>,
    pub sybil_total: f64,
    pub sybil_refund: f64,
    pub winner_utility_with_sybil: f64,
    pub user_utilities_with_sybil: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct RediswapDemo {
    pub payments: Vec<(usize, f64)>,
    pub refunds: Vec<f64>,
    pub lp_refund: f64,
    pub end_state: PoolState,
    pub winners: Vec<usize>,
}

fn check(failures: &mut Vec<String>, label: &str, got: f64, want: f64) {
    if !close(got, want, 1e-9) {
        failures.push(format!("{label}: got {got}, want {want}"));
    }
}

/// Runs the three worked examples against a pool with constant `k` and
/// asserts every published value. `k = 400` is the genuine configuration;
/// anything else exists so tests can watch the assertions catch corruption.
pub fn run_demo(k: f64) -> Result<DemoReport> {
    let config = PoolConfig::constant_product(k)?;
    // x = 4 on whatever curve we were given; only k = 400 yields (4, 100)
    // and the published numbers.
    let s0 = PoolState::new(4.0, config.curve().y_at_x(4.0))?;
    let orders = vec![
        SwapOrder::sell_x(8.0, 25.0, "u1")?,
        SwapOrder::sell_x(30.0, 12.0, "u2")?,
        SwapOrder::buy_x(20.0, 10.0, "u3")?,
    ];
    let mut failures = Vec::new();

    // Optimal extraction for a lone arbitrageur with belief 4.
    let phi = crate::valuation::potential(config.curve(), s0, 4.0)?;
    check(&mut failures, "potential(s0)", phi, 36.0);
    let mut limit_states = Vec::new();
    let expected_limits = [(8.0, 50.0), (20.0, 20.0), (20.0, 20.0)];
    for (order, want) in orders.iter().zip(expected_limits) {
        let limit = crate::orders::limit_state(config.curve(), order)?;
        if !limit.approx_eq(&PoolState { x: want.0, y: want.1 }, 1e-9) {
            failures.push(format!("limit state: got {limit:?}, want {want:?}"));
        }
        limit_states.push(limit);
    }
    let potential_values: Vec<f64> = orders.iter().map(|o| crate::valuation::tx_potential_value(o, 4.0)).collect();
    let values: Vec<f64> = orders.iter().map(|o| crate::valuation::tx_value(o, 4.0)).collect();
    for (got, want) in potential_values.iter().zip([7.0, 108.0, -20.0]) {
        check(&mut failures, "potential value", *got, want);
    }
    for (got, want) in values.iter().zip([7.0, 108.0, 0.0]) {
        check(&mut failures, "value", *got, want);
    }
    let bundle = crate::optimal::optimal_bundle(&config, s0, &orders, 4.0, 0)?;
    let optimal_mev = crate::optimal::bundle_profit(&config, &bundle, 4.0)?;
    check(&mut failures, "optimal MEV", optimal_mev, 151.0);
    let end_state = crate::bundle::execute_bundle(&config, &bundle)?.final_state();
    if !end_state.approx_eq(&PoolState { x: 10.0, y: 40.0 }, 1e-9) {
        failures.push(format!("end state: got {end_state:?}"));
    }

    // Strawman auction between beliefs 4 and 1.
    let reports = vec![ArbitrageurReport::new(1, 4.0)?, ArbitrageurReport::new(2, 1.0)?];
    let input = SlotInput {
        s0,
        orders: orders.clone(),
        reports: reports.clone(),
        seed: 0,
    };
    let strawman = crate::mechanism::strawman_run(&config, &input)?;
    strawman.verify(&config)?;
    check(&mut failures, "strawman payment", strawman.payment_of(1)?, 92.0);
    let refunds: Vec<f64> = strawman.refunds.iter().map(|r| r.amount).collect();
    check(&mut failures, "strawman refund TX1", refunds[0], 7.0 / 151.0 * 92.0);
    check(&mut failures, "strawman refund TX2", refunds[1], 108.0 / 151.0 * 92.0);
    check(&mut failures, "strawman refund TX3", refunds[2], 0.0);
    check(&mut failures, "strawman LP refund", strawman.lp_refund, 36.0 / 151.0 * 92.0);
    let winner_utility = arbitrageur_utility(&strawman, 1, 4.0, &[])?;
    check(&mut failures, "strawman winner utility", winner_utility, 59.0);
    let user_utilities: Vec<f64> = (0..3).map(|j| user_utility(&strawman, j)).collect::<Result<_>>()?;
    check(&mut failures, "strawman u(TX1)", user_utilities[0], 25.0 + 7.0 / 151.0 * 92.0);
    check(&mut failures, "strawman u(TX2)", user_utilities[1], 12.0 + 108.0 / 151.0 * 92.0);
    check(&mut failures, "strawman u(TX3)", user_utilities[2], 20.0);

    // ... and the Sybil order that breaks it.
    let mut sybil_orders = orders.clone();
    sybil_orders.push(SwapOrder::sell_x(260.0, 271.0, "arb1")?);
    let sybil_input = SlotInput {
        s0,
        orders: sybil_orders,
        reports: reports.clone(),
        seed: 0,
    };
    let with_sybil = crate::mechanism::strawman_run(&config, &sybil_input)?;
    with_sybil.verify(&config)?;
    check(&mut failures, "sybil total", with_sybil.audit[0].winning_value, 920.0);
    check(&mut failures, "sybil refund", with_sybil.refund_of(3)?, 769.0 / 920.0 * 92.0);
    let winner_utility_with_sybil = arbitrageur_utility(&with_sybil, 1, 4.0, &[3])?;
    check(
        &mut failures,
        "sybil winner utility",
        winner_utility_with_sybil,
        59.0 + 769.0 / 920.0 * 92.0,
    );
    let user_utilities_with_sybil: Vec<f64> = (0..3).map(|j| user_utility(&with_sybil, j)).collect::<Result<_>>()?;
    check(&mut failures, "sybil u(TX1)", user_utilities_with_sybil[0], 25.0 + 7.0 / 920.0 * 92.0);
    check(&mut failures, "sybil u(TX2)", user_utilities_with_sybil[1], 12.0 + 108.0 / 920.0 * 92.0);

    // Per-item auctions on the same slot.
    let rediswap = crate::mechanism::rediswap_run(&config, &input)?;
    rediswap.verify(&config)?;
    check(&mut failures, "rediswap payment arb1", rediswap.payment_of(1)?, 18.0);
    check(&mut failures, "rediswap payment arb2", rediswap.payment_of(2)?, 36.0);
    check(&mut failures, "rediswap refund TX2", rediswap.refund_of(1)?, 18.0);
    check(&mut failures, "rediswap LP refund", rediswap.lp_refund, 36.0);
    let rediswap_end = rediswap.final_state;
    if !rediswap_end.approx_eq(&PoolState { x: 20.0, y: 20.0 }, 1e-9) {
        failures.push(format!("rediswap end state: got {rediswap_end:?}"));
    }
    let winners: Vec<usize> = rediswap.audit.iter().map(|a| a.winner).collect();
    if winners != vec![1, 1, 2, 2] {
        failures.push(format!("rediswap winners: got {winners:?}"));
    }

    if let Some(first) = failures.first() {
        return Err(Error::InvariantViolation(format!(
            "{} golden values failed, first: {first}",
            failures.len()
        )));
    }

    Ok(DemoReport {
        optimal: OptimalDemo {
            potential_s0: phi,
            limit_states,
            potential_values,
            values,
            optimal_mev,
            end_state,
        },
        strawman: StrawmanDemo {
            winner: 1,
            payment: strawman.payment_of(1)?,
            refunds,
            lp_refund: strawman.lp_refund,
            winner_utility,
            user_utilities,
            sybil_total: with_sybil.audit[0].winning_value,
            sybil_refund: with_sybil.refund_of(3)?,
            winner_utility_with_sybil,
            user_utilities_with_sybil,
        },
        rediswap: RediswapDemo {
            payments: rediswap.payments.iter().map(|p| (p.arb, p.amount)).collect(),
            refunds: rediswap.refunds.iter().map(|r| r.amount).collect(),
            lp_refund: rediswap.lp_refund,
            end_state: rediswap_end,
            winners,
        },
    })
}

fn demo(cli: &Cli, k: f64) -> Result<i32> {
    let report = run_demo(k)?;
    match cli.output {
        Output::Json | Output::Csv => println!("{}", serde_json::to_string_pretty(&report)?),
        Output::Text => {
            println!("optimal extraction (k=400, s0=(4,100), belief 4)");
            println!("  potential(s0) = {}", report.optimal.potential_s0);
            for (i, (limit, (dphi, value))) in report
                .optimal
                .limit_states
                .iter()
                .zip(report.optimal.potential_values.iter().zip(&report.optimal.values))
                .enumerate()
            {
                println!(
                    "  TX{}: limit ({}, {})  potential value {:>4}  value {:>3}",
                    i + 1,
                    limit.x,
                    limit.y,
                    dphi,
                    value
                );
            }
            println!("  optimal MEV = {}", report.optimal.optimal_mev);
            println!(
                "  bundle ends at ({}, {})",
                report.optimal.end_state.x, report.optimal.end_state.y
            );
            println!("single-auction mechanism (beliefs 4 vs 1)");
            println!(
                "  winner arb{} pays {}; refunds TX1 {:.6}, TX2 {:.6}, TX3 {}; LPs {:.6}",
                report.strawman.winner,
                report.strawman.payment,
                report.strawman.refunds[0],
                report.strawman.refunds[1],
                report.strawman.refunds[2],
                report.strawman.lp_refund
            );
            println!("  winner utility {}", report.strawman.winner_utility);
            println!(
                "  with a (260 X -> 271 Y) Sybil order: total {}, Sybil refund {:.6}, winner utility {:.6}",
                report.strawman.sybil_total, report.strawman.sybil_refund, report.strawman.winner_utility_with_sybil
            );
            println!("per-item mechanism (same slot)");
            println!(
                "  payments: arb1 {}, arb2 {}; TX2 owner refunded {}; LPs refunded {}",
                report.rediswap.payments[0].1,
                report.rediswap.payments[1].1,
                report.rediswap.refunds[1],
                report.rediswap.lp_refund
            );
            println!(
                "  bundle ends at ({}, {}); all golden values verified",
                report.rediswap.end_state.x, report.rediswap.end_state.y
            );
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// mechanism

fn mechanism(cli: &Cli, input: &PathBuf, mech: MechanismKind) -> Result<i32> {
    let text = std::fs::read_to_string(input)?;
    let file: SlotInputFile = serde_json::from_str(&text)?;
    let (config, slot) = file.into_parts()?;
    let outcome = run_mechanism(mech, &config, &slot)?;
    if !cli.quiet {
        eprintln!(
            "{} orders, {} reports -> {} steps, payments {:.6}",
            slot.orders.len(),
            slot.reports.len(),
            outcome.bundle.steps.len(),
            outcome.total_payments()
        );
    }
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    Ok(0)
}

// ---------------------------------------------------------------------------
// probe

fn run_probe(cli: &Cli, probe: ProbeKind, mech: MechanismKind, trials: u64, grid: usize) -> Result<i32> {
    let sampler = InstanceSampler::default();
    let report: ProbeReport = match probe {
        ProbeKind::Truthfulness => truthfulness_probe(mech, &sampler, &deviation_grid(grid), trials, cli.seed)?,
        ProbeKind::Sybil => sybil_probe(mech, &sampler, &SybilSampler::large_overpriced(), trials, cli.seed)?,
        ProbeKind::Ne => {
            let config = PoolConfig::constant_product(1e6)?;
            let s0 = config.curve().state_at_price(4.0)?;
            let prior = BeliefPrior::Uniform { lo: 3.2, hi: 4.8 };
            let profiles = vec![
                ArbitrageurProfile::new(4.0, s0.x * 0.1, s0.y * 0.1, prior)?,
                ArbitrageurProfile::new(4.2, s0.x * 0.1, s0.y * 0.1, prior)?,
            ];
            let real_orders = vec![
                SwapOrder::sell_x(s0.x * 0.05, s0.x * 0.05 * 3.96, "u0")?,
                SwapOrder::buy_x(s0.y * 0.05, s0.y * 0.05 / 4.04, "u1")?,
            ];
            let ne = NeProbeConfig {
                mc_samples: trials as usize,
                ..NeProbeConfig::default()
            };
            ne_probe(&config, s0, &profiles, &real_orders, &ne, cli.seed)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.passed() {
        if !cli.quiet {
            eprintln!("probe passed (max violation {:.3e})", report.max_violation);
        }
        Ok(0)
    } else {
        if !cli.quiet {
            eprintln!("probe FAILED (max violation {:.6})", report.max_violation);
        }
        Ok(1)
    }
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
    orders: Option<PathBuf>,
    candles: Option<PathBuf>,
    pools: Option<PathBuf>,
    config: Option<PathBuf>,
    synthetic: Option<u64>,
    n_arbs: usize,
    dist: DistArg,
    sigma_rel: f64,
    alpha: f64,
    fees: Vec<f64>,
    priority_fee: f64,
    baseline: BaselineArg,
    out_dir: PathBuf,
}

fn replay(cli: &Cli, args: ReplayArgs) -> Result<i32> {
    let cfg = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: ReplayConfig = serde_json::from_str(&text)?;
        cfg.seed = cli.seed;
        cfg
    } else {
        ReplayConfig {
            n_arbs: args.n_arbs,
            dist: match args.dist {
                DistArg::Gaussian => BeliefDistribution::Gaussian {
                    sigma_rel: args.sigma_rel,
                },
                DistArg::Pareto => BeliefDistribution::Pareto { alpha: args.alpha },
            },
            fees: if args.fees.is_empty() { vec![0.0] } else { args.fees.clone() },
            priority_fee: args.priority_fee,
            baseline: match args.baseline {
                BaselineArg::Midpoint => BaselinePrice::Midpoint,
                BaselineArg::Winner => BaselinePrice::WinnerBelief,
            },
            seed: cli.seed,
        }
    };

    let data = if let Some(blocks) = args.synthetic {
        if blocks == 0 {
            return Err(Error::SchemaMismatch("--synthetic needs at least one block".into()));
        }
        generate_synthetic(&SyntheticConfig {
            blocks,
            seed: cli.seed,
            ..SyntheticConfig::default()
        })?
    } else {
        let pools = args
            .pools
            .as_ref()
            .ok_or_else(|| Error::SchemaMismatch("--pools is required without --synthetic".into()))?;
        let candles = args
            .candles
            .as_ref()
            .ok_or_else(|| Error::SchemaMismatch("--candles is required without --synthetic".into()))?;
        ReplayData {
            pools: read_pools_csv(pools)?,
            candles: read_candles_csv(candles)?,
            orders: match &args.orders {
                Some(path) => read_orders_csv(path)?,
                None => Vec::new(),
            },
        }
    };

    let metrics = run_replay(&cfg, &data)?;
    let summary = aggregate(&metrics)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let metrics_path = args.out_dir.join("metrics.csv");
    let summary_path = args.out_dir.join("summary.json");
    write_metrics_csv(&metrics_path, &metrics)?;
    write_summary_json(&summary_path, &summary)?;
    if !cli.quiet {
        eprintln!(
            "wrote {} and {}",
            metrics_path.display(),
            summary_path.display()
        );
    }

    match cli.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        // bulk per-block metrics on stdout
        Output::Csv => print!("{}", std::fs::read_to_string(&metrics_path)?),
        Output::Text => print_summary_text(&summary),
    }
    Ok(0)
}

fn print_summary_text(summary: &Summary) {
    println!("blocks replayed: {}", summary.blocks);
    for fee in &summary.per_fee {
        println!(
            "fee {:>7.4}%: {} orders, {:.1}% filled, {:.1}% better, {:.1}% ties, median LVR-reduction ratio {:.6}",
            fee.fee * 100.0,
            fee.orders,
            if fee.orders > 0 {
                100.0 * fee.filled as f64 / fee.orders as f64
            } else {
                0.0
            },
            fee.better_pct,
            fee.tie_pct,
            fee.ratio_quantiles.p50
        );
    }
}
