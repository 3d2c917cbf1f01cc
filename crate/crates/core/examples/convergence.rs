//! Δt-convergence study: prints the sweep table and observed orders.
//!
//! cargo run --release --example convergence -- "problem=sine-gordon;dt_exponents=4..10"

use kgspectral::harness::csv::{order_csv, sweep_csv};
use kgspectral::harness::{orders_from_sweep, run_sweep, SweepConfig};
use kgspectral::parallel::Execution;

fn main() {
    let spec = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "problem=linear-kg;dt_exponents=4..12".into());
    let cfg = match SweepConfig::parse(&spec.replace(';', "\n")) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let rows = run_sweep(&cfg, Execution::default()).expect("valid sweep");
    print!("{}", sweep_csv(&rows));
    println!();
    print!("{}", order_csv(&orders_from_sweep(&rows)));
}
