//! Success rate of unfolding against spacing, for several difference orders.
//!
//! Runs the reduced sweep; pass `full` for the 1000-trial version.

use modulo_radon::experiment::{success_sweep, SweepConfig};

fn main() -> modulo_radon::Result<()> {
    let cfg = match std::env::args().nth(1).as_deref() {
        Some("full") => SweepConfig::full(),
        _ => SweepConfig::ci(),
    };
    for grid in success_sweep(&cfg)? {
        println!("λ = {}, Ω = {:.1} ({} trials)", grid.lambda, grid.omega, grid.trials);
        print!("{:>8}", "T/Tsh");
        for n in &grid.orders {
            print!("{:>8}", format!("N={n}"));
        }
        println!();
        for j in 0..grid.spacings.len() {
            print!("{:>8.3}", grid.shannon_ratio(j));
            for rates in &grid.rates {
                print!("{:>8.2}", rates[j]);
            }
            println!();
        }
        println!();
    }
    Ok(())
}
