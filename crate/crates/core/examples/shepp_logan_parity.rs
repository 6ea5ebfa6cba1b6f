//! Shepp-Logan through the whole chain at the paper-scale geometry.
//!
//! `cargo run --release --example shepp_logan_parity -- 0.00025`

use modulo_radon::experiment::{run_pipeline, PipelineConfig, PipelineMetrics};
use modulo_radon::phantom::shepp_logan;

fn main() -> modulo_radon::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.025);
    let out = run_pipeline(&shepp_logan(), &PipelineConfig::shepp_logan(lambda))?;
    let m = &out.metrics;
    println!("{}\n{}", PipelineMetrics::CSV_HEADER, m.csv_line());
    println!();
    println!("compression     {:.1}x", m.compression);
    println!("left extension  K' = {} ({} extra samples, N = {})", m.k_prime, m.extra_samples, m.order);
    println!(
        "general route   J = {}, N = {} ({} extra samples)",
        m.general_span, m.general_order, m.general_extra_samples
    );
    if let (Some(a), Some(b)) = (m.rmse_fbp, m.rmse_usfbp) {
        println!("RMSE            FBP {a:.6}, US-FBP {b:.6}");
    }
    let identical = out.fbp.pixels() == out.usfbp.pixels();
    println!("images identical: {identical}");
    Ok(())
}
