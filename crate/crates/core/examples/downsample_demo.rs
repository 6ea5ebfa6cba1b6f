//! Halving the sample rate breaks first-order unfolding; second order recovers.

use modulo_radon::experiment::synthetic_downsample_demo;

fn main() -> modulo_radon::Result<()> {
    let demo = synthetic_downsample_demo()?;
    println!("λ = {}, ρ = {:.3}, β = {:.3}", demo.lambda, demo.rho, demo.beta);
    print!("{}", demo.to_csv());
    Ok(())
}
