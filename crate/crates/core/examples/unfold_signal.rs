//! Fold a random band-limited signal and recover it with both unfolding routes.

use std::f64::consts::{E, PI};

use modulo_radon::experiment::{base_order, BETA_INFLATION};
use modulo_radon::forward::ExceedanceSignal;
use modulo_radon::ops::Threshold;
use modulo_radon::unfold::{
    grid_bound, required_margin, select_order, unfold_compact, unfold_general, UnfoldConfig, UnfoldMode,
};

fn main() -> modulo_radon::Result<()> {
    let (omega, lambda) = (10.0 * PI, 0.1);
    let g = ExceedanceSignal::random(omega, lambda, 7)?;
    let thr = Threshold::new(lambda)?;
    println!("sup |g| = {:.4}, exceeds λ = {lambda} only inside |t| ≤ {:.3}", g.sup_norm, g.rho);

    // compact route, at the base order and just under the guaranteed spacing
    let spacing = (1.0 - 1e-6) / (omega * E);
    let order = base_order(lambda);
    let k = (g.rho.max(1.0) / spacing).ceil() as usize;
    let k_prime = required_margin(g.rho, spacing, order, k);
    let truth = g.sample(spacing, -k_prime, k as i64)?;
    let folded = truth.map(|v| thr.fold(v));
    let cfg = UnfoldConfig::new(lambda, BETA_INFLATION * g.sup_norm, omega, spacing, UnfoldMode::CompactExceedance)?
        .with_order(order)
        .with_rho(g.rho);
    let u = unfold_compact(&folded, &cfg, k)?;
    let exact = u.samples.indexed().all(|(i, v)| v == truth.get(i).unwrap());
    println!(
        "compact: N = {order}, {} samples from index {}, bit-exact = {exact}, flagged = {}",
        folded.len(),
        -k_prime,
        !u.report.success
    );

    // general route: needs β on the 2λ grid, real oversampling since its
    // order grows like 1/ln(1/(TΩe)), and a quiet tail to fix the constant
    let spacing = spacing / 2.0;
    let beta = grid_bound(BETA_INFLATION * g.sup_norm, thr);
    let cfg = UnfoldConfig::new(lambda, beta, omega, spacing, UnfoldMode::General)?;
    let order = select_order(&cfg)?;
    let hi = ((cfg.span() + order) as i64).max((g.rho / spacing).ceil() as i64 + 32);
    let truth = g.sample(spacing, 0, hi)?;
    let u = unfold_general(&truth.map(|v| thr.fold(v)), &cfg)?;
    let err = u
        .samples
        .indexed()
        .map(|(i, v)| (v - truth.get(i).unwrap()).abs())
        .fold(0.0, f64::max);
    println!("general: N = {order}, J = {}, max error = {err:e}, flagged = {}", cfg.span(), !u.report.success);
    Ok(())
}
