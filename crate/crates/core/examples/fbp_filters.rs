//! Ram-Lak and cosine reconstructions of Shepp-Logan at a modest bandwidth.

use std::f64::consts::E;

use modulo_radon::fbp::{fbp_reconstruct, filter_kernel, rmse, FilterSpec};
use modulo_radon::forward::{make_sinogram, SamplingParams};
use modulo_radon::phantom::{shepp_logan, ImageGrid};

fn main() -> modulo_radon::Result<()> {
    let omega = 100.0;
    let spacing = 1.0 / (2.0 * omega * E);
    let k = (1.0 / spacing).ceil() as usize;
    let params = SamplingParams::new(omega, spacing, 1.0, k, k, 100)?;
    let phantom = shepp_logan();
    let s = make_sinogram(&phantom, &params)?;
    let grid = ImageGrid::new(128, 128)?;
    let truth = phantom.rasterize(&grid);
    for spec in [FilterSpec::ram_lak(omega)?, FilterSpec::cosine(omega)?] {
        let img = fbp_reconstruct(&s, &spec, &grid)?;
        println!(
            "{:?}: F(0) = {:.1}, F(T) = {:.1}, RMSE {:.4}",
            spec.window,
            filter_kernel(&spec, 0.0),
            filter_kernel(&spec, spacing),
            rmse(&img, &truth)?
        );
    }
    Ok(())
}
