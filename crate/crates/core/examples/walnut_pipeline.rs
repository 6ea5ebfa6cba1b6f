//! Walnut-like phantom at the measured-data geometry (M = 600, K = 1128).
//!
//! With a real sinogram matrix, pass its path: rows are angles, columns
//! are detector bins over `-K..=K`.

use modulo_radon::experiment::{run_pipeline_on_sinogram, walnut_pipeline, FilterKind};
use modulo_radon::io::{self, MatrixGeometry, SinogramFormat};

fn main() -> modulo_radon::Result<()> {
    let lambda = 0.025;
    let out = match std::env::args().nth(1) {
        Some(path) => {
            let geometry = MatrixGeometry {
                omega: 300.0,
                spacing: 1.0 / 1128.0,
                lambda,
            };
            let s = io::ingest(&path, SinogramFormat::Matrix, Some(geometry), true)?;
            run_pipeline_on_sinogram(&s, FilterKind::Cosine, 256, None)?
        }
        None => walnut_pipeline(lambda)?,
    };
    let m = &out.metrics;
    println!("sup norm {:.6}, compression {:.1}x", out.sinogram.sup_norm(), m.compression);
    println!("K' = {}, N = {}, rows flagged {}", m.k_prime, m.order, m.rows_flagged);
    println!("parity delta {:e}", m.parity_delta);
    if let Some(dir) = std::env::args().nth(2) {
        io::write_pgm16(format!("{dir}/walnut_usfbp.pgm"), &out.usfbp)?;
    }
    Ok(())
}
