//! Rasterize the built-in phantoms and write them as 16-bit PGM files.

use modulo_radon::io;
use modulo_radon::phantom::{shepp_logan, walnut_standin, ImageGrid};

fn main() -> modulo_radon::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().display().to_string());
    let grid = ImageGrid::new(256, 256)?;
    for (name, p) in [("shepp_logan", shepp_logan()), ("walnut", walnut_standin())] {
        let img = p.rasterize(&grid);
        let path = format!("{dir}/{name}.pgm");
        io::write_pgm16(&path, &img)?;
        println!("{path}: {} ellipses, mass {:.4}, range [{:.3}, {:.3}]", p.ellipses.len(), p.mass(), img.min(), img.max());
    }
    Ok(())
}
