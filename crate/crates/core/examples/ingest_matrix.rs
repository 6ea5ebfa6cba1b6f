//! Import a plain angle-by-detector matrix and normalize it to unit peak.

use modulo_radon::io::{self, MatrixGeometry, SinogramFormat};

fn main() -> modulo_radon::Result<()> {
    let k = 8;
    let mut text = String::new();
    for m in 0..4 {
        let row: Vec<String> = (-k..=k)
            .map(|i: i32| format!("{}", (10 - i.abs()) as f64 * (m + 1) as f64))
            .collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let path = std::env::temp_dir().join("mrt_ingest_example.txt");
    io::write_text(&path, &text)?;
    let geometry = MatrixGeometry {
        omega: 300.0,
        spacing: 1.0 / k as f64,
        lambda: 0.025,
    };
    let s = io::ingest(&path, SinogramFormat::Matrix, Some(geometry), true)?;
    println!("M = {}, K = {}, sup norm = {}", s.params.angles, s.params.k, s.sup_norm());
    println!("row 0: {:?}", &s.rows[0].values()[..5]);
    Ok(())
}
