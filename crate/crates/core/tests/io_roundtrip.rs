use modulo_radon::forward::{SamplingParams, Sinogram};
use modulo_radon::io::{self, MatrixGeometry, SinogramFormat};
use modulo_radon::ops::SampleSeq;
use modulo_radon::phantom::ImageGrid;
use modulo_radon::Error;
use proptest::prelude::*;

fn sinogram(angles: usize, k: usize, k_prime: usize, values: &[f64]) -> Sinogram {
    let params = SamplingParams::new(123.5, 0.0011, 0.025, k, k_prime, angles).unwrap();
    let len = k + k_prime + 1;
    let rows = (0..angles)
        .map(|m| SampleSeq::new(-(k_prime as i64), (0..len).map(|i| values[(m * len + i) % values.len()]).collect()).unwrap())
        .collect();
    Sinogram::new(params, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sinogram_formats_are_lossless(
        angles in 1usize..5,
        k in 1usize..12,
        extra in 0usize..6,
        values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 1..40),
    ) {
        let s = sinogram(angles, k, k + extra, &values);
        prop_assert_eq!(&io::decode_sinogram(&io::encode_sinogram(&s).unwrap()).unwrap(), &s);
        prop_assert_eq!(&io::sinogram_from_csv(&io::sinogram_to_csv(&s)).unwrap(), &s);
    }

    #[test]
    fn raw_images_are_lossless(w in 1usize..9, h in 1usize..9, seed in prop::collection::vec(-1e3f64..1e3, 81)) {
        let img = ImageGrid::from_pixels(w, h, seed[..w * h].to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.f64");
        io::write_raw_image(&path, &img).unwrap();
        prop_assert_eq!(io::read_raw_image(&path).unwrap(), img);
    }

    #[test]
    fn pgm_keeps_values_to_sixteen_bits(w in 1usize..9, h in 1usize..9, seed in prop::collection::vec(-5.0f64..5.0, 81)) {
        let img = ImageGrid::from_pixels(w, h, seed[..w * h].to_vec()).unwrap();
        let back = io::decode_pgm16(&io::encode_pgm16(&img)).unwrap();
        let range = img.max() - img.min();
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            prop_assert!((a - b).abs() <= range / 65535.0 + 1e-12);
        }
    }
}

#[test]
fn files_round_trip_through_each_format() {
    let s = sinogram(3, 4, 6, &[0.5, -0.25, 1e-300, 3.0e10, -0.0]);
    let dir = tempfile::tempdir().unwrap();
    for name in ["s.mrts", "s.csv"] {
        let path = dir.path().join(name);
        let format = SinogramFormat::from_path(&path);
        io::write_sinogram(&path, &s, format).unwrap();
        assert_eq!(io::read_sinogram(&path, format, None).unwrap(), s);
    }
}

#[test]
fn matrix_ingest_normalizes_to_unit_peak() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walnut.txt");
    std::fs::write(&path, "0 1 4 1 0\n0 2 8 2 0\n1 2 3 2 1\n").unwrap();
    let geometry = MatrixGeometry {
        omega: 300.0,
        spacing: 1.0 / 1128.0,
        lambda: 0.025,
    };
    let s = io::ingest(&path, SinogramFormat::Matrix, Some(geometry), true).unwrap();
    assert_eq!(s.sup_norm(), 1.0);
    assert_eq!((s.params.angles, s.params.k, s.params.k_prime), (3, 2, 2));
    assert_eq!(s.rows[1].values(), &[0.0, 0.25, 1.0, 0.25, 0.0]);
}

#[test]
fn malformed_input_names_row_and_column() {
    let g = MatrixGeometry {
        omega: 1.0,
        spacing: 1.0,
        lambda: 1.0,
    };
    match io::sinogram_from_matrix("1 2 3\n4 x 6\n", g) {
        Err(Error::Parse { row: 2, column: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(matches!(io::sinogram_from_matrix("", g), Err(Error::Parse { .. })));
    assert!(matches!(io::sinogram_from_csv(""), Err(Error::Parse { .. })));
    assert!(io::decode_sinogram(b"MRTS").is_err());
}
