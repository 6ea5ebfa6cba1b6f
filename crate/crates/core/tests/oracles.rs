mod common;

use std::f64::consts::{E, PI};

use modulo_radon::fbp::{back_project, fbp_reconstruct, filter_kernel, filter_projections, rmse, FilterSpec, Window};
use modulo_radon::forward::{make_sinogram, projection_window, SamplingParams, Sinogram};
use modulo_radon::ops::SampleSeq;
use modulo_radon::phantom::{radon_ellipse, shepp_logan, ImageGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn detector_params(omega: f64, k: usize, angles: usize) -> SamplingParams {
    SamplingParams::new(omega, 1.0 / (2.0 * omega * E), 1.0, k, k, angles).unwrap()
}

fn constant_sinogram(params: SamplingParams, row: impl Fn(i64) -> f64) -> Sinogram {
    let k = params.k as i64;
    let rows = (0..params.angles).map(|_| SampleSeq::from_fn(-k, k, &row).unwrap()).collect();
    Sinogram::new(params, rows).unwrap()
}

#[test]
fn ellipse_radon_matches_line_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let e = common::random_ellipse(&mut rng);
        let theta = rand::Rng::gen_range(&mut rng, 0.0..PI);
        let t = rand::Rng::gen_range(&mut rng, -0.9..0.9);
        let want = common::line_integral(&e, theta, t, 1e-5);
        let got = radon_ellipse(&e, theta, t);
        assert!((got - want).abs() < 1e-8, "{e:?} θ={theta} t={t}: {got} vs {want}");
    }
}

#[test]
fn projection_integrates_to_phantom_mass() {
    let p = shepp_logan();
    let n = 20_000;
    let h = 2.0 / n as f64;
    for theta in [0.0, 0.4, 1.3, 2.9] {
        let inner: f64 = (1..n).map(|i| p.radon(theta, -1.0 + i as f64 * h)).sum();
        assert!((h * inner - p.mass()).abs() < 1e-4, "θ={theta}");
    }
}

#[test]
fn sampled_prefiltered_projection_keeps_mass() {
    // for band-limited p and T < π/Ω, T Σ p(kT) equals the zero frequency exactly;
    // what remains is the truncation of the slowly decaying tails
    let p = shepp_logan();
    let omega = 60.0;
    let spacing = 1.0 / (2.0 * omega * E);
    let k = (30.0 / spacing) as i64;
    for theta in [0.0, 1.0] {
        let row = projection_window(&p, theta, omega, spacing, -k, k).unwrap();
        let total = spacing * row.values().iter().sum::<f64>();
        assert!((total - p.mass()).abs() < 1e-3 * p.mass(), "θ={theta}: {total}");
    }
}

#[test]
fn kernels_match_frequency_quadrature() {
    let omega = 300.0;
    let cosine = |u: f64| (0.5 * PI * u).cos();
    let table: Vec<f64> = (0..=400).map(|i| cosine(-1.0 + i as f64 / 200.0)).collect();
    let tabulated = FilterSpec::new(omega, Window::Tabulated(table)).unwrap();
    let peak = omega * omega / (2.0 * PI);
    for i in 0..60 {
        let t = -0.3 + 0.6 * i as f64 / 59.0 + 1e-4;
        let ram = filter_kernel(&FilterSpec::ram_lak(omega).unwrap(), t);
        let cos = filter_kernel(&FilterSpec::cosine(omega).unwrap(), t);
        let ram_q = common::kernel_by_quadrature(omega, |_| 1.0, t);
        let cos_q = common::kernel_by_quadrature(omega, cosine, t);
        assert!((ram - ram_q).abs() < 1e-6 * peak, "ram-lak t={t}: {ram} vs {ram_q}");
        assert!((cos - cos_q).abs() < 1e-6 * peak, "cosine t={t}: {cos} vs {cos_q}");
        // linear interpolation of a 401-point table costs about h²/8 · (π/2)²
        let tab = filter_kernel(&tabulated, t);
        assert!((tab - cos).abs() < 1e-4 * peak, "tabulated t={t}: {tab} vs {cos}");
    }
}

#[test]
fn kernels_are_even() {
    for spec in [FilterSpec::ram_lak(80.0).unwrap(), FilterSpec::cosine(80.0).unwrap()] {
        for t in [0.001, 0.02, 0.3, 1.7] {
            assert_eq!(filter_kernel(&spec, t), filter_kernel(&spec, -t));
        }
    }
}

#[test]
fn constant_rows_have_no_dc_response() {
    // the ramp kills zero frequency; away from the row ends the discrete
    // convolution leaves only the truncated kernel tail, Ω sin(Ωt)/(πt)
    // plus a mean -1/(πt²), each worth at most about c/(πd) from an end at distance d
    let omega = 50.0;
    let spacing = 1.0 / (2.0 * omega * E);
    let k = 4 * (1.0 / spacing).ceil() as usize;
    let c = 0.7;
    let params = SamplingParams::new(omega, spacing, 1.0, k, k, 2).unwrap();
    let s = constant_sinogram(params, |_| c);
    let edge = (k as f64 + 0.5) * spacing;
    for spec in [FilterSpec::ram_lak(omega).unwrap(), FilterSpec::cosine(omega).unwrap()] {
        let h = filter_projections(&s, &spec).unwrap();
        for (i, v) in h.rows[0].indexed() {
            let t = i as f64 * spacing;
            if t.abs() > 1.0 {
                continue;
            }
            let tail = 2.0 * c / (PI * (edge - t)) + 2.0 * c / (PI * (edge + t));
            assert!((spacing * v).abs() <= 1.1 * tail + 1e-3 * c, "{:?} t={t}: {}", spec.window, spacing * v);
        }
    }
}

#[test]
fn filtering_is_linear() {
    let p = shepp_logan();
    let params = detector_params(40.0, 220, 6);
    let s1 = make_sinogram(&p, &params).unwrap();
    let s2 = constant_sinogram(params, |i| (-((i as f64) / 40.0).powi(2)).exp());
    let alpha = -2.5;
    let mixed = Sinogram::new(
        params,
        s1.rows
            .iter()
            .zip(&s2.rows)
            .map(|(a, b)| SampleSeq::from_fn(a.base(), a.last_index(), |k| alpha * a.get(k).unwrap() + b.get(k).unwrap()).unwrap())
            .collect(),
    )
    .unwrap();
    let spec = FilterSpec::cosine(40.0).unwrap();
    let (h1, h2, hm) = (
        filter_projections(&s1, &spec).unwrap(),
        filter_projections(&s2, &spec).unwrap(),
        filter_projections(&mixed, &spec).unwrap(),
    );
    let scale = hm.rows.iter().map(|r| r.sup_norm()).fold(0.0, f64::max);
    for m in 0..params.angles {
        for (i, v) in hm.rows[m].indexed() {
            let want = alpha * h1.rows[m].get(i).unwrap() + h2.rows[m].get(i).unwrap();
            assert!((v - want).abs() <= 1e-12 * scale, "m={m} i={i}");
        }
    }
}

#[test]
fn equal_rows_back_project_to_a_radial_image() {
    let params = detector_params(30.0, 170, 256);
    let s = constant_sinogram(params, |i| (-((i as f64 * params.spacing) / 0.3).powi(2)).exp());
    let spec = FilterSpec::ram_lak(30.0).unwrap();
    let h = filter_projections(&s, &spec).unwrap();
    let grid = ImageGrid::new(48, 48).unwrap();
    let img = back_project(&h, &params, &grid).unwrap();
    let row = &h.rows[0];
    let lerp = |t: f64| {
        let x = t / params.spacing;
        let i = x.floor() as i64;
        let f = x - i as f64;
        match (row.get(i), row.get(i + 1)) {
            (Some(a), Some(b)) => a * (1.0 - f) + b * f,
            _ => 0.0,
        }
    };
    // reference: the same sum averaged over many rotations of the pixel
    let radial = |r: f64| {
        let rotations = 512;
        let total: f64 = (0..rotations)
            .map(|j| {
                let phi = PI * j as f64 / rotations as f64 / params.angles as f64;
                (0..params.angles).map(|m| lerp(r * (params.angle(m) - phi).cos())).sum::<f64>()
            })
            .sum();
        params.spacing / (2.0 * params.angles as f64) * total / rotations as f64
    };
    let scale = img.max().abs().max(img.min().abs());
    // pixels beyond the detector reach see rows cut off at some angles only
    let reach = params.k as f64 * params.spacing;
    for (row, col) in [(0, 0), (5, 17), (23, 24), (30, 2), (40, 41), (12, 36), (2, 30)] {
        let (x, y) = grid.pixel_center(row, col);
        if x.hypot(y) > reach {
            continue;
        }
        let want = radial(x.hypot(y));
        assert!((img.get(row, col) - want).abs() < 1e-6 * scale, "({row},{col})");
    }
}

#[test]
fn reconstruction_improves_with_bandwidth() {
    let p = shepp_logan();
    let grid = ImageGrid::new(96, 96).unwrap();
    let truth = p.rasterize(&grid);
    let errors: Vec<f64> = [100.0, 200.0, 300.0]
        .iter()
        .map(|&omega: &f64| {
            let spacing = 1.0 / (2.0 * omega * E);
            let k = (1.0 / spacing).ceil() as usize;
            let params = SamplingParams::new(omega, spacing, 1.0, k, k, omega as usize).unwrap();
            let s = make_sinogram(&p, &params).unwrap();
            rmse(&fbp_reconstruct(&s, &FilterSpec::cosine(omega).unwrap(), &grid).unwrap(), &truth).unwrap()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn rmse_basics() {
    let a = ImageGrid::from_pixels(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let zero = ImageGrid::new(2, 2).unwrap();
    let c = ImageGrid::from_pixels(2, 2, vec![0.3; 4]).unwrap();
    assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    assert!((rmse(&zero, &c).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(rmse(&a, &c).unwrap(), rmse(&c, &a).unwrap());
    assert!(rmse(&a, &ImageGrid::new(3, 2).unwrap()).is_err());
}
