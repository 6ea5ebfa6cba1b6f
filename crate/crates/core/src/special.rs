//! Special functions and quadrature rules used by the forward model.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

/// Sine integral `Si(x) = ∫_0^x sin(u)/u du`.
///
/// Power series for `|x| ≤ 2`, otherwise the continued fraction for the
/// complex exponential integral `E1(ix)` evaluated by the modified Lentz
/// method.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    if t == 0.0 {
        return 0.0;
    }
    let si = if t <= 2.0 {
        let t2 = t * t;
        let mut term = t;
        let mut sum = t;
        let mut k = 1;
        loop {
            term *= -t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
            k += 1;
        }
        sum
    } else {
        const TINY: f64 = 1e-300;
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / TINY, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 2..200 {
            let a = -((i - 1) * (i - 1)) as f64;
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(t.cos(), -t.sin());
        FRAC_PI_2 + h.im
    };
    si.copysign(x)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels of
/// `order` nodes each.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}
