//! Independent reference computations shared by the integration tests and
//! the acceptance harness. None of these call the library's own formulas.

#![allow(dead_code)]

use std::f64::consts::PI;

use modulo_radon::phantom::Ellipse;
use rand::Rng;

/// Membership test written from scratch (not `Ellipse::contains`).
fn inside(e: &Ellipse, x: f64, y: f64) -> bool {
    let (dx, dy) = (x - e.center.0, y - e.center.1);
    let (s, c) = e.rotation.sin_cos();
    let u = (c * dx + s * dy) / e.semi_axes.0;
    let v = (c * dy - s * dx) / e.semi_axes.1;
    u * u + v * v <= 1.0
}

/// Composite trapezoid of the ellipse indicator along `⟨x, θ⟩ = t`, over
/// `s ∈ [-1.5, 1.5]` with the given step. A panel whose ends disagree on
/// membership is split at the crossing, located by bisection, so each
/// piece integrates a constant.
pub fn line_integral(e: &Ellipse, theta: f64, t: f64, step: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let at = |u: f64| inside(e, t * c - u * s, t * s + u * c);
    let n = (3.0 / step).round() as usize;
    let h = 3.0 / n as f64;
    let mut total = 0.0;
    let mut prev = at(-1.5);
    for i in 1..=n {
        let (a, b) = (-1.5 + (i - 1) as f64 * h, -1.5 + i as f64 * h);
        let cur = at(b);
        total += if prev == cur {
            if cur { h } else { 0.0 }
        } else {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if at(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let cut = 0.5 * (lo + hi);
            if prev { cut - a } else { b - cut }
        };
        prev = cur;
    }
    e.intensity * total
}

/// `(1/π) ∫_0^Ω ω W(ω/Ω) cos(ωt) dω` by the trapezoid rule with `2^16` panels.
pub fn kernel_by_quadrature(omega: f64, window: impl Fn(f64) -> f64, t: f64) -> f64 {
    let n = 1usize << 16;
    let h = omega / n as f64;
    let f = |w: f64| w * window(w / omega) * (w * t).cos();
    let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
    h * (inner + 0.5 * (f(0.0) + f(omega))) / PI
}

/// A random ellipse that stays inside the unit disk.
pub fn random_ellipse(rng: &mut impl Rng) -> Ellipse {
    loop {
        let r = rng.gen_range(0.0..0.6);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let a = rng.gen_range(0.05..0.4);
        let b = rng.gen_range(0.05..0.4);
        let rot = rng.gen_range(0.0..PI);
        let mu = rng.gen_range(-1.0..1.0);
        if let Ok(e) = Ellipse::new((r * phi.cos(), r * phi.sin()), (a, b), rot, mu) {
            return e;
        }
    }
}
