//! Discrete filtered back projection in parallel-beam geometry.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::{SamplingParams, Sinogram};
use crate::ops::SampleSeq;
use crate::phantom::ImageGrid;
use crate::special::composite_gauss;
use rayon::prelude::*;

/// Frequency window `W` of a ramp-type reconstruction filter `|ω| W(ω/Ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// `W = 1` on `[-1, 1]`.
    RamLak,
    /// `W(u) = cos(πu/2)` on `[-1, 1]`.
    Cosine,
    /// Equispaced samples of `W` on `[-1, 1]`, linearly interpolated.
    Tabulated(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub omega: f64,
    pub window: Window,
}

impl FilterSpec {
    pub fn new(omega: f64, window: Window) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Config(format!("filter bandwidth must be positive, got {omega}")));
        }
        if let Window::Tabulated(w) = &window {
            if w.len() < 3 || w.len() % 2 == 0 {
                return Err(Error::Config("window table needs an odd count of at least 3 samples".into()));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("window table has non-finite entries".into()));
            }
            let n = w.len();
            if (0..n / 2).any(|i| (w[i] - w[n - 1 - i]).abs() > 1e-12 * w[i].abs().max(1.0)) {
                return Err(Error::Config("window table is not even".into()));
            }
        }
        Ok(FilterSpec { omega, window })
    }

    pub fn ram_lak(omega: f64) -> Result<Self> {
        Self::new(omega, Window::RamLak)
    }

    pub fn cosine(omega: f64) -> Result<Self> {
        Self::new(omega, Window::Cosine)
    }

    /// Window value at `u = ω/Ω`.
    pub fn window_at(&self, u: f64) -> f64 {
        let u = u.abs();
        if u > 1.0 {
            return 0.0;
        }
        match &self.window {
            Window::RamLak => 1.0,
            Window::Cosine => (0.5 * PI * u).cos(),
            Window::Tabulated(w) => {
                // table index of u on [-1, 1]
                let half = (w.len() / 2) as f64;
                let x = half + u * half;
                let i = (x.floor() as usize).min(w.len() - 2);
                let frac = x - i as f64;
                w[i] * (1.0 - frac) + w[i + 1] * frac
            }
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∫_0^Ω ω cos(ωu) dω = Ω² (sinc(Ωu) - sinc²(Ωu/2)/2)`.
fn ramp_moment(omega: f64, u: f64) -> f64 {
    let x = omega * u;
    let h = sinc(0.5 * x);
    omega * omega * (sinc(x) - 0.5 * h * h)
}

/// Space-domain filter `F_Ω(t) = (1/π) ∫_0^Ω ω W(ω/Ω) cos(ωt) dω`.
pub fn filter_kernel(spec: &FilterSpec, t: f64) -> f64 {
    let omega = spec.omega;
    match &spec.window {
        Window::RamLak => ramp_moment(omega, t) / PI,
        Window::Cosine => {
            let shift = PI / (2.0 * omega);
            (ramp_moment(omega, t + shift) + ramp_moment(omega, t - shift)) / (2.0 * PI)
        }
        Window::Tabulated(w) => {
            // one Gauss panel group per table interval, refined for oscillation
            let intervals = w.len() / 2;
            let per = ((omega * t.abs() / intervals as f64 / 6.0).ceil() as usize).max(1);
            let (nodes, weights) = composite_gauss(0.0, omega, intervals * per, 8);
            nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &wt)| wt * x * spec.window_at(x / omega) * (x * t).cos())
                .sum::<f64>()
                / PI
        }
    }
}

/// Filtered projections `h_m(t_i)`, `i = -K..=K`, one row per angle.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredProjections {
    pub spacing: f64,
    pub angles: Vec<f64>,
    pub rows: Vec<SampleSeq>,
}

/// Discrete convolution `h(t_i) = Σ_{k=-K}^{K} F_Ω(t_i - t_k) p(t_k)`.
///
/// The spacing factor is left to [`back_project`].
pub fn filter_projections(s: &Sinogram, spec: &FilterSpec) -> Result<FilteredProjections> {
    let k = s.params.k as i64;
    let spacing = s.params.spacing;
    let n = (2 * k + 1) as usize;
    // kernel[j] = F((j - 2K) T), j = 0..=4K
    let half: Vec<f64> = (0..=2 * k).map(|d| filter_kernel(spec, d as f64 * spacing)).collect();
    let kernel: Vec<f64> = (-2 * k..=2 * k).map(|d| half[d.unsigned_abs() as usize]).collect();
    let rows = s
        .rows
        .par_iter()
        .map(|row| {
            if !(row.contains(-k) && row.contains(k)) {
                return Err(Error::Size(format!(
                    "row over {}..={} does not cover -{k}..={k}",
                    row.base(),
                    row.last_index()
                )));
            }
            let p = &row.values()[(-k - row.base()) as usize..][..n];
            let h: Vec<f64> = (0..n)
                .map(|i| {
                    // F((i - k') T) over k' = 0..n, kernel is even
                    let start = 2 * k as usize - i;
                    dot(&kernel[start..start + n], p)
                })
                .collect();
            SampleSeq::new(-k, h)
        })
        .collect::<Result<Vec<_>>>()?;
    let angles = (0..s.rows.len()).map(|m| s.params.angle(m)).collect();
    Ok(FilteredProjections { spacing, angles, rows })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Piecewise-linear interpolation on `t_i = iT`, zero off the grid.
fn interpolate(row: &SampleSeq, spacing: f64, t: f64) -> f64 {
    let x = t / spacing;
    let lo = x.floor();
    let i = lo as i64;
    let frac = x - lo;
    match (row.get(i), row.get(i + 1)) {
        (Some(a), Some(b)) => a + (b - a) * frac,
        (Some(a), None) if frac == 0.0 => a,
        _ => 0.0,
    }
}

/// `f(x) = T/(2M) Σ_m I_1 h_m(x cos θ_m + y sin θ_m)` at every pixel center.
pub fn back_project(h: &FilteredProjections, params: &SamplingParams, grid: &ImageGrid) -> Result<ImageGrid> {
    if grid.width() == 0 || grid.height() == 0 {
        return Err(Error::Domain("empty image grid".into()));
    }
    if h.rows.len() != params.angles {
        return Err(Error::DimensionMismatch(format!(
            "{} filtered rows for M = {}",
            h.rows.len(),
            params.angles
        )));
    }
    let directions: Vec<(f64, f64)> = h.angles.iter().map(|a| (a.cos(), a.sin())).collect();
    let scale = params.spacing / (2.0 * params.angles as f64);
    let mut out = ImageGrid::new(grid.width(), grid.height())?;
    // pixels are independent; each sums over the angles in a fixed order
    out.pixels_mut()
        .par_chunks_mut(grid.width())
        .enumerate()
        .for_each(|(row, line)| {
            for (col, px) in line.iter_mut().enumerate() {
                let (x, y) = grid.pixel_center(row, col);
                let mut acc = 0.0;
                for (r, &(c, s)) in h.rows.iter().zip(&directions) {
                    acc += interpolate(r, h.spacing, x * c + y * s);
                }
                *px = scale * acc;
            }
        });
    Ok(out)
}

/// Filtering followed by back projection onto the pixels of `grid`.
pub fn fbp_reconstruct(s: &Sinogram, spec: &FilterSpec, grid: &ImageGrid) -> Result<ImageGrid> {
    let h = filter_projections(s, spec)?;
    back_project(&h, &s.params, grid)
}

pub fn rmse(a: &ImageGrid, b: &ImageGrid) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sum: f64 = a.pixels().iter().zip(b.pixels()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sum / a.pixels().len() as f64).sqrt())
}
