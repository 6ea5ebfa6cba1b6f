//! Semi-discrete forward model: band-limit each Radon projection with the
//! ideal low-pass filter, sample it on `t_k = kT`, and fold it modulo `2λ`.
//!
//! The low-pass filtered projection is evaluated in the Fourier domain,
//! where each ellipse contributes `2π a b μ J1(sω)/(sω) e^{-iωc}`:
//!
//! `p_θ(t) = (1/π) Re ∫_0^Ω F_θ(ω) e^{iωt} dω`,
//!
//! integrated with a composite Gauss-Legendre rule. Samples are produced in
//! aligned blocks so that the value at index `k` does not depend on the
//! extent of the requested window.

use std::collections::HashMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ops::{SampleSeq, Threshold};
use crate::phantom::Phantom;
use crate::special::{composite_gauss, sine_integral};

const BLOCK: i64 = 256;
const GAUSS_ORDER: usize = 16;
/// Largest phase change of the integrand across one quadrature panel.
const PANEL_PHASE: f64 = 12.0;

/// Every sampling-theory parameter of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingParams {
    /// Bandwidth `Ω`.
    pub omega: f64,
    /// Radial spacing `T`.
    pub spacing: f64,
    pub lambda: f64,
    /// Right index bound: samples run over `-K'..=K`.
    pub k: usize,
    /// Left index bound `K'`.
    pub k_prime: usize,
    /// Number of angles `M`; `θ_m = mπ/M`.
    pub angles: usize,
    /// Uniform amplitude bound `β`, once measured.
    pub beta: Option<f64>,
    /// λ-exceedance radius `ρ`, once measured.
    pub rho: Option<f64>,
    /// Difference order `N`, once chosen.
    pub order: Option<usize>,
}

impl SamplingParams {
    pub fn new(omega: f64, spacing: f64, lambda: f64, k: usize, k_prime: usize, angles: usize) -> Result<Self> {
        let p = SamplingParams {
            omega,
            spacing,
            lambda,
            k,
            k_prime,
            angles,
            beta: None,
            rho: None,
            order: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("T", self.spacing), ("lambda", self.lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.k == 0 || self.angles == 0 {
            return Err(Error::Config("K and M must be positive".into()));
        }
        Ok(())
    }

    /// `TΩe`; exact recovery guarantees need this below one.
    pub fn oversampling_product(&self) -> f64 {
        self.spacing * self.omega * E
    }

    pub fn threshold(&self) -> Result<Threshold> {
        Threshold::new(self.lambda)
    }

    pub fn angle(&self, m: usize) -> f64 {
        m as f64 * PI / self.angles as f64
    }

    /// Samples per angle, `K' + K + 1`.
    pub fn row_len(&self) -> usize {
        self.k_prime + self.k + 1
    }

    /// Checks the conditions of the finite-data recovery theorem and of
    /// the standard FBP sampling rule: `TΩe < 1`, `K ≥ 1/T`, `M ≥ Ω` and,
    /// when `ρ` and `N` are known, `K' ≥ max{K, ρ/T + N}`.
    pub fn check_guarantees(&self) -> Result<()> {
        if self.oversampling_product() >= 1.0 {
            return Err(Error::Condition(format!(
                "T·Ω·e = {} is not below 1",
                self.oversampling_product()
            )));
        }
        if (self.k as f64) < 1.0 / self.spacing - 1e-9 {
            return Err(Error::Condition(format!("K = {} is below 1/T", self.k)));
        }
        if (self.angles as f64) < self.omega - 1e-9 {
            return Err(Error::Condition(format!("M = {} is below Ω", self.angles)));
        }
        if let (Some(rho), Some(n)) = (self.rho, self.order) {
            let need = crate::unfold::required_margin(rho, self.spacing, n, self.k);
            if (self.k_prime as i64) < need {
                return Err(Error::Margin {
                    have: self.k_prime as i64,
                    need,
                });
            }
        }
        Ok(())
    }
}

/// Radon projections sampled on `-K'..=K` for each of the `M` angles.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub params: SamplingParams,
    pub rows: Vec<SampleSeq>,
}

impl Sinogram {
    pub fn new(params: SamplingParams, rows: Vec<SampleSeq>) -> Result<Self> {
        if rows.len() != params.angles {
            return Err(Error::Size(format!("{} rows for M = {}", rows.len(), params.angles)));
        }
        for r in &rows {
            if r.base() != -(params.k_prime as i64) || r.len() != params.row_len() {
                return Err(Error::Size(format!(
                    "row over {}..={} does not match -{}..={}",
                    r.base(),
                    r.last_index(),
                    params.k_prime,
                    params.k
                )));
            }
        }
        Ok(Sinogram { params, rows })
    }

    pub fn sup_norm(&self) -> f64 {
        self.rows.iter().map(SampleSeq::sup_norm).fold(0.0, f64::max)
    }

    /// Largest `|k|` at which some row reaches `|p| ≥ λ`, if any.
    pub fn exceedance_index(&self, lambda: f64) -> Option<i64> {
        self.rows
            .iter()
            .flat_map(|r| r.indexed())
            .filter(|(_, v)| v.abs() >= lambda)
            .map(|(k, _)| k.abs())
            .max()
    }

    /// Rows restricted to `-K..=K`.
    pub fn central(&self) -> Result<Sinogram> {
        let k = self.params.k as i64;
        let rows = self
            .rows
            .iter()
            .map(|r| r.restrict(-k, k))
            .collect::<Result<Vec<_>>>()?;
        let mut params = self.params;
        params.k_prime = self.params.k;
        Ok(Sinogram { params, rows })
    }

    /// Divides all samples by the sup norm so that `‖p‖∞ = 1`.
    pub fn normalized(&self) -> Sinogram {
        let s = self.sup_norm();
        if s == 0.0 {
            return self.clone();
        }
        Sinogram {
            params: self.params,
            rows: self.rows.iter().map(|r| r.map(|v| v / s)).collect(),
        }
    }
}

/// Folded projections `p^λ_θ(t_k) = M_λ(p_θ(t_k)) ∈ [-λ, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuloSinogram {
    pub params: SamplingParams,
    pub rows: Vec<SampleSeq>,
}

impl ModuloSinogram {
    /// Wraps already-folded rows, checking shapes and the `[-λ, λ)` range.
    pub fn new(params: SamplingParams, rows: Vec<SampleSeq>) -> Result<Self> {
        let s = Sinogram::new(params, rows)?;
        let lam = params.lambda;
        for r in &s.rows {
            if let Some((k, v)) = r.indexed().find(|(_, v)| !(-lam..lam).contains(v)) {
                return Err(Error::Domain(format!("modulo sample {v} at k = {k} outside [-λ, λ)")));
            }
        }
        Ok(ModuloSinogram {
            params,
            rows: s.rows,
        })
    }
}

/// Composite Gauss-Legendre nodes on `[0, Ω]` for a given panel count,
/// with the phantom spectrum pre-multiplied into the weights.
struct SpectralRule {
    omega: Vec<f64>,
    coef_re: Vec<f64>,
    coef_im: Vec<f64>,
}

impl SpectralRule {
    fn new(phantom: &Phantom, theta: f64, bandwidth: f64, panels: usize) -> Self {
        let (nodes, weights) = composite_gauss(0.0, bandwidth, panels, GAUSS_ORDER);
        let mut coef_re = Vec::with_capacity(nodes.len());
        let mut coef_im = Vec::with_capacity(nodes.len());
        for (&w, &wt) in nodes.iter().zip(&weights) {
            let f = phantom.projection_spectrum(theta, w) * (wt / PI);
            coef_re.push(f.re);
            coef_im.push(f.im);
        }
        SpectralRule {
            omega: nodes,
            coef_re,
            coef_im,
        }
    }
}

/// Evaluates `p_θ(kT)` for `k` in `lo..=hi`.
struct ProjectionEvaluator<'a> {
    phantom: &'a Phantom,
    theta: f64,
    bandwidth: f64,
    spacing: f64,
    reach: f64,
    rules: HashMap<usize, SpectralRule>,
}

impl<'a> ProjectionEvaluator<'a> {
    fn new(phantom: &'a Phantom, theta: f64, bandwidth: f64, spacing: f64) -> Self {
        // Bound on |c| + s over all ellipses (both at most one in the unit disk).
        let reach = phantom
            .ellipses
            .iter()
            .map(|e| e.center.0.hypot(e.center.1) + e.semi_axes.0.max(e.semi_axes.1))
            .fold(0.0, f64::max);
        ProjectionEvaluator {
            phantom,
            theta,
            bandwidth,
            spacing,
            reach,
            rules: HashMap::new(),
        }
    }

    fn panels_for_block(&self, block: i64) -> usize {
        let kmax = (block.abs().max((block + 1).abs()) * BLOCK) as f64;
        let phase = self.bandwidth * (kmax * self.spacing + self.reach);
        let panels = ((phase / PANEL_PHASE).ceil() as usize).max(4);
        panels.div_ceil(16) * 16
    }

    fn samples(&mut self, lo: i64, hi: i64) -> Vec<f64> {
        let mut out = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        if self.phantom.ellipses.is_empty() {
            out.resize((hi - lo + 1).max(0) as usize, 0.0);
            return out;
        }
        let mut block = lo.div_euclid(BLOCK);
        while block * BLOCK <= hi {
            let start = block * BLOCK;
            let end = start + BLOCK - 1;
            let panels = self.panels_for_block(block);
            let (phantom, theta, bw) = (self.phantom, self.theta, self.bandwidth);
            let rule = self
                .rules
                .entry(panels)
                .or_insert_with(|| SpectralRule::new(phantom, theta, bw, panels));
            eval_block(rule, self.spacing, start, lo.max(start), hi.min(end), &mut out);
            block += 1;
        }
        out
    }
}

/// Sums the rule at `k = from..=to`, advancing the phase from the block anchor.
fn eval_block(rule: &SpectralRule, spacing: f64, anchor: i64, from: i64, to: i64, out: &mut Vec<f64>) {
    const LANES: usize = 8;
    let n = rule.omega.len();
    debug_assert_eq!(n % LANES, 0);
    let mut z_re = Vec::with_capacity(n);
    let mut z_im = Vec::with_capacity(n);
    let mut r_re = Vec::with_capacity(n);
    let mut r_im = Vec::with_capacity(n);
    let t0 = anchor as f64 * spacing;
    for &w in &rule.omega {
        let (s, c) = (w * t0).sin_cos();
        z_re.push(c);
        z_im.push(s);
        let (s, c) = (w * spacing).sin_cos();
        r_re.push(c);
        r_im.push(s);
    }
    for k in anchor..=to {
        let mut acc = [0.0; LANES];
        let chunks = z_re
            .chunks_exact_mut(LANES)
            .zip(z_im.chunks_exact_mut(LANES))
            .zip(r_re.chunks_exact(LANES).zip(r_im.chunks_exact(LANES)))
            .zip(rule.coef_re.chunks_exact(LANES).zip(rule.coef_im.chunks_exact(LANES)));
        for (((zr, zi), (rr, ri)), (cr, ci)) in chunks {
            for l in 0..LANES {
                acc[l] += cr[l] * zr[l] - ci[l] * zi[l];
                let re = zr[l] * rr[l] - zi[l] * ri[l];
                let im = zr[l] * ri[l] + zi[l] * rr[l];
                zr[l] = re;
                zi[l] = im;
            }
        }
        if k >= from {
            out.push(acc.iter().sum());
        }
    }
}

/// Low-pass filtered projection `p_θ = R_θ f ∗ Φ_Ω` sampled on `-K'..=K`.
pub fn prefilter_projection(phantom: &Phantom, theta: f64, params: &SamplingParams) -> Result<SampleSeq> {
    params.validate()?;
    let lo = -(params.k_prime as i64);
    let hi = params.k as i64;
    projection_window(phantom, theta, params.omega, params.spacing, lo, hi)
}

/// Low-pass filtered projection sampled on an arbitrary window `lo..=hi`.
pub fn projection_window(
    phantom: &Phantom,
    theta: f64,
    omega: f64,
    spacing: f64,
    lo: i64,
    hi: i64,
) -> Result<SampleSeq> {
    if hi < lo {
        return Err(Error::Size(format!("empty window {lo}..={hi}")));
    }
    let mut ev = ProjectionEvaluator::new(phantom, theta, omega, spacing);
    let v = ev.samples(lo, hi);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite projection sample".into()));
    }
    SampleSeq::new(lo, v)
}

/// Sinogram of low-pass filtered projections at `θ_m = mπ/M`.
pub fn make_sinogram(phantom: &Phantom, params: &SamplingParams) -> Result<Sinogram> {
    let rows = (0..params.angles)
        .into_par_iter()
        .map(|m| prefilter_projection(phantom, params.angle(m), params))
        .collect::<Result<Vec<_>>>()?;
    Sinogram::new(*params, rows)
}

/// Elementwise `M_λ` of every sample.
pub fn fold_sinogram(s: &Sinogram) -> Result<ModuloSinogram> {
    let thr = s.params.threshold()?;
    let rows = s
        .rows
        .iter()
        .map(|r| {
            if r.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("cannot fold non-finite sample".into()));
            }
            Ok(r.map(|v| thr.fold(v)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuloSinogram {
        params: s.params,
        rows,
    })
}

/// Ratio of the sinogram's dynamic range to the detector range `2λ`.
pub fn compression_factor(s: &Sinogram, lambda: f64) -> f64 {
    let (lo, hi) = s
        .rows
        .iter()
        .flat_map(|r| r.values().iter().copied())
        .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi - lo) / (2.0 * lambda)
}

/// Symmetric windows of filtered projections, grown until every row is
/// below `λ` over a trailing band at both ends.
#[derive(Debug, Clone)]
pub struct ExceedanceProbe {
    pub omega: f64,
    pub spacing: f64,
    pub lambda: f64,
    /// Rows over `-half_width..=half_width`.
    pub rows: Vec<SampleSeq>,
    pub half_width: i64,
}

impl ExceedanceProbe {
    /// Samples `M` projections on `-K..=K` and extends them outward in
    /// blocks until the outer `quiet` samples of every row satisfy `|p| < λ`.
    pub fn run(
        phantom: &Phantom,
        omega: f64,
        spacing: f64,
        angles: usize,
        k: usize,
        lambda: f64,
        quiet: usize,
    ) -> Result<Self> {
        const MAX_HALF_WIDTH: i64 = 1 << 22;
        let mut half = k as i64;
        let mut rows = (0..angles)
            .into_par_iter()
            .map(|m| projection_window(phantom, m as f64 * PI / angles as f64, omega, spacing, -half, half))
            .collect::<Result<Vec<_>>>()?;
        let step = (quiet as i64).max(BLOCK);
        loop {
            let mut outer = 0usize;
            for r in &rows {
                let last_hit = r
                    .indexed()
                    .filter(|(_, v)| v.abs() >= lambda)
                    .map(|(k, _)| k.abs())
                    .max()
                    .unwrap_or(0);
                outer = outer.max((half - last_hit) as usize);
                if (half - last_hit) < quiet as i64 {
                    outer = 0;
                    break;
                }
            }
            if outer >= quiet {
                break;
            }
            if half > MAX_HALF_WIDTH {
                return Err(Error::Numeric(format!(
                    "projections still exceed λ = {lambda} at |k| = {half}"
                )));
            }
            let new_half = half + step;
            rows.par_iter_mut().enumerate().try_for_each(|(m, r)| -> Result<()> {
                let theta = m as f64 * PI / angles as f64;
                let left = projection_window(phantom, theta, omega, spacing, -new_half, -half - 1)?;
                let right = projection_window(phantom, theta, omega, spacing, half + 1, new_half)?;
                let mut v = left.into_values();
                v.extend_from_slice(r.values());
                v.extend_from_slice(right.values());
                *r = SampleSeq::new(-new_half, v)?;
                Ok(())
            })?;
            half = new_half;
        }
        Ok(ExceedanceProbe {
            omega,
            spacing,
            lambda,
            rows,
            half_width: half,
        })
    }

    /// Largest `|k|` with `|p(t_k)| ≥ λ` over all rows (zero if none).
    pub fn exceedance_index(&self) -> i64 {
        self.exceedance_index_for(self.lambda)
    }

    /// Same as [`Self::exceedance_index`] for a larger threshold, whose
    /// quiet band is then also covered by the probe.
    pub fn exceedance_index_for(&self, lambda: f64) -> i64 {
        self.rows
            .iter()
            .flat_map(|r| r.indexed())
            .filter(|(_, v)| v.abs() >= lambda)
            .map(|(k, _)| k.abs())
            .max()
            .unwrap_or(0)
    }

    /// `ρ = T · exceedance_index`.
    pub fn rho(&self) -> f64 {
        self.exceedance_index() as f64 * self.spacing
    }

    /// Largest sampled `|p|`.
    pub fn peak(&self) -> f64 {
        self.rows.iter().map(SampleSeq::sup_norm).fold(0.0, f64::max)
    }

    /// Sinogram over `-K'..=K`, sampling further out if the probe is too narrow.
    pub fn sinogram(&self, phantom: &Phantom, params: &SamplingParams) -> Result<Sinogram> {
        let lo = -(params.k_prime as i64);
        let hi = params.k as i64;
        let rows = self
            .rows
            .par_iter()
            .enumerate()
            .map(|(m, r)| {
                if r.contains(lo) && r.contains(hi) {
                    r.restrict(lo, hi)
                } else {
                    projection_window(phantom, params.angle(m), params.omega, params.spacing, lo, hi)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Sinogram::new(*params, rows)
    }
}

/// Band-limited test signal `g = h ∗ Φ_Ω` where `h` is piecewise constant
/// on `[-1, 1]` with uniformly drawn breakpoints and levels in `[-1, 1]`.
///
/// In closed form `g(t) = Σ_j J_j (1/2 + Si(Ω(t - x_j))/π)` with jumps `J_j`
/// of `h` at the points `x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceSignal {
    pub omega: f64,
    pub lambda: f64,
    /// Jump locations, ascending, including the support edges `±1`.
    pub breakpoints: Vec<f64>,
    /// Piece values between consecutive breakpoints.
    pub levels: Vec<f64>,
    /// Radius beyond which `|g| < λ`.
    pub rho: f64,
    /// Sup norm estimated on a grid at 32× the Nyquist rate.
    pub sup_norm: f64,
}

/// Number of interior breakpoints of the random piecewise-constant input.
pub const RANDOM_BREAKPOINTS: usize = 20;

impl ExceedanceSignal {
    /// Builds the filtered signal for the given pieces and measures `ρ` and `‖g‖∞`.
    pub fn from_pieces(omega: f64, lambda: f64, breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if !(omega > 0.0 && lambda > 0.0) {
            return Err(Error::Domain("omega and lambda must be positive".into()));
        }
        if breakpoints.len() != levels.len() + 1 || breakpoints.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("breakpoints must be ascending with one more entry than levels".into()));
        }
        let mut sig = ExceedanceSignal {
            omega,
            lambda,
            breakpoints,
            levels,
            rho: 0.0,
            sup_norm: 0.0,
        };
        sig.sup_norm = sig.scan_sup();
        sig.rho = sig.scan_rho();
        Ok(sig)
    }

    pub fn random(omega: f64, lambda: f64, seed: u64) -> Result<Self> {
        Self::random_stream(omega, lambda, seed, 0)
    }

    /// Deterministic in `(seed, stream)`; independent streams for sweep trials.
    pub fn random_stream(omega: f64, lambda: f64, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut inner: Vec<f64> = (0..RANDOM_BREAKPOINTS).map(|_| rng.gen_range(-1.0..1.0)).collect();
        inner.sort_by(f64::total_cmp);
        let mut breakpoints = Vec::with_capacity(RANDOM_BREAKPOINTS + 2);
        breakpoints.push(-1.0);
        breakpoints.extend(inner);
        breakpoints.push(1.0);
        let levels = (0..=RANDOM_BREAKPOINTS).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::from_pieces(omega, lambda, breakpoints, levels)
    }

    fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.levels.len();
        self.breakpoints.iter().enumerate().map(move |(j, &x)| {
            let before = if j == 0 { 0.0 } else { self.levels[j - 1] };
            let after = if j == n { 0.0 } else { self.levels[j] };
            (x, after - before)
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = self.omega;
        self.jumps()
            .map(|(x, jump)| jump * (0.5 + sine_integral(w * (t - x)) / PI))
            .sum()
    }

    /// Samples `g(kT)` for `k` in `lo..=hi`.
    pub fn sample(&self, spacing: f64, lo: i64, hi: i64) -> Result<SampleSeq> {
        SampleSeq::from_fn(lo, hi, |k| self.eval(k as f64 * spacing))
    }

    /// Total variation of the piecewise-constant input.
    fn total_variation(&self) -> f64 {
        self.jumps().map(|(_, j)| j.abs()).sum()
    }

    fn scan_sup(&self) -> f64 {
        let step = PI / (32.0 * self.omega);
        let lo = self.breakpoints[0] - 0.5;
        let n = ((self.breakpoints[self.breakpoints.len() - 1] + 0.5 - lo) / step).ceil() as usize;
        (0..=n).map(|i| self.eval(lo + i as f64 * step).abs()).fold(0.0, f64::max)
    }

    /// Scans inward from a radius where the tail bound
    /// `TV/π · (1/(Ωd) + 1/(Ωd)²) < λ/2` guarantees `|g| < λ`.
    fn scan_rho(&self) -> f64 {
        let tv = self.total_variation();
        if tv == 0.0 {
            return 0.0;
        }
        let c = PI * self.lambda / (2.0 * tv);
        let u = 0.5 * ((1.0 + 4.0 * c).sqrt() - 1.0);
        let d = 1.0 / (self.omega * u);
        let reach = self.breakpoints[0].abs().max(self.breakpoints[self.breakpoints.len() - 1].abs()) + d;
        exceedance_radius(|t| self.eval(t), self.lambda, reach, PI / (8.0 * self.omega))
    }
}

/// Radius `ρ` with `|g(t)| < λ` for `|t| > ρ`, found by scanning inward
/// from `±reach` (where `g` must already be below `λ`) in steps of `step`.
///
/// The first point reaching `0.9λ` from either side, pushed out by one
/// step, gives the radius; the 10% band covers peaks between scan points
/// when `step` is a fraction of the oscillation period.
pub fn exceedance_radius(g: impl Fn(f64) -> f64, lambda: f64, reach: f64, step: f64) -> f64 {
    let level = 0.9 * lambda;
    let mut rho: f64 = 0.0;
    for side in [1.0, -1.0] {
        let mut t = reach;
        while t > 0.0 {
            if g(side * t).abs() >= level {
                rho = rho.max(t + step);
                break;
            }
            t -= step;
        }
    }
    rho
}

/// Seeded random band-limited signal of compact λ-exceedance.
pub fn random_lambda_exceedance(omega: f64, lambda: f64, seed: u64) -> Result<ExceedanceSignal> {
    ExceedanceSignal::random(omega, lambda, seed)
}

/// Spatial-domain reference for a single projection: trapezoidal
/// quadrature of `∫ R_θ f(s) sin(Ω(t-s))/(π(t-s)) ds` over the support,
/// splitting at chord endpoints and substituting `s = c + σ sin φ` inside
/// each ellipse so the square-root edges become smooth.
pub fn prefilter_reference(phantom: &Phantom, theta: f64, omega: f64, t: f64, nodes: usize) -> f64 {
    let kernel = |u: f64| {
        if u.abs() < 1e-12 {
            omega / PI
        } else {
            (omega * u).sin() / (PI * u)
        }
    };
    phantom
        .ellipses
        .iter()
        .map(|e| {
            // chord half-width and center of this ellipse's projection
            let (a, b) = e.semi_axes;
            let g = theta - e.rotation;
            let s = ((a * g.cos()).powi(2) + (b * g.sin()).powi(2)).sqrt();
            let c = e.center.0 * theta.cos() + e.center.1 * theta.sin();
            let h = PI / nodes as f64;
            let mut sum = 0.0;
            for i in 0..=nodes {
                let phi = -PI / 2.0 + i as f64 * h;
                let w = if i == 0 || i == nodes { 0.5 } else { 1.0 };
                let x = c + s * phi.sin();
                // R(x) ds = μ 2ab/s² · s cos φ · s cos φ dφ
                let integrand = e.intensity * 2.0 * a * b * phi.cos().powi(2) * kernel(t - x);
                sum += w * integrand;
            }
            sum * h
        })
        .sum()
}

/// Fourier transform of a sampled sequence evaluated at `omega`.
pub fn dtft(seq: &SampleSeq, spacing: f64, omega: f64) -> Complex64 {
    seq.indexed()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -omega * k as f64 * spacing))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{shepp_logan, Ellipse};

    fn disk() -> Phantom {
        Phantom::new(vec![Ellipse::new((0.0, 0.0), (1.0, 1.0), 0.0, 1.0).unwrap()]).unwrap()
    }

    fn params(omega: f64, t: f64, k: usize, kp: usize, m: usize) -> SamplingParams {
        SamplingParams::new(omega, t, 0.1, k, kp, m).unwrap()
    }

    #[test]
    fn zero_phantom_gives_zero_rows() {
        let p = params(50.0, 0.005, 200, 250, 4);
        let s = make_sinogram(&Phantom::empty(), &p).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert!(s.rows.iter().all(|r| r.len() == 451 && r.values().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn disk_center_value_close_to_chord() {
        let omega = 300.0;
        let t = 1.0 / (2.0 * omega * E);
        let p = params(omega, t, 10, 10, 1);
        let row = prefilter_projection(&disk(), 0.0, &p).unwrap();
        assert!((row.get(0).unwrap() - 2.0).abs() < 0.05);
    }

    #[test]
    fn spectral_route_matches_spatial_reference() {
        let phantom = shepp_logan();
        let omega = 120.0;
        let spacing = 1.0 / (2.0 * omega * E);
        for (theta, ks) in [(0.0, [-700i64, -150, 0, 37, 400]), (1.1, [-90, -3, 12, 260, 900])] {
            let row = projection_window(&phantom, theta, omega, spacing, -1000, 1000).unwrap();
            for k in ks {
                let t = k as f64 * spacing;
                let reference = prefilter_reference(&phantom, theta, omega, t, 40_000);
                let got = row.get(k).unwrap();
                assert!((got - reference).abs() < 1e-8, "θ={theta} k={k}: {got} vs {reference}");
            }
        }
    }

    #[test]
    fn values_do_not_depend_on_window() {
        let phantom = shepp_logan();
        let a = projection_window(&phantom, 0.4, 200.0, 1e-3, -900, 900).unwrap();
        let b = projection_window(&phantom, 0.4, 200.0, 1e-3, -37, 555).unwrap();
        for (k, v) in b.indexed() {
            assert_eq!(a.get(k).unwrap(), v);
        }
    }

    #[test]
    fn rows_are_band_limited() {
        let phantom = shepp_logan();
        let omega = 100.0;
        let spacing = 1.0 / (2.0 * omega * E);
        let row = projection_window(&phantom, 0.3, omega, spacing, -1200, 1200).unwrap();
        let nyquist = PI / spacing;
        let bins = 2000;
        let (mut low, mut high) = (0.0, 0.0);
        for i in 0..bins {
            let w = nyquist * (i as f64 + 0.5) / bins as f64;
            let e = dtft(&row, spacing, w).norm_sqr();
            if w <= omega {
                low += e;
            } else {
                high += e;
            }
        }
        assert!(high <= 1e-4 * (low + high), "high-band fraction {}", high / (low + high));
    }

    #[test]
    fn sinogram_evenness() {
        // θ_m + π appears as row m of a 2M sinogram over a symmetric window.
        let phantom = shepp_logan();
        let p = params(80.0, 0.004, 300, 300, 8);
        let s = make_sinogram(&phantom, &p).unwrap();
        for m in 0..4 {
            let flipped = prefilter_projection(&phantom, p.angle(m) + PI, &p).unwrap();
            for k in -300..=300 {
                let a = s.rows[m].get(k).unwrap();
                let b = flipped.get(-k).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fold_is_identity_below_threshold_and_bounded_otherwise() {
        let p = params(60.0, 0.005, 250, 250, 3);
        let mut s = make_sinogram(&shepp_logan(), &p).unwrap();
        s.params.lambda = s.sup_norm() * 1.01;
        let f = fold_sinogram(&s).unwrap();
        assert_eq!(f.rows, s.rows);
        s.params.lambda = 0.01;
        let f = fold_sinogram(&s).unwrap();
        assert!(ModuloSinogram::new(f.params, f.rows.clone()).is_ok());
        assert!(f.rows.iter().all(|r| r.values().iter().all(|v| (-0.01..0.01).contains(v))));
    }

    #[test]
    fn exceedance_signal_is_deterministic() {
        let a = random_lambda_exceedance(10.0 * PI, 0.1, 7).unwrap();
        let b = random_lambda_exceedance(10.0 * PI, 0.1, 7).unwrap();
        assert_eq!(a, b);
        let c = random_lambda_exceedance(10.0 * PI, 0.1, 8).unwrap();
        assert_ne!(a.levels, c.levels);
        assert_eq!(a.breakpoints.len(), RANDOM_BREAKPOINTS + 2);
    }

    #[test]
    fn exceedance_signal_quiet_outside_rho() {
        for seed in 0..20 {
            let g = random_lambda_exceedance(20.0 * PI, 0.05, seed).unwrap();
            let step = PI / (64.0 * g.omega);
            for side in [-1.0, 1.0] {
                let mut t = g.rho + 1e-12;
                while t < g.rho + 4.0 {
                    assert!(g.eval(side * t).abs() < g.lambda, "seed {seed} t {}", side * t);
                    t += step;
                }
            }
        }
    }

    #[test]
    fn exceedance_signal_matches_convolution() {
        // direct quadrature of h ∗ Φ_Ω at a few points
        let g = random_lambda_exceedance(10.0 * PI, 0.1, 3).unwrap();
        for t in [-1.3, -0.2, 0.05, 0.8, 2.5] {
            let mut q = 0.0;
            for (i, lv) in g.levels.iter().enumerate() {
                let (a, b) = (g.breakpoints[i], g.breakpoints[i + 1]);
                let n = 4000;
                let h = (b - a) / n as f64;
                for j in 0..=n {
                    let s = a + j as f64 * h;
                    let u = t - s;
                    let k = if u.abs() < 1e-12 { g.omega / PI } else { (g.omega * u).sin() / (PI * u) };
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    q += lv * w * h * k;
                }
            }
            assert!((q - g.eval(t)).abs() < 1e-6, "t={t}");
        }
    }
}
