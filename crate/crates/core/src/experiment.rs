//! End-to-end runs: phantom to folded sinogram to unfolded sinogram to
//! image, the success-rate sweep over sampling spacing and difference
//! order, and the downsampling demonstration.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbp::{fbp_reconstruct, rmse, FilterSpec};
use crate::forward::{
    exceedance_radius, fold_sinogram, compression_factor, ExceedanceProbe, ExceedanceSignal, ModuloSinogram,
    SamplingParams, Sinogram,
};
use crate::ops::{SampleSeq, Threshold};
use crate::phantom::{walnut_standin, ImageGrid, Phantom};
use crate::special::sine_integral;
use crate::unfold::{
    general_sample_count, grid_bound, required_margin, select_order, unfold_compact, unfold_sinogram, UnfoldConfig,
    UnfoldMode, UnfoldReport,
};

/// Safety factor applied to a measured amplitude before it is used as a bound.
pub const BETA_INFLATION: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    RamLak,
    Cosine,
}

impl FilterKind {
    pub fn spec(self, omega: f64) -> Result<FilterSpec> {
        match self {
            FilterKind::RamLak => FilterSpec::ram_lak(omega),
            FilterKind::Cosine => FilterSpec::cosine(omega),
        }
    }
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ram-lak" | "ram_lak" | "ramlak" => Ok(FilterKind::RamLak),
            "cosine" => Ok(FilterKind::Cosine),
            other => Err(Error::Config(format!("unknown filter {other:?}"))),
        }
    }
}

/// Parameters of a phantom reconstruction run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub omega: f64,
    pub spacing: f64,
    pub k: usize,
    pub angles: usize,
    pub lambda: f64,
    /// Left extension; `None` derives it from the measured `ρ` and `N`.
    pub k_prime: Option<usize>,
    pub filter: FilterKind,
    pub grid: usize,
    /// Scale the phantom so that the sinogram has unit sup norm.
    pub normalize: bool,
}

impl PipelineConfig {
    /// `Ω = 300`, `T = 1/(2Ωe)`, `K = ⌈1/T⌉`, `M = Ω`, cosine filter, 256² grid.
    pub fn shepp_logan(lambda: f64) -> Self {
        let omega = 300.0;
        let spacing = 1.0 / (2.0 * omega * E);
        PipelineConfig {
            omega,
            spacing,
            k: (1.0 / spacing).ceil() as usize,
            angles: 300,
            lambda,
            k_prime: None,
            filter: FilterKind::Cosine,
            grid: 256,
            normalize: false,
        }
    }

    /// Parallel-beam walnut geometry: `M = 600`, `K = 1128`, `T = 1/1128`,
    /// `Ω = 300`, unit-normalized data.
    pub fn walnut(lambda: f64) -> Self {
        PipelineConfig {
            omega: 300.0,
            spacing: 1.0 / 1128.0,
            k: 1128,
            angles: 600,
            lambda,
            k_prime: None,
            filter: FilterKind::Cosine,
            grid: 256,
            normalize: true,
        }
    }
}

/// Summary of one pipeline run; one CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineMetrics {
    pub lambda: f64,
    /// Largest sampled magnitude.
    pub peak: f64,
    /// Bound used for unfolding (`peak` inflated).
    pub beta: f64,
    pub rho: f64,
    pub order: usize,
    pub k: usize,
    pub k_prime: usize,
    /// `K' - K`, samples beyond the symmetric window.
    pub extra_samples: usize,
    /// Slope span `J` the general route would need.
    pub general_span: usize,
    pub general_order: usize,
    /// `max{2K+1, J+N} - (2K+1)`.
    pub general_extra_samples: usize,
    pub compression: f64,
    /// Largest `|unfolded - clean|` over the central window.
    pub unfold_error: f64,
    pub rows_flagged: usize,
    pub rmse_fbp: Option<f64>,
    pub rmse_usfbp: Option<f64>,
    /// Largest pixel difference between the two reconstructions.
    pub parity_delta: f64,
}

impl PipelineMetrics {
    pub const CSV_HEADER: &'static str = "lambda,peak,beta,rho,order,K,K_prime,extra_samples,general_J,general_N,general_extra_samples,compression,unfold_error,rows_flagged,rmse_fbp,rmse_usfbp,parity_delta";

    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.lambda,
            self.peak,
            self.beta,
            self.rho,
            self.order,
            self.k,
            self.k_prime,
            self.extra_samples,
            self.general_span,
            self.general_order,
            self.general_extra_samples,
            self.compression,
            self.unfold_error,
            self.rows_flagged,
            opt(self.rmse_fbp),
            opt(self.rmse_usfbp),
            self.parity_delta
        )
    }

    /// Every row unfolded without a flag and both images agree exactly.
    pub fn invariants_hold(&self) -> bool {
        self.rows_flagged == 0 && self.unfold_error == 0.0 && self.parity_delta == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Clean samples over `-K'..=K`.
    pub sinogram: Sinogram,
    pub modulo: ModuloSinogram,
    /// Recovered samples over `-K..=K`.
    pub unfolded: Sinogram,
    pub reports: Vec<UnfoldReport>,
    pub fbp: ImageGrid,
    pub usfbp: ImageGrid,
    pub truth: Option<ImageGrid>,
    pub metrics: PipelineMetrics,
}

/// Cost of the general route for the same data: `(J, N, extra samples)`.
pub fn general_route_cost(beta: f64, lambda: f64, omega: f64, spacing: f64, k: usize) -> Result<(usize, usize, usize)> {
    let thr = Threshold::new(lambda)?;
    let cfg = UnfoldConfig::new(lambda, grid_bound(beta, thr), omega, spacing, UnfoldMode::General)?;
    let order = select_order(&cfg)?;
    let span = cfg.span();
    Ok((span, order, general_sample_count(k, span, order) - (2 * k + 1)))
}

/// Simulates, folds, unfolds and reconstructs an analytic phantom.
pub fn run_pipeline(phantom: &Phantom, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let phantom = if cfg.normalize {
        let central = ExceedanceProbe::run(phantom, cfg.omega, cfg.spacing, cfg.angles, cfg.k, f64::INFINITY, 0)?;
        let peak = central.peak();
        if peak == 0.0 {
            return Err(Error::Domain("cannot normalize an all-zero sinogram".into()));
        }
        phantom.scaled(1.0 / peak)
    } else {
        phantom.clone()
    };
    let probe = ExceedanceProbe::run(&phantom, cfg.omega, cfg.spacing, cfg.angles, cfg.k, cfg.lambda, cfg.k / 2)?;
    let peak = probe.peak();
    let beta = BETA_INFLATION * peak;
    let rho = probe.rho();
    let mut params = SamplingParams::new(cfg.omega, cfg.spacing, cfg.lambda, cfg.k, cfg.k, cfg.angles)?;
    params.beta = Some(beta);
    params.rho = Some(rho);
    let order = select_order(&UnfoldConfig::from_params(&params, UnfoldMode::CompactExceedance)?)?;
    params.k_prime = cfg
        .k_prime
        .unwrap_or_else(|| required_margin(rho, cfg.spacing, order, cfg.k) as usize);
    let sinogram = probe.sinogram(&phantom, &params)?;
    let grid = ImageGrid::new(cfg.grid, cfg.grid)?;
    let truth = phantom.rasterize(&grid);
    finish(sinogram, cfg.filter, &grid, Some(truth), order)
}

/// Same as [`run_pipeline`] for measured data: `ρ` and `β` come from the
/// given rows, which cannot be extended, so `K'` is what the data holds.
pub fn run_pipeline_on_sinogram(
    sinogram: &Sinogram,
    filter: FilterKind,
    grid_size: usize,
    truth: Option<ImageGrid>,
) -> Result<PipelineOutput> {
    let mut s = sinogram.clone();
    let lambda = s.params.lambda;
    let peak = s.sup_norm();
    s.params.beta = Some(BETA_INFLATION * peak);
    s.params.rho = Some(s.exceedance_index(lambda).unwrap_or(0) as f64 * s.params.spacing);
    let order = select_order(&UnfoldConfig::from_params(&s.params, UnfoldMode::CompactExceedance)?)?;
    let grid = ImageGrid::new(grid_size, grid_size)?;
    finish(s, filter, &grid, truth, order)
}

fn finish(
    sinogram: Sinogram,
    filter: FilterKind,
    grid: &ImageGrid,
    truth: Option<ImageGrid>,
    order: usize,
) -> Result<PipelineOutput> {
    let params = sinogram.params;
    let (omega, lambda) = (params.omega, params.lambda);
    let beta = params.beta.expect("pipeline sets beta");
    let rho = params.rho.expect("pipeline sets rho");
    let modulo = fold_sinogram(&sinogram)?;
    let ucfg = UnfoldConfig::from_params(&params, UnfoldMode::CompactExceedance)?.with_order(order);
    let (unfolded, reports) = unfold_sinogram(&modulo, &ucfg)?;
    let clean = sinogram.central()?;
    let unfold_error = clean
        .rows
        .iter()
        .zip(&unfolded.rows)
        .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let spec = filter.spec(omega)?;
    let fbp = fbp_reconstruct(&clean, &spec, grid)?;
    let usfbp = fbp_reconstruct(&unfolded, &spec, grid)?;
    let parity_delta = fbp
        .pixels()
        .iter()
        .zip(usfbp.pixels())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (rmse_fbp, rmse_usfbp) = match &truth {
        Some(t) => (Some(rmse(&fbp, t)?), Some(rmse(&usfbp, t)?)),
        None => (None, None),
    };
    let (general_span, general_order, general_extra_samples) =
        general_route_cost(beta, lambda, omega, params.spacing, params.k)?;
    let metrics = PipelineMetrics {
        lambda,
        peak: sinogram.sup_norm(),
        beta,
        rho,
        order,
        k: params.k,
        k_prime: params.k_prime,
        extra_samples: params.k_prime - params.k,
        general_span,
        general_order,
        general_extra_samples,
        compression: compression_factor(&sinogram, lambda),
        unfold_error,
        rows_flagged: reports.iter().filter(|r| !r.success).count(),
        rmse_fbp,
        rmse_usfbp,
        parity_delta,
    };
    Ok(PipelineOutput {
        sinogram,
        modulo,
        unfolded,
        reports,
        fbp,
        usfbp,
        truth,
        metrics,
    })
}

/// Walnut-shaped stand-in run in the measured-data geometry.
pub fn walnut_pipeline(lambda: f64) -> Result<PipelineOutput> {
    run_pipeline(&walnut_standin(), &PipelineConfig::walnut(lambda))
}

/// Spacing bound `1/(Ωe)` of the recovery guarantee.
pub fn unlimited_sampling_spacing(omega: f64) -> f64 {
    1.0 / (omega * E)
}

/// Nyquist spacing `π/Ω`.
pub fn shannon_spacing(omega: f64) -> f64 {
    PI / omega
}

/// `⌈ln λ / ln ½⌉`: the order that suffices at half the guaranteed spacing
/// for unit-amplitude signals.
pub fn base_order(lambda: f64) -> usize {
    (lambda.ln() / 0.5f64.ln()).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub trials: usize,
    pub t_steps: usize,
    /// Orders are `j · base_order(λ)` for each `j` here.
    pub order_multiples: Vec<usize>,
    pub seed: u64,
    /// Absolute error below which a trial counts as recovered.
    pub tolerance: f64,
}

impl SweepConfig {
    /// 1000 trials, three bandwidths, 100 spacing steps.
    pub fn full() -> Self {
        SweepConfig {
            lambdas: vec![0.1, 0.05],
            omegas: vec![10.0 * PI, 20.0 * PI, 30.0 * PI],
            trials: 1000,
            t_steps: 100,
            order_multiples: vec![1, 2, 3],
            seed: 2024,
            tolerance: 1e-6,
        }
    }

    /// 100 trials at `Ω = 10π` with 25 spacing steps.
    pub fn ci() -> Self {
        SweepConfig {
            omegas: vec![10.0 * PI],
            trials: 100,
            t_steps: 25,
            ..Self::full()
        }
    }
}

/// Success rates for one `(λ, Ω)` cell; `rates[i][j]` is order `orders[i]`
/// at spacing `spacings[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessGrid {
    pub lambda: f64,
    pub omega: f64,
    pub spacings: Vec<f64>,
    pub orders: Vec<usize>,
    pub rates: Vec<Vec<f64>>,
    pub trials: usize,
}

impl SuccessGrid {
    pub fn shannon_ratio(&self, j: usize) -> f64 {
        self.spacings[j] / shannon_spacing(self.omega)
    }

    /// Three-point moving average along the spacing axis.
    pub fn smoothed(&self, order_index: usize) -> Vec<f64> {
        let r = &self.rates[order_index];
        (0..r.len())
            .map(|j| {
                let lo = j.saturating_sub(1);
                let hi = (j + 1).min(r.len() - 1);
                r[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
            })
            .collect()
    }

    /// Whether every smoothed curve is non-increasing up to `slack`.
    pub fn smoothed_monotone(&self, slack: f64) -> bool {
        (0..self.orders.len()).all(|i| self.smoothed(i).windows(2).all(|w| w[1] <= w[0] + slack))
    }

    /// Whether each higher-order curve is at least the lower-order one at every spacing.
    pub fn higher_orders_dominate(&self) -> bool {
        self.rates.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(hi, lo)| hi >= lo))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("T_over_T_shannon,T,order,success_rate,smoothed_rate\n");
        for (i, &n) in self.orders.iter().enumerate() {
            let smooth = self.smoothed(i);
            for (j, &t) in self.spacings.iter().enumerate() {
                writeln!(out, "{},{},{},{},{}", self.shannon_ratio(j), t, n, self.rates[i][j], smooth[j]).unwrap();
            }
        }
        out
    }

    pub fn file_name(&self) -> String {
        format!("success_lambda{}_omega{:.0}pi.csv", self.lambda, self.omega / PI)
    }
}

/// Outcome of one trial: recovered to tolerance, and whether the report flagged it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub recovered: bool,
    pub max_error: f64,
    pub flagged: bool,
}

/// Samples `signal` at `spacing`, folds, unfolds at `order` over the
/// window `-K..=K` with `K = ⌈max(1, ρ)/T⌉` and `K'` from [`required_margin`],
/// and compares with the true samples.
pub fn run_trial(signal: &ExceedanceSignal, spacing: f64, order: usize, tolerance: f64) -> Result<TrialOutcome> {
    let k = (signal.rho.max(1.0) / spacing).ceil() as usize;
    let k_prime = required_margin(signal.rho, spacing, order, k);
    let truth = signal.sample(spacing, -k_prime, k as i64)?;
    trial_on_samples(signal, &truth, spacing, order, k, tolerance)
}

fn trial_on_samples(
    signal: &ExceedanceSignal,
    truth: &SampleSeq,
    spacing: f64,
    order: usize,
    k: usize,
    tolerance: f64,
) -> Result<TrialOutcome> {
    let thr = Threshold::new(signal.lambda)?;
    let folded = truth.map(|v| thr.fold(v));
    let cfg = UnfoldConfig::new(
        signal.lambda,
        BETA_INFLATION * signal.sup_norm.max(signal.lambda),
        signal.omega,
        spacing,
        UnfoldMode::CompactExceedance,
    )?
    .with_order(order)
    .with_rho(signal.rho);
    let u = unfold_compact(&folded, &cfg, k)?;
    let max_error = u
        .samples
        .indexed()
        .map(|(i, v)| (v - truth.get(i).unwrap()).abs())
        .fold(0.0, f64::max);
    Ok(TrialOutcome {
        recovered: max_error < tolerance,
        max_error,
        flagged: !u.report.success,
    })
}

/// Success rates over `T ∈ [T_US, T_Shannon]` for each configured order.
pub fn success_grid(lambda: f64, omega: f64, cfg: &SweepConfig) -> Result<SuccessGrid> {
    let signals = (0..cfg.trials as u64)
        .map(|trial| ExceedanceSignal::random_stream(omega, lambda, cfg.seed, trial))
        .collect::<Result<Vec<_>>>()?;
    let base = base_order(lambda);
    let orders: Vec<usize> = cfg.order_multiples.iter().map(|j| j * base).collect();
    let max_order = orders.iter().copied().max().unwrap_or(1);
    let (t_lo, t_hi) = (unlimited_sampling_spacing(omega), shannon_spacing(omega));
    let steps = cfg.t_steps.max(2);
    let spacings: Vec<f64> = (0..steps)
        .map(|j| t_lo + (t_hi - t_lo) * j as f64 / (steps - 1) as f64)
        .collect();
    let mut rates = vec![vec![0.0; steps]; orders.len()];
    for (j, &spacing) in spacings.iter().enumerate() {
        let outcomes = signals
            .par_iter()
            .map(|signal| {
                let k = (signal.rho.max(1.0) / spacing).ceil() as usize;
                let widest = required_margin(signal.rho, spacing, max_order, k);
                let samples = signal.sample(spacing, -widest, k as i64)?;
                orders
                    .iter()
                    .map(|&order| {
                        let kp = required_margin(signal.rho, spacing, order, k);
                        let truth = samples.restrict(-kp, k as i64)?;
                        Ok(trial_on_samples(signal, &truth, spacing, order, k, cfg.tolerance)?.recovered)
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for hits in outcomes {
            for (i, hit) in hits.into_iter().enumerate() {
                if hit {
                    rates[i][j] += 1.0;
                }
            }
        }
    }
    for r in rates.iter_mut().flatten() {
        *r /= cfg.trials as f64;
    }
    Ok(SuccessGrid {
        lambda,
        omega,
        spacings,
        orders,
        rates,
        trials: cfg.trials,
    })
}

/// All `(λ, Ω)` cells of the sweep, in configuration order.
pub fn success_sweep(cfg: &SweepConfig) -> Result<Vec<SuccessGrid>> {
    // cells run on the rayon pool; collecting keeps configuration order
    let cells: Vec<(f64, f64)> = cfg
        .lambdas
        .iter()
        .flat_map(|&lambda| cfg.omegas.iter().map(move |&omega| (lambda, omega)))
        .collect();
    cells
        .into_par_iter()
        .map(|(lambda, omega)| success_grid(lambda, omega, cfg))
        .collect()
}

/// A pulse with a sharp rising edge and a gentle falling edge: steps at
/// `rise` and `fall` low-pass filtered to bandwidths `fast` and `slow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricPulse {
    pub amplitude: f64,
    pub rise: f64,
    pub fall: f64,
    pub fast: f64,
    pub slow: f64,
}

impl Default for AsymmetricPulse {
    fn default() -> Self {
        AsymmetricPulse {
            amplitude: 1.0,
            rise: -0.5,
            fall: 0.5,
            fast: 40.0,
            slow: 5.0,
        }
    }
}

impl AsymmetricPulse {
    pub fn eval(&self, t: f64) -> f64 {
        let step = |w: f64, at: f64| 0.5 + sine_integral(w * (t - at)) / PI;
        self.amplitude * (step(self.fast, self.rise) - step(self.slow, self.fall))
    }

    /// Radius beyond which `|g| < λ`.
    pub fn rho(&self, lambda: f64) -> f64 {
        // |1/2 + Si(x)/π - 1{x>0}| ≤ 1/(π|x|)
        let reach = self.rise.abs().max(self.fall.abs()) + 4.0 * self.amplitude / (PI * self.slow * lambda);
        exceedance_radius(|t| self.eval(t), lambda, reach, PI / (16.0 * self.fast))
    }
}

/// One row of the downsampling table.
#[derive(Debug, Clone, PartialEq)]
pub struct DownsampleRow {
    pub factor: usize,
    pub spacing: f64,
    pub order: usize,
    pub flagged: bool,
    pub max_error: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownsampleDemo {
    pub lambda: f64,
    pub rho: f64,
    pub beta: f64,
    pub rows: Vec<DownsampleRow>,
}

impl DownsampleDemo {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("factor,T,order,flagged,max_error,mse\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.factor, r.spacing, r.order, r.flagged, r.max_error, r.mse).unwrap();
        }
        out
    }

    pub fn row(&self, factor: usize, order: usize) -> Option<&DownsampleRow> {
        self.rows.iter().find(|r| r.factor == factor && r.order == order)
    }
}

/// Folds `truth`, keeps every `factor`-th sample (indices divisible by the
/// factor, renumbered), and unfolds with each order.
///
/// `ρ` defaults to the last index where `|truth| ≥ λ`.
pub fn downsample_demo(
    truth: &SampleSeq,
    spacing: f64,
    lambda: f64,
    rho: Option<f64>,
    factors: &[usize],
    orders: &[usize],
) -> Result<DownsampleDemo> {
    let thr = Threshold::new(lambda)?;
    let rho = rho.unwrap_or_else(|| {
        truth
            .indexed()
            .filter(|(_, v)| v.abs() >= lambda)
            .map(|(k, _)| k.abs())
            .max()
            .unwrap_or(0) as f64
            * spacing
    });
    let beta = BETA_INFLATION * truth.sup_norm().max(lambda);
    let mut rows = Vec::new();
    for &factor in factors {
        if factor == 0 {
            return Err(Error::Config("downsampling factor must be positive".into()));
        }
        let f = factor as i64;
        let lo = truth.base().div_euclid(f) + i64::from(truth.base().rem_euclid(f) != 0);
        let hi = truth.last_index().div_euclid(f);
        let kept = SampleSeq::from_fn(lo, hi, |i| truth.get(i * f).unwrap())?;
        let coarse = spacing * factor as f64;
        let k = hi.min(-lo);
        if k < 0 {
            return Err(Error::Size("samples must straddle index 0".into()));
        }
        let window = kept.restrict(lo, k)?;
        let k = k as usize;
        let folded = window.map(|v| thr.fold(v));
        for &order in orders {
            let cfg = UnfoldConfig::new(lambda, beta, 1.0, coarse, UnfoldMode::CompactExceedance)?
                .with_order(order)
                .with_rho(rho);
            let u = unfold_compact(&folded, &cfg, k)?;
            let errs: Vec<f64> = u.samples.indexed().map(|(i, v)| v - window.get(i).unwrap()).collect();
            let max_error = errs.iter().map(|e| e.abs()).fold(0.0, f64::max);
            let mse = errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64;
            rows.push(DownsampleRow {
                factor,
                spacing: coarse,
                order,
                flagged: !u.report.success,
                max_error,
                mse,
            });
        }
    }
    Ok(DownsampleDemo { lambda, rho, beta, rows })
}

/// The synthetic case: an [`AsymmetricPulse`] on `[-3, 3]` at spacing
/// `0.006`, `λ = 0.1`, original rate and ×2 downsampling, orders 1 and 2.
pub fn synthetic_downsample_demo() -> Result<DownsampleDemo> {
    let pulse = AsymmetricPulse::default();
    let lambda = 0.1;
    let spacing = 0.006;
    let truth = SampleSeq::from_fn(-500, 500, |k| pulse.eval(k as f64 * spacing))?;
    downsample_demo(&truth, spacing, lambda, Some(pulse.rho(lambda)), &[1, 2], &[1, 2])
}
