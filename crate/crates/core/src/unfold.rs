//! Recovery of unfolded samples from modulo samples.
//!
//! Both recovery routes rest on one observation: under enough oversampling,
//! the `N`-th forward difference of the true samples is smaller than `λ`,
//! so folding it changes nothing, while the fold residual `ε = γ - y` is a
//! sequence on `2λℤ`. Its `N`-th difference can therefore be read off as
//! `M_λ(Δ^N y) - Δ^N y`, then integrated back stage by stage, snapping to
//! the grid after each stage.
//!
//! [`unfold_general`] integrates around index 0 and removes the unknown
//! integration constants by a slope estimate over `J` samples plus a tail
//! limit. [`unfold_compact`] needs neither, because for signals that stay
//! below `λ` beyond some radius the residual vanishes at the left edge.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{ModuloSinogram, SamplingParams, Sinogram};
use crate::ops::{anti_diff, anti_diff_bilateral, forward_diff, guarded_ceil, SampleSeq, Threshold};

/// Absolute tolerance, in units of `λ`, for values that should lie on `2λℤ`.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Minimum number of trailing entries that must agree for the tail limit.
const MIN_PLATEAU: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnfoldMode {
    /// Integration anchored at index 0 with slope and tail corrections.
    General,
    /// Integration anchored at the left edge for compact λ-exceedance.
    CompactExceedance,
}

impl fmt::Display for UnfoldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnfoldMode::General => "general",
            UnfoldMode::CompactExceedance => "compact",
        })
    }
}

impl std::str::FromStr for UnfoldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(UnfoldMode::General),
            "compact" | "compact_exceedance" | "compact-exceedance" => Ok(UnfoldMode::CompactExceedance),
            other => Err(Error::Config(format!("unknown unfold mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldConfig {
    pub threshold: Threshold,
    /// Amplitude bound `β ≥ ‖g‖∞`; must lie on `2λℤ` in general mode.
    pub beta: f64,
    pub omega: f64,
    pub spacing: f64,
    pub mode: UnfoldMode,
    pub order_override: Option<usize>,
    /// λ-exceedance radius, used for the margin check and the quiet-edge
    /// consistency test in compact mode.
    pub rho: Option<f64>,
}

impl UnfoldConfig {
    pub fn new(lambda: f64, beta: f64, omega: f64, spacing: f64, mode: UnfoldMode) -> Result<Self> {
        let threshold = Threshold::new(lambda)?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        if !(omega.is_finite() && omega > 0.0 && spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Config("omega and T must be positive".into()));
        }
        if mode == UnfoldMode::General && threshold.grid_distance(beta) > GRID_TOLERANCE * lambda {
            return Err(Error::Config(format!("beta = {beta} is not a multiple of 2λ = {}", 2.0 * lambda)));
        }
        Ok(UnfoldConfig {
            threshold,
            beta,
            omega,
            spacing,
            mode,
            order_override: None,
            rho: None,
        })
    }

    /// Config for a sinogram whose `β` (and possibly `ρ`) has been measured.
    pub fn from_params(params: &SamplingParams, mode: UnfoldMode) -> Result<Self> {
        let beta = params
            .beta
            .ok_or_else(|| Error::Config("sampling parameters carry no amplitude bound".into()))?;
        let mut cfg = UnfoldConfig::new(params.lambda, beta, params.omega, params.spacing, mode)?;
        cfg.order_override = params.order;
        cfg.rho = params.rho;
        Ok(cfg)
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order_override = Some(order);
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.threshold.lambda()
    }

    /// Slope-estimation span `J = 6β/λ` of the general route.
    pub fn span(&self) -> usize {
        (6.0 * self.beta / self.lambda()).round() as usize
    }
}

/// Rounds a measured amplitude bound up onto `2λℤ`.
pub fn grid_bound(beta: f64, threshold: Threshold) -> f64 {
    let period = threshold.period();
    period * guarded_ceil(beta / period)
}

/// Difference order `N`.
///
/// Uses the override when set. Otherwise `⌈ln(λ/β)/ln(TΩe)⌉`, at least 1 in
/// general mode and 0 in compact mode when `β ≤ λ`.
pub fn select_order(cfg: &UnfoldConfig) -> Result<usize> {
    if let Some(n) = cfg.order_override {
        return Ok(n);
    }
    let lambda = cfg.lambda();
    if cfg.mode == UnfoldMode::CompactExceedance && cfg.beta <= lambda {
        return Ok(0);
    }
    let product = cfg.spacing * cfg.omega * std::f64::consts::E;
    if product >= 1.0 {
        return Err(Error::Condition(format!("T·Ω·e = {product} is not below 1")));
    }
    let n = guarded_ceil((lambda.ln() - cfg.beta.ln()) / product.ln());
    Ok((n.max(1.0)) as usize)
}

/// `K' ≥ max{K, ρ/T + N}` as an integer index bound.
pub fn required_margin(rho: f64, spacing: f64, order: usize, k: usize) -> i64 {
    let reach = guarded_ceil(rho / spacing) as i64;
    (reach + order as i64).max(k as i64)
}

/// Samples per angle needed by the general route: `max{2K+1, J+N}`.
pub fn general_sample_count(k: usize, span: usize, order: usize) -> usize {
    (2 * k + 1).max(span + order)
}

/// Samples per angle needed by the compact route: `K' + K + 1`.
pub fn compact_sample_count(k: usize, k_prime: usize) -> usize {
    k_prime.max(k) + k + 1
}

/// Diagnostics of one unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldReport {
    pub mode: UnfoldMode,
    pub order: usize,
    /// Slope-estimation span, general mode only.
    pub span: Option<usize>,
    /// Largest distance of the recovered residual from `2λℤ` before snapping.
    pub grid_deviation: f64,
    /// Largest recovered magnitude.
    pub peak: f64,
    /// Largest recovered magnitude beyond the exceedance radius, if known.
    pub edge_peak: Option<f64>,
    /// Spread of the trailing plateau used for the tail limit (general mode).
    pub tail_spread: Option<f64>,
    pub success: bool,
}

impl UnfoldReport {
    pub const CSV_HEADER: &'static str = "row,mode,order,span,grid_deviation,peak,edge_peak,tail_spread,success";

    pub fn csv_line(&self, row: usize) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{row},{},{},{},{},{},{},{},{}",
            self.mode,
            self.order,
            self.span.map(|j| j.to_string()).unwrap_or_default(),
            self.grid_deviation,
            self.peak,
            opt(self.edge_peak),
            opt(self.tail_spread),
            self.success
        )
    }
}

/// Recovered samples with their diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolded {
    pub samples: SampleSeq,
    pub report: UnfoldReport,
}

fn check_folded(y: &SampleSeq, thr: Threshold) -> Result<()> {
    let lam = thr.lambda();
    match y.indexed().find(|(_, v)| !(-lam..lam).contains(v)) {
        Some((k, v)) => Err(Error::Domain(format!("sample {v} at k = {k} is outside [-λ, λ)"))),
        None => Ok(()),
    }
}

/// `M_λ(Δ^N y) - Δ^N y`, the `N`-th difference of the fold residual.
fn residual_difference(y: &SampleSeq, order: usize, thr: Threshold) -> Result<SampleSeq> {
    let d = forward_diff(y, order)?;
    Ok(d.map(|v| thr.fold(v) - v))
}

fn snap(seq: &SampleSeq, thr: Threshold) -> SampleSeq {
    seq.map(|v| thr.period() * thr.grid_index(v))
}

fn grid_deviation(seq: &SampleSeq, thr: Threshold) -> f64 {
    seq.values().iter().map(|&v| thr.grid_distance(v)).fold(0.0, f64::max)
}

/// Adds the residual `ε` to `y` after snapping it onto `2λℤ`, so that a
/// correctly recovered sample equals the unfolded value bit for bit.
fn apply_residual(y: &SampleSeq, eps: &SampleSeq, thr: Threshold) -> Result<SampleSeq> {
    let snapped = snap(eps, thr);
    let values = y
        .indexed()
        .map(|(k, v)| {
            snapped
                .get(k)
                .map(|e| v + e)
                .ok_or_else(|| Error::Size(format!("residual does not cover k = {k}")))
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSeq::new(y.base(), values)
}

/// Unfolding with slope and tail corrections.
///
/// `y` must cover index 0 and reach index `J + N - 1`; the slope estimate
/// compares the integrated residual at absolute indices 1 and `J + 1`.
pub fn unfold_general(y: &SampleSeq, cfg: &UnfoldConfig) -> Result<Unfolded> {
    let thr = cfg.threshold;
    if cfg.mode != UnfoldMode::General {
        return Err(Error::Config("unfold_general needs a general-mode config".into()));
    }
    if thr.grid_distance(cfg.beta) > GRID_TOLERANCE * thr.lambda() {
        return Err(Error::Config(format!("beta = {} is not on the 2λ grid", cfg.beta)));
    }
    check_folded(y, thr)?;
    let order = select_order(cfg)?.max(1);
    let span = cfg.span();
    if !y.contains(0) {
        return Err(Error::Size("general unfolding needs index 0".into()));
    }
    let need = (span + order) as i64 - 1;
    if y.last_index() < need {
        return Err(Error::Size(format!(
            "samples end at k = {}, slope span needs k = {need}",
            y.last_index()
        )));
    }
    let mut stage = residual_difference(y, order, thr)?;
    for _ in 0..order.saturating_sub(1) {
        let mut next = snap(&anti_diff_bilateral(&stage)?, thr);
        let integrated = anti_diff_bilateral(&next)?;
        let (a, b) = (integrated.get(1), integrated.get(span as i64 + 1));
        let (a, b) = a
            .zip(b)
            .ok_or_else(|| Error::Size(format!("slope span J = {span} exceeds the data")))?;
        let kappa = ((a - b) / (12.0 * cfg.beta) + 0.5).floor();
        let shift = thr.period() * kappa;
        next.values_mut().iter_mut().for_each(|v| *v += shift);
        stage = next;
    }
    let eps = anti_diff_bilateral(&stage)?;
    let plateau = MIN_PLATEAU.max(order).min(eps.len());
    let tail = &eps.values()[eps.len() - plateau..];
    let limit = tail[tail.len() - 1];
    let spread = tail.iter().map(|v| (v - limit).abs()).fold(0.0, f64::max);
    let eps = eps.map(|v| v - limit);
    let deviation = grid_deviation(&eps, thr);
    let samples = apply_residual(y, &eps, thr)?;
    let peak = samples.sup_norm();
    let tol = GRID_TOLERANCE * thr.lambda();
    let success = deviation < tol && spread < tol && peak <= cfg.beta * (1.0 + 1e-12);
    Ok(Unfolded {
        samples,
        report: UnfoldReport {
            mode: UnfoldMode::General,
            order,
            span: Some(span),
            grid_deviation: deviation,
            peak,
            edge_peak: None,
            tail_spread: Some(spread),
            success,
        },
    })
}

/// Unfolding for signals of compact λ-exceedance.
///
/// `y` covers `-K'..=K`; the result covers `-K..=K`. When `cfg.rho` is set,
/// `K'` must reach [`required_margin`].
pub fn unfold_compact(y: &SampleSeq, cfg: &UnfoldConfig, k: usize) -> Result<Unfolded> {
    let thr = cfg.threshold;
    check_folded(y, thr)?;
    let k_prime = -y.base();
    if y.last_index() != k as i64 || k_prime < k as i64 {
        return Err(Error::Size(format!(
            "samples cover {}..={}, expected -K'..={k} with K' ≥ {k}",
            y.base(),
            y.last_index()
        )));
    }
    let order = select_order(cfg)?;
    if let Some(rho) = cfg.rho {
        let need = required_margin(rho, cfg.spacing, order, k);
        if k_prime < need {
            return Err(Error::Margin { have: k_prime, need });
        }
    }
    let (samples, deviation) = if order == 0 {
        (y.clone(), 0.0)
    } else {
        if y.len() <= order {
            return Err(Error::Size(format!("{} samples for order {order}", y.len())));
        }
        let mut stage = residual_difference(y, order, thr)?;
        for _ in 0..order - 1 {
            stage = snap(&anti_diff(&stage), thr);
        }
        let eps = anti_diff(&stage);
        (apply_residual(y, &eps, thr)?, grid_deviation(&eps, thr))
    };
    let samples = samples.restrict(-(k as i64), k as i64)?;
    let peak = samples.sup_norm();
    let edge_peak = cfg.rho.and_then(|rho| {
        samples
            .indexed()
            .filter(|(i, _)| (*i as f64 * cfg.spacing).abs() > rho)
            .map(|(_, v)| v.abs())
            .reduce(f64::max)
    });
    let lam = thr.lambda();
    let success = deviation < GRID_TOLERANCE * lam
        && peak <= cfg.beta * (1.0 + 1e-12)
        && edge_peak.is_none_or(|e| e < lam);
    Ok(Unfolded {
        samples,
        report: UnfoldReport {
            mode: UnfoldMode::CompactExceedance,
            order,
            span: None,
            grid_deviation: deviation,
            peak,
            edge_peak,
            tail_spread: None,
            success,
        },
    })
}

/// Unfolds every row. Compact mode returns rows over `-K..=K`.
pub fn unfold_sinogram(ms: &ModuloSinogram, cfg: &UnfoldConfig) -> Result<(Sinogram, Vec<UnfoldReport>)> {
    let k = ms.params.k;
    let unfolded = ms
        .rows
        .par_iter()
        .map(|row| match cfg.mode {
            UnfoldMode::General => unfold_general(row, cfg),
            UnfoldMode::CompactExceedance => unfold_compact(row, cfg, k),
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, reports): (Vec<_>, Vec<_>) = unfolded.into_iter().map(|u| (u.samples, u.report)).unzip();
    let mut params = ms.params;
    if cfg.mode == UnfoldMode::CompactExceedance {
        params.k_prime = k;
    }
    params.order = Some(reports.first().map_or(0, |r| r.order));
    Ok((Sinogram::new(params, rows)?, reports))
}
