use std::collections::HashSet;
use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modulo_radon::experiment::{
    self, run_pipeline, run_pipeline_on_sinogram, FilterKind, PipelineConfig, PipelineMetrics, PipelineOutput,
    SweepConfig,
};
use modulo_radon::fbp::fbp_reconstruct;
use modulo_radon::forward::{fold_sinogram, ExceedanceProbe, SamplingParams};
use modulo_radon::io::{self, MatrixGeometry, SinogramFormat};
use modulo_radon::phantom::{shepp_logan, walnut_standin, ImageGrid, Phantom};
use modulo_radon::unfold::{required_margin, select_order, unfold_sinogram, UnfoldConfig, UnfoldMode, UnfoldReport};
use modulo_radon::{Error, Result};

/// Modulo Radon transform simulation and reconstruction.
///
/// Any flag may also be given as `key=value` in the file passed to
/// `--config` (key is the long flag name); flags on the command line win.
#[derive(Debug, Parser)]
#[command(name = "mrt", version)]
struct Cli {
    /// Plain-text `key=value` defaults for the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rasterize a phantom and optionally export its ellipse table.
    Phantom(PhantomArgs),
    /// Sample low-pass filtered projections of a phantom.
    Forward(ForwardArgs),
    /// Fold a sinogram modulo 2λ.
    Fold(FoldArgs),
    /// Recover a sinogram from modulo samples.
    Unfold(UnfoldArgs),
    /// Filtered back projection of a sinogram.
    Fbp(FbpArgs),
    /// Forward, fold, unfold and reconstruct; writes all intermediates.
    Pipeline(PipelineArgs),
    /// Import an external sinogram.
    Ingest(IngestArgs),
    /// Success rate of unfolding over spacing and difference order.
    SweepSuccess(SweepArgs),
    /// Unfolding of a folded 1-D signal after downsampling.
    DownsampleDemo(DemoArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct PhantomSource {
    /// `shepp-logan`, `walnut`, or a table file (`cx cy a b rot_deg intensity`).
    #[arg(long, default_value = "shepp-logan")]
    phantom: String,
}

impl PhantomSource {
    fn load(&self) -> Result<Phantom> {
        match self.phantom.as_str() {
            "shepp-logan" => Ok(shepp_logan()),
            "walnut" => Ok(walnut_standin()),
            path => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.into(),
                    source: e,
                })?;
                Phantom::from_table(&text)
            }
        }
    }
}

#[derive(Debug, Args)]
struct Geometry {
    #[arg(long, default_value_t = 300.0)]
    omega: f64,
    /// Radial spacing; defaults to `t-fraction / (Ωe)`.
    #[arg(long)]
    spacing: Option<f64>,
    /// Spacing as a fraction of `1/(Ωe)`.
    #[arg(long, default_value_t = 0.5)]
    t_fraction: f64,
    /// Radial bound; defaults to `⌈1/T⌉`.
    #[arg(long)]
    k: Option<usize>,
    /// Angles; defaults to `⌈Ω⌉`.
    #[arg(long)]
    angles: Option<usize>,
}

impl Geometry {
    fn spacing(&self) -> f64 {
        self.spacing.unwrap_or(self.t_fraction / (self.omega * E))
    }

    fn k(&self) -> usize {
        self.k.unwrap_or((1.0 / self.spacing()).ceil() as usize)
    }

    fn angles(&self) -> usize {
        self.angles.unwrap_or(self.omega.ceil() as usize)
    }
}

fn parse_k_prime(s: &str) -> Result<Option<usize>> {
    match s {
        "auto" => Ok(None),
        n => n
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("K' must be an integer or 'auto', got {n:?}"))),
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct PhantomArgs {
    #[command(flatten)]
    source: PhantomSource,
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Image output (`.pgm`, or raw `.f64` with a `.hdr` sidecar).
    #[arg(long)]
    out: PathBuf,
    /// Also write the ellipse table here.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ForwardArgs {
    #[command(flatten)]
    source: PhantomSource,
    #[command(flatten)]
    geometry: Geometry,
    /// Threshold recorded in the header and used for `--k-prime auto`.
    #[arg(long, default_value_t = 0.025)]
    lambda: f64,
    /// Left extension, or `auto` for the smallest valid one.
    #[arg(long, default_value = "auto")]
    k_prime: String,
    /// Output sinogram (`.csv` or binary).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct FoldArgs {
    #[arg(long)]
    input: PathBuf,
    /// Overrides the threshold stored in the input.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct UnfoldArgs {
    /// Modulo sinogram.
    #[arg(long)]
    input: PathBuf,
    /// `compact` or `general`.
    #[arg(long, default_value = "compact")]
    mode: String,
    /// Amplitude bound; rounded up onto the 2λ grid in general mode.
    #[arg(long)]
    beta: f64,
    /// λ-exceedance radius for the margin check.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Per-row diagnostics CSV.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct FbpArgs {
    #[arg(long)]
    input: PathBuf,
    /// `cosine` or `ram-lak`.
    #[arg(long, default_value = "cosine")]
    filter: String,
    /// Filter bandwidth; defaults to the sinogram's.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct PipelineArgs {
    #[command(flatten)]
    source: PhantomSource,
    #[command(flatten)]
    geometry: Geometry,
    #[arg(long, default_value_t = 0.025)]
    lambda: f64,
    #[arg(long, default_value = "auto")]
    k_prime: String,
    #[arg(long, default_value = "cosine")]
    filter: String,
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// Scale the data to unit sup norm.
    #[arg(long)]
    normalize: bool,
    /// Use this sinogram instead of simulating a phantom.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// `matrix`, `csv` or `binary`.
    #[arg(long, default_value = "matrix")]
    format: String,
    #[arg(long, default_value_t = 300.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0 / 1128.0)]
    spacing: f64,
    #[arg(long, default_value_t = 0.025)]
    lambda: f64,
    /// Keep the original scale instead of normalizing to unit sup norm.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// `ci` (100 trials, Ω = 10π, 25 steps) or `full`.
    #[arg(long, default_value = "ci")]
    scale: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    t_steps: Option<usize>,
    /// Thresholds (comma-separated).
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Bandwidths as multiples of π (comma-separated).
    #[arg(long, value_delimiter = ',')]
    omega_pi: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "sweep")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct DemoArgs {
    /// 1-D samples (one per line); defaults to the built-in asymmetric pulse.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Spacing of the input samples.
    #[arg(long, default_value_t = 0.006)]
    spacing: f64,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 2)]
    factor: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_image(path: &Path, img: &ImageGrid) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("f64") | Some("raw") => io::write_raw_image(path, img),
        _ => io::write_pgm16(path, img),
    }
}

fn cmd_phantom(a: PhantomArgs) -> Result<bool> {
    let p = a.source.load()?;
    let img = p.rasterize(&ImageGrid::new(a.size, a.size)?);
    write_image(&a.out, &img)?;
    if let Some(t) = a.table {
        io::write_text(t, &p.to_table())?;
    }
    println!("{} ellipses, image range [{}, {}]", p.ellipses.len(), img.min(), img.max());
    Ok(true)
}

fn cmd_forward(a: ForwardArgs) -> Result<bool> {
    let p = a.source.load()?;
    let g = &a.geometry;
    let (spacing, k, angles) = (g.spacing(), g.k(), g.angles());
    let probe = ExceedanceProbe::run(&p, g.omega, spacing, angles, k, a.lambda, k / 2)?;
    let mut params = SamplingParams::new(g.omega, spacing, a.lambda, k, k, angles)?;
    let beta = experiment::BETA_INFLATION * probe.peak();
    params.beta = Some(beta);
    params.rho = Some(probe.rho());
    let order = select_order(&UnfoldConfig::from_params(&params, UnfoldMode::CompactExceedance)?)?;
    params.k_prime = match parse_k_prime(&a.k_prime)? {
        Some(kp) => kp,
        None => required_margin(probe.rho(), spacing, order, k) as usize,
    };
    let s = probe.sinogram(&p, &params)?;
    io::write_sinogram(&a.out, &s, SinogramFormat::from_path(&a.out))?;
    println!(
        "M={} K={} K'={} T={} peak={} rho={} N={}",
        angles,
        k,
        params.k_prime,
        spacing,
        probe.peak(),
        probe.rho(),
        order
    );
    Ok(true)
}

fn cmd_fold(a: FoldArgs) -> Result<bool> {
    let mut s = io::read_sinogram(&a.input, SinogramFormat::from_path(&a.input), None)?;
    if let Some(l) = a.lambda {
        s.params.lambda = l;
    }
    let m = fold_sinogram(&s)?;
    let out = modulo_radon::forward::Sinogram::new(m.params, m.rows)?;
    io::write_sinogram(&a.out, &out, SinogramFormat::from_path(&a.out))?;
    Ok(true)
}

fn cmd_unfold(a: UnfoldArgs) -> Result<bool> {
    let s = io::read_sinogram(&a.input, SinogramFormat::from_path(&a.input), None)?;
    let ms = modulo_radon::forward::ModuloSinogram::new(s.params, s.rows)?;
    let mode: UnfoldMode = a.mode.parse()?;
    let thr = ms.params.threshold()?;
    let beta = match mode {
        UnfoldMode::General => modulo_radon::unfold::grid_bound(a.beta, thr),
        UnfoldMode::CompactExceedance => a.beta,
    };
    let mut cfg = UnfoldConfig::new(ms.params.lambda, beta, ms.params.omega, ms.params.spacing, mode)?;
    cfg.order_override = a.order;
    cfg.rho = a.rho;
    let (out, reports) = unfold_sinogram(&ms, &cfg)?;
    io::write_sinogram(&a.out, &out, SinogramFormat::from_path(&a.out))?;
    if let Some(path) = a.report {
        io::write_text(path, &report_csv(&reports))?;
    }
    let flagged = reports.iter().filter(|r| !r.success).count();
    println!("{} rows unfolded, {} flagged", reports.len(), flagged);
    Ok(flagged == 0)
}

fn report_csv(reports: &[UnfoldReport]) -> String {
    let mut text = format!("{}\n", UnfoldReport::CSV_HEADER);
    for (i, r) in reports.iter().enumerate() {
        text.push_str(&r.csv_line(i));
        text.push('\n');
    }
    text
}

fn cmd_fbp(a: FbpArgs) -> Result<bool> {
    let s = io::read_sinogram(&a.input, SinogramFormat::from_path(&a.input), None)?;
    let kind: FilterKind = a.filter.parse()?;
    let spec = kind.spec(a.omega.unwrap_or(s.params.omega))?;
    let img = fbp_reconstruct(&s, &spec, &ImageGrid::new(a.size, a.size)?)?;
    write_image(&a.out, &img)?;
    Ok(true)
}

fn write_pipeline(dir: &Path, out: &PipelineOutput) -> Result<()> {
    let bin = SinogramFormat::Binary;
    io::write_sinogram(dir.join("sinogram.mrts"), &out.sinogram, bin)?;
    let modulo = modulo_radon::forward::Sinogram::new(out.modulo.params, out.modulo.rows.clone())?;
    io::write_sinogram(dir.join("modulo.mrts"), &modulo, bin)?;
    io::write_sinogram(dir.join("unfolded.mrts"), &out.unfolded, bin)?;
    for (name, img) in [("fbp", &out.fbp), ("usfbp", &out.usfbp)] {
        io::write_pgm16(dir.join(format!("{name}.pgm")), img)?;
        io::write_raw_image(dir.join(format!("{name}.f64")), img)?;
    }
    if let Some(t) = &out.truth {
        io::write_pgm16(dir.join("truth.pgm"), t)?;
    }
    io::write_text(
        dir.join("metrics.csv"),
        &format!("{}\n{}\n", PipelineMetrics::CSV_HEADER, out.metrics.csv_line()),
    )?;
    io::write_text(dir.join("unfold_reports.csv"), &report_csv(&out.reports))
}

fn cmd_pipeline(a: PipelineArgs) -> Result<bool> {
    let filter: FilterKind = a.filter.parse()?;
    let out = match &a.input {
        Some(path) => {
            let mut s = io::read_sinogram(path, SinogramFormat::from_path(path), None)?;
            s.params.lambda = a.lambda;
            if a.normalize {
                s = s.normalized();
            }
            run_pipeline_on_sinogram(&s, filter, a.size, None)?
        }
        None => {
            let g = &a.geometry;
            let cfg = PipelineConfig {
                omega: g.omega,
                spacing: g.spacing(),
                k: g.k(),
                angles: g.angles(),
                lambda: a.lambda,
                k_prime: parse_k_prime(&a.k_prime)?,
                filter,
                grid: a.size,
                normalize: a.normalize,
            };
            run_pipeline(&a.source.load()?, &cfg)?
        }
    };
    write_pipeline(&a.out_dir, &out)?;
    let m = &out.metrics;
    println!(
        "K'={} N={} extra={} (general route: J={} N={} extra={}) parity_delta={} rows_flagged={}",
        m.k_prime, m.order, m.extra_samples, m.general_span, m.general_order, m.general_extra_samples, m.parity_delta, m.rows_flagged
    );
    Ok(m.invariants_hold())
}

fn cmd_ingest(a: IngestArgs) -> Result<bool> {
    let format: SinogramFormat = a.format.parse()?;
    let geometry = MatrixGeometry {
        omega: a.omega,
        spacing: a.spacing,
        lambda: a.lambda,
    };
    let s = io::ingest(&a.input, format, Some(geometry), !a.raw)?;
    io::write_sinogram(&a.out, &s, SinogramFormat::from_path(&a.out))?;
    println!(
        "M={} K={} K'={} max={}",
        s.params.angles,
        s.params.k,
        s.params.k_prime,
        s.sup_norm()
    );
    Ok(true)
}

fn cmd_sweep(a: SweepArgs) -> Result<bool> {
    let mut cfg = match a.scale.as_str() {
        "ci" => SweepConfig::ci(),
        "full" => SweepConfig::full(),
        other => return Err(Error::Config(format!("unknown sweep scale {other:?}"))),
    };
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(t) = a.t_steps {
        cfg.t_steps = t;
    }
    if !a.lambda.is_empty() {
        cfg.lambdas = a.lambda;
    }
    if !a.omega_pi.is_empty() {
        cfg.omegas = a.omega_pi.iter().map(|w| w * PI).collect();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    for grid in experiment::success_sweep(&cfg)? {
        let path = a.out_dir.join(grid.file_name());
        io::write_text(&path, &grid.to_csv())?;
        println!("{}", path.display());
    }
    Ok(true)
}

fn cmd_demo(a: DemoArgs) -> Result<bool> {
    let factors = [1, a.factor];
    let demo = match &a.input {
        Some(path) => {
            let truth = io::read_samples(path)?;
            experiment::downsample_demo(&truth, a.spacing, a.lambda, a.rho, &factors, &[1, 2])?
        }
        None => experiment::synthetic_downsample_demo()?,
    };
    let csv = demo.to_csv();
    match &a.out {
        Some(p) => io::write_text(p, &csv)?,
        None => print!("{csv}"),
    }
    Ok(true)
}

/// Expands `--config FILE` into flags placed before the user's own, so
/// that explicit flags override file values.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match args.get(pos + 1) {
            Some(p) => (p.clone(), 2),
            None => return Ok(args),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
        path: path.clone().into(),
        source: e,
    })?;
    let mut rest: Vec<String> = args[..pos].iter().chain(&args[pos + consumed..]).cloned().collect();
    let given: HashSet<&str> = rest
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap())
        .collect();
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse {
                row: i + 1,
                column: 1,
                message: "expected key=value".into(),
            })?;
        let key = key.trim().replace('_', "-");
        if given.contains(key.as_str()) {
            continue;
        }
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.push(v.to_string());
            }
        }
    }
    // subcommand is the first positional after the program name
    let sub = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |p| p + 2);
    rest.splice(sub..sub, extra);
    Ok(rest)
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let result = match cli.command {
        Command::Phantom(a) => cmd_phantom(a),
        Command::Forward(a) => cmd_forward(a),
        Command::Fold(a) => cmd_fold(a),
        Command::Unfold(a) => cmd_unfold(a),
        Command::Fbp(a) => cmd_fbp(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::SweepSuccess(a) => cmd_sweep(a),
        Command::DownsampleDemo(a) => cmd_demo(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: in-pipeline invariant check failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
