//! Command-line surface: curve computation, fitting, sweeping, filtering,
//! and plot-data emission. The only module that performs I/O.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 usage error,
//! 2 numeric failure, 3 I/O failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::fit::fit_sigma_equal_area;
use crate::geometry::{coc_from_depth, derive_optics, CameraConfig, DefocusState};
use crate::mono::{
    defocus_transfer, defocused_otf_approx_k1, defocused_otf_exact, diffraction_otf, TransferMode,
};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{mtf, polychromatic_otf, SpectralModel};
use crate::sweep::{
    depth_statistics, emit_table, filter_records, parse_csv, render_csv, render_stats_csv,
    run_sweep, FilterCriteria, SweepGrid, TableFormat,
};

/// Process exit status used by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Numeric = 2,
    Io = 3,
}

/// Environment variable read for the default sweep job count.
pub const JOBS_ENV: &str = "DEFOCUS_JOBS";

/// Parses a unit-suffixed length into meters. Bare numbers are rejected:
/// the tables mix millimeters and micrometers, and an implicit unit is a
/// silent factor-of-1000 bug waiting to happen.
pub fn parse_length(text: &str) -> Result<f64, String> {
    let trimmed = text.trim();
    let (number, scale) = if let Some(v) = trimmed.strip_suffix("nm") {
        (v, 1e-9)
    } else if let Some(v) = trimmed.strip_suffix("um") {
        (v, 1e-6)
    } else if let Some(v) = trimmed.strip_suffix("mm") {
        (v, 1e-3)
    } else if let Some(v) = trimmed.strip_suffix("cm") {
        (v, 1e-2)
    } else if let Some(v) = trimmed.strip_suffix('m') {
        (v, 1.0)
    } else {
        return Err(format!(
            "length `{trimmed}` needs a unit suffix (nm, um, mm, cm, m)"
        ));
    };
    number
        .trim()
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| format!("cannot parse `{number}` as a number"))
}

#[derive(Debug, Parser)]
#[command(
    name = "defocus",
    about = "Defocused OTF computation, Gaussian blur fitting, and camera-settings sweeps",
    version
)]
pub struct CliConfig {
    /// Optional key=value file overriding quadrature and spectral defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monochrome OTF curves over the normalized frequency axis.
    OtfMono(OtfMonoArgs),
    /// Polychromatic defocusing filter with its Gaussian fit.
    OtfSpectral(OtfSpectralArgs),
    /// Settings sweep over the discrete camera grids.
    Sweep(SweepArgs),
    /// Filter a sweep table and emit per-depth statistics.
    Filter(FilterArgs),
    /// Render a CSV table as a standalone SVG line plot.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct OtfMonoArgs {
    /// Defocus severity A_R / lambda.
    #[arg(long, value_name = "RATIO")]
    pub ar_over_lambda: f64,
    /// Sample count over the normalized frequency axis.
    #[arg(long, default_value_t = 257)]
    pub samples: usize,
    /// Transfer column mode: exact quadrature or the closed-form chord.
    #[arg(long, default_value = "exact", value_parser = ["exact", "approx"])]
    pub mode: String,
    /// Output CSV path.
    #[arg(long, default_value = "otf-mono.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OtfSpectralArgs {
    /// Focal length, unit-suffixed (e.g. 15mm).
    #[arg(long, value_parser = parse_length)]
    pub focal: f64,
    /// f-number.
    #[arg(long = "fn", value_name = "RATIO")]
    pub f_number: f64,
    /// Focus distance, unit-suffixed (e.g. 1m).
    #[arg(long = "df", value_parser = parse_length)]
    pub focus: f64,
    /// Pixel pitch, unit-suffixed (e.g. 5.6um).
    #[arg(long, value_parser = parse_length)]
    pub pixel: f64,
    /// Blur-circle diameter in pixel multiples.
    #[arg(long, conflicts_with_all = ["depth_offset", "ar_px"])]
    pub coc_px: Option<f64>,
    /// Depth offset from the focused plane, unit-suffixed (may be negative).
    #[arg(long, value_parser = parse_signed_length, allow_hyphen_values = true)]
    pub depth_offset: Option<f64>,
    /// Wavefront coefficient in pixel multiples.
    #[arg(long, conflicts_with = "depth_offset")]
    pub ar_px: Option<f64>,
    /// Frequency samples over one cycle per pixel.
    #[arg(long, default_value_t = 257)]
    pub freq_samples: usize,
    /// Output CSV path; the fit sidecar lands next to it as .json.
    #[arg(long, default_value = "otf-spectral.csv")]
    pub out: PathBuf,
}

fn parse_signed_length(text: &str) -> Result<f64, String> {
    if let Some(rest) = text.trim().strip_prefix('-') {
        parse_length(rest).map(|v| -v)
    } else {
        parse_length(text)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Full depth-resolved sweep (one record per focus distance).
    #[arg(long, conflicts_with = "collapsed")]
    pub full: bool,
    /// Depth-collapsed sweep (one record per settings triple).
    #[arg(long)]
    pub collapsed: bool,
    /// Comma-separated f-numbers overriding the default grid.
    #[arg(long, value_delimiter = ',')]
    pub f_numbers: Vec<f64>,
    /// Comma-separated focus distances in meters.
    #[arg(long, value_delimiter = ',')]
    pub focus_distances: Vec<f64>,
    /// Comma-separated blur budgets in pixel multiples.
    #[arg(long, value_delimiter = ',')]
    pub c_max: Vec<f64>,
    /// Comma-separated pixel pitches in micrometers.
    #[arg(long, value_delimiter = ',')]
    pub pixels_um: Vec<f64>,
    /// Reduced 3x3x2 grid for smoke runs.
    #[arg(long)]
    pub reduced: bool,
    /// Relative depth half-range.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// Depth-grid point count.
    #[arg(long, default_value_t = 21)]
    pub n_depth: usize,
    /// Worker threads; defaults to DEFOCUS_JOBS or all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Input sweep table (CSV).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "filtered.csv")]
    pub out: PathBuf,
    /// Per-depth statistics output path.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub mae_max: f64,
    /// Lower sigma bound in pixel multiples.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_min: f64,
    /// Upper sigma bound in pixel multiples.
    #[arg(long, default_value_t = 5.0)]
    pub sigma_max: f64,
    /// Largest admissible pixel pitch, unit-suffixed.
    #[arg(long, value_parser = parse_length, default_value = "5.6um")]
    pub pixel_max: f64,
    /// Largest admissible focal length, unit-suffixed.
    #[arg(long, value_parser = parse_length, default_value = "100mm")]
    pub focal_max: f64,
    /// Keep only records with exactly this pixel pitch.
    #[arg(long, value_parser = parse_length)]
    pub pixel_exact: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Input CSV with a header row; first column is the x axis.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
    #[arg(long, default_value = "x")]
    pub x_label: String,
    #[arg(long, default_value = "y")]
    pub y_label: String,
}

/// Overrides loaded from the optional key=value config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub quad: QuadratureSpec,
    pub spectral: SpectralModel,
}

impl Overrides {
    /// Parses lines of `key = value`; unknown keys are rejected so typos
    /// fail loudly.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut o = Overrides {
            quad: QuadratureSpec::default(),
            spectral: SpectralModel::default(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let key = key.trim();
            let value = value.trim();
            fn parsed<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, String> {
                value
                    .parse()
                    .map_err(|_| format!("line {line}: bad value for {key}"))
            }
            match key {
                "quad.base_nodes" => o.quad.base_nodes = parsed(value, key, i + 1)?,
                "quad.nodes_per_oscillation" => {
                    o.quad.nodes_per_oscillation = parsed(value, key, i + 1)?
                }
                "quad.absolute_tolerance" => {
                    o.quad.absolute_tolerance = parsed(value, key, i + 1)?
                }
                "spectral.lambda_min" => o.spectral.lambda_min = parsed(value, key, i + 1)?,
                "spectral.lambda_max" => o.spectral.lambda_max = parsed(value, key, i + 1)?,
                "spectral.temperature" => o.spectral.temperature = parsed(value, key, i + 1)?,
                "spectral.lambda_samples" => {
                    o.spectral.lambda_samples = parsed(value, key, i + 1)?
                }
                other => return Err(format!("line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(o)
    }
}

fn classify(err: &Error) -> ExitStatus {
    match err {
        Error::Io { .. } => ExitStatus::Io,
        Error::Schema(_) => ExitStatus::Usage,
        Error::Geometry(_) | Error::Domain(_) => ExitStatus::Usage,
        Error::QuadratureNonConvergence(_) => ExitStatus::Numeric,
        Error::Fit(_) => ExitStatus::Numeric,
        Error::SweepRecord { source, .. } => classify(source),
    }
}

/// Entry point for the binary; returns the process exit status.
pub fn run(cli: CliConfig) -> ExitStatus {
    let overrides = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match Overrides::parse(&text) {
                Ok(o) => o,
                Err(msg) => {
                    eprintln!("config {}: {msg}", path.display());
                    return ExitStatus::Usage;
                }
            },
            Err(err) => {
                eprintln!("config {}: {err}", path.display());
                return ExitStatus::Io;
            }
        },
        None => Overrides::default(),
    };
    let result = match cli.command {
        Command::OtfMono(args) => cmd_otf_mono(&args, &overrides),
        Command::OtfSpectral(args) => cmd_otf_spectral(&args, &overrides),
        Command::Sweep(args) => cmd_sweep(&args, &overrides),
        Command::Filter(args) => cmd_filter(&args),
        Command::Plot(args) => cmd_plot(&args),
    };
    match result {
        Ok(status) => status,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}

fn write_text(path: &Path, text: &str) -> crate::error::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// CSV columns: s, exact defocused OTF, diffraction OTF, transfer ratio,
/// closed-form approximation.
fn cmd_otf_mono(args: &OtfMonoArgs, overrides: &Overrides) -> crate::error::Result<ExitStatus> {
    if args.ar_over_lambda < 0.0 {
        return Err(Error::Domain("severity must be non-negative".into()));
    }
    if args.samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let quad = overrides.quad;
    let mode = if args.mode == "approx" {
        TransferMode::Approx
    } else {
        TransferMode::Exact
    };
    let mut out = String::from("s,h_def_o,h_o,h_transfer,h_approx\n");
    for k in 0..args.samples {
        let s = k as f64 / (args.samples - 1) as f64;
        let h_def = defocused_otf_exact(s, args.ar_over_lambda, &quad)?;
        let h_o = diffraction_otf(s)?;
        let transfer = defocus_transfer(s, args.ar_over_lambda, &quad, mode)?;
        let h_approx = defocused_otf_approx_k1(s, args.ar_over_lambda)?;
        let marker = if transfer.is_limit { " (limit)" } else { "" };
        writeln!(
            out,
            "{s},{:.9},{:.9},{:.9}{marker},{:.9}",
            h_def, h_o, transfer.value, h_approx
        )
        .expect("string write");
    }
    write_text(&args.out, &out)?;
    println!(
        "wrote {} samples at severity {} to {}",
        args.samples,
        args.ar_over_lambda,
        args.out.display()
    );
    Ok(ExitStatus::Success)
}

fn cmd_otf_spectral(
    args: &OtfSpectralArgs,
    overrides: &Overrides,
) -> crate::error::Result<ExitStatus> {
    let config = CameraConfig {
        focal_length: args.focal,
        f_number: args.f_number,
        focus_distance: args.focus,
        pixel_pitch: args.pixel,
    };
    let optics = derive_optics(&config)?;
    let state = match (args.coc_px, args.depth_offset, args.ar_px) {
        (Some(coc_px), None, None) => {
            let coc = coc_px * args.pixel;
            DefocusState {
                depth_offset: f64::NAN,
                coc_diameter: coc,
                wavefront_coefficient: optics.ar_per_coc * coc,
            }
        }
        (None, Some(offset), None) => coc_from_depth(&config, offset)?,
        (None, None, Some(ar_px)) => {
            let ar = ar_px * args.pixel;
            DefocusState {
                depth_offset: f64::NAN,
                coc_diameter: ar / optics.ar_per_coc,
                wavefront_coefficient: ar,
            }
        }
        _ => {
            return Err(Error::Domain(
                "give exactly one of --coc-px, --depth-offset, --ar-px".into(),
            ))
        }
    };
    let curve = polychromatic_otf(
        &config,
        &state,
        &overrides.spectral,
        args.freq_samples,
        &overrides.quad,
    )?;
    let filter = mtf(&curve);
    let fit = fit_sigma_equal_area(&filter)?;
    let mut out = String::from("u_cpp,h_def,mtf,gauss_fit\n");
    for (&(u, h), &(_, m)) in curve.samples.iter().zip(&filter.samples) {
        let g = (-0.5 * fit.sigma * fit.sigma * u * u).exp();
        writeln!(out, "{u},{h:.9},{m:.9},{g:.9}").expect("string write");
    }
    write_text(&args.out, &out)?;
    let sidecar = args.out.with_extension("json");
    let summary = serde_json::json!({
        "sigma_px": fit.sigma,
        "mae": fit.mae,
        "rmse": fit.rmse,
        "matched_area": fit.matched_area,
        "coc_px": state.coc_diameter / args.pixel,
        "ar_px": state.wavefront_coefficient / args.pixel,
    });
    write_text(&sidecar, &format!("{:#}\n", summary))?;
    println!(
        "sigma = {:.4} px, mae = {:.5}, rmse = {:.5} -> {}",
        fit.sigma,
        fit.mae,
        fit.rmse,
        args.out.display()
    );
    Ok(ExitStatus::Success)
}

fn cmd_sweep(args: &SweepArgs, overrides: &Overrides) -> crate::error::Result<ExitStatus> {
    let mut grid = if args.reduced {
        SweepGrid::reduced()
    } else {
        SweepGrid::default()
    };
    if !args.f_numbers.is_empty() {
        grid.f_numbers = args.f_numbers.clone();
    }
    if !args.focus_distances.is_empty() {
        grid.focus_distances = args.focus_distances.clone();
    }
    if !args.c_max.is_empty() {
        grid.c_max_values = args.c_max.clone();
    }
    if !args.pixels_um.is_empty() {
        grid.pixel_pitches = args.pixels_um.iter().map(|p| p * 1e-6).collect();
    }
    grid.eta = args.eta;
    grid.n_depth = args.n_depth;

    let jobs = args.jobs.or_else(|| {
        std::env::var(JOBS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    let collapse = !args.full;
    let start = std::time::Instant::now();
    let outcome = match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(|| run_sweep(&grid, &overrides.spectral, &overrides.quad, collapse)),
        _ => run_sweep(&grid, &overrides.spectral, &overrides.quad, collapse),
    }?;
    let elapsed = start.elapsed();
    let format = if args.format == "json" {
        TableFormat::Json
    } else {
        TableFormat::Csv
    };
    emit_table(&outcome.records, format, &args.out)?;
    println!(
        "{} records in {:.1} s -> {}",
        outcome.records.len(),
        elapsed.as_secs_f64(),
        args.out.display()
    );
    if outcome.failures.is_empty() {
        Ok(ExitStatus::Success)
    } else {
        for failure in &outcome.failures {
            eprintln!(
                "record (d_f = {}, f_n = {}, c_max = {}, P = {}) failed: {}",
                failure.focus_distance,
                failure.f_number,
                failure.c_max,
                failure.pixel_pitch,
                failure.error
            );
        }
        Ok(ExitStatus::Numeric)
    }
}

fn cmd_filter(args: &FilterArgs) -> crate::error::Result<ExitStatus> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let records = parse_csv(&text)?;
    let criteria = FilterCriteria {
        mae_threshold: args.mae_max,
        sigma_lower: args.sigma_min,
        sigma_upper: args.sigma_max,
        pixel_max: args.pixel_max,
        focal_max: args.focal_max,
    };
    criteria.validate()?;
    let (mut filtered, _) = filter_records(&records, &criteria);
    if let Some(pixel) = args.pixel_exact {
        filtered.retain(|r| (r.pixel_pitch - pixel).abs() < 1e-12);
    }
    write_text(&args.out, &render_csv(&filtered)?)?;
    let stats = depth_statistics(&filtered);
    if let Some(stats_path) = &args.stats_out {
        write_text(stats_path, &render_stats_csv(&stats))?;
    }
    println!("{}", filtered.len());
    for s in &stats {
        println!(
            "d_f = {} m: {} options, f in [{:.2}, {:.2}] mm",
            s.focus_distance,
            s.count,
            s.focal_min * 1e3,
            s.focal_max * 1e3
        );
    }
    Ok(ExitStatus::Success)
}

const SVG_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn cmd_plot(args: &PlotArgs) -> crate::error::Result<ExitStatus> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Schema("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    if header.len() < 2 {
        return Err(Error::Schema("need at least two columns".into()));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                // tolerate annotation suffixes like "1.0 (limit)"
                field
                    .split_whitespace()
                    .next()
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|_| {
                        Error::Schema(format!("line {}: bad number `{field}`", i + 2))
                    })
            })
            .collect::<crate::error::Result<_>>()?;
        if row.len() != header.len() {
            return Err(Error::Schema(format!("line {}: ragged row", i + 2)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }

    let (width, height, margin) = (800.0, 500.0, 60.0);
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (x_min, x_max) = bounds(&xs);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for row in &rows {
        for &v in &row[1..] {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let to_x = |v: f64| margin + (v - x_min) / (x_max - x_min) * (width - 2.0 * margin);
    let to_y = |v: f64| height - margin - (v - y_min) / (y_max - y_min) * (height - 2.0 * margin);

    let mut svg = String::new();
    write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    write!(
        svg,
        r#"<line x1="{m}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{y0}" stroke="black"/>"#,
        m = margin,
        y0 = height - margin,
        x1 = width - margin
    )
    .unwrap();
    write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        height - margin / 3.0,
        args.x_label
    )
    .unwrap();
    write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 {x} {y})">{}</text>"#,
        margin / 3.0,
        height / 2.0,
        args.y_label,
        x = margin / 3.0,
        y = height / 2.0
    )
    .unwrap();
    for (col, name) in header.iter().enumerate().skip(1) {
        let color = SVG_COLORS[(col - 1) % SVG_COLORS.len()];
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", to_x(r[0]), to_y(r[col])))
            .collect();
        write!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{name}</text>"#,
            width - margin + 5.0,
            margin + 16.0 * col as f64
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    write_text(&args.out, &svg)?;
    println!(
        "plotted {} series x {} points -> {}",
        header.len() - 1,
        rows.len(),
        args.out.display()
    );
    Ok(ExitStatus::Success)
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        (min - 1.0, max + 1.0)
    } else {
        (min, max)
    }
}
