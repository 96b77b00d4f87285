//! Camera-settings sweep: solve the focal length per settings tuple, walk
//! the depth grid, fit every polychromatic filter, and tabulate the blur
//! and fit-error maxima with the acceptance filters.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_sigma_equal_area;
use crate::geometry::{coc_from_depth, depth_grid, focal_for_cmax, CameraConfig};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{mtf, polychromatic_otf, SpectralModel};

/// Discrete grids of camera settings to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub f_numbers: Vec<f64>,
    /// Focus distances in meters.
    pub focus_distances: Vec<f64>,
    /// Maximum blur circles in pixel multiples.
    pub c_max_values: Vec<f64>,
    /// Pixel pitches in meters.
    pub pixel_pitches: Vec<f64>,
    pub eta: f64,
    pub n_depth: usize,
}

impl Default for SweepGrid {
    /// The practical discrete ranges investigated in depth-from-defocus
    /// camera design: 5 f-numbers x 7 depths x 7 blur budgets x 5 pitches.
    fn default() -> Self {
        Self {
            f_numbers: vec![1.0, 1.4, 2.0, 2.8, 4.0],
            focus_distances: vec![1.0, 5.0, 10.0, 20.0, 40.0, 70.0, 100.0],
            c_max_values: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            pixel_pitches: vec![1e-6, 2e-6, 4e-6, 5.6e-6, 8e-6],
            eta: 0.1,
            n_depth: 21,
        }
    }
}

impl SweepGrid {
    /// Small grid for smoke runs: 3 f-numbers x 3 blur budgets x 2 pitches
    /// over a single focus distance.
    pub fn reduced() -> Self {
        Self {
            f_numbers: vec![1.0, 2.0, 4.0],
            focus_distances: vec![10.0],
            c_max_values: vec![1.0, 3.0, 5.0],
            pixel_pitches: vec![2e-6, 5.6e-6],
            eta: 0.1,
            n_depth: 21,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_numbers.is_empty()
            || self.focus_distances.is_empty()
            || self.c_max_values.is_empty()
            || self.pixel_pitches.is_empty()
        {
            return Err(Error::Domain("sweep grid lists must be non-empty".into()));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Domain("eta must lie in (0, 1)".into()));
        }
        if self.n_depth < 2 {
            return Err(Error::Domain("n_depth must be at least 2".into()));
        }
        Ok(())
    }
}

/// Reference focus distance for the depth-collapsed sweep.
pub const COLLAPSED_REFERENCE_DEPTH: f64 = 10.0;

/// One evaluated settings tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Absent for depth-collapsed tables.
    pub focus_distance: Option<f64>,
    pub f_number: f64,
    /// Blur budget in pixel multiples.
    pub c_max: f64,
    /// Pixel pitch in meters.
    pub pixel_pitch: f64,
    /// Solved focal length in meters.
    pub focal_length: f64,
    /// Largest fitted sigma over the depth grid, pixel multiples.
    pub sigma_max: f64,
    /// Largest Gaussian-fit error over the depth grid, in the published
    /// normalization: the band area between filter and Gaussian referred to
    /// a unit plot one cycle per micrometer wide, i.e. the per-curve fit
    /// MAE divided by the pixel pitch in micrometers.
    pub mae_max: f64,
}

/// A record that could not be evaluated, with its settings tuple.
#[derive(Debug)]
pub struct RecordFailure {
    pub focus_distance: f64,
    pub f_number: f64,
    pub c_max: f64,
    pub pixel_pitch: f64,
    pub error: Error,
}

/// Outcome of a sweep: evaluated records in deterministic tuple order plus
/// any per-record failures.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<RecordFailure>,
}

/// Acceptance filters applied to sweep records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterCriteria {
    /// Upper bound on the record's [`SweepRecord::mae_max`], which carries
    /// the published one-cycle-per-micrometer normalization.
    pub mae_threshold: f64,
    /// Lower sigma bound in pixel multiples, exclusive.
    pub sigma_lower: f64,
    /// Upper sigma bound in pixel multiples, exclusive.
    pub sigma_upper: f64,
    /// Largest admissible pixel pitch in meters.
    pub pixel_max: f64,
    /// Largest admissible focal length in meters.
    pub focal_max: f64,
}

impl Default for FilterCriteria {
    /// The published acceptance level: MAE <= 0.01, sigma in (1P, 5P),
    /// P <= 5.6 um, f <= 100 mm.
    fn default() -> Self {
        Self {
            mae_threshold: 0.01,
            sigma_lower: 1.0,
            sigma_upper: 5.0,
            pixel_max: 5.6e-6,
            focal_max: 100e-3,
        }
    }
}

impl FilterCriteria {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_lower < self.sigma_upper) {
            return Err(Error::Domain("sigma bounds out of order".into()));
        }
        if !(self.mae_threshold > 0.0 && self.pixel_max > 0.0 && self.focal_max > 0.0) {
            return Err(Error::Domain("filter thresholds must be positive".into()));
        }
        Ok(())
    }

    pub fn admits(&self, record: &SweepRecord) -> bool {
        record.mae_max <= self.mae_threshold
            && record.sigma_max > self.sigma_lower
            && record.sigma_max < self.sigma_upper
            && record.pixel_pitch <= self.pixel_max
            && record.focal_length <= self.focal_max
    }
}

/// Evaluates one settings tuple: solves the focal length, walks the depth
/// grid, and takes the sigma and MAE maxima over all out-of-focus points.
///
/// The exact in-focus sample is excluded: its filter is the identity with a
/// degenerate zero-sigma fit that can never carry either maximum.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_record(
    d_f: f64,
    f_number: f64,
    c_max_px: f64,
    pixel_pitch: f64,
    eta: f64,
    n_depth: usize,
    spectral: &SpectralModel,
    quad: &QuadratureSpec,
) -> Result<SweepRecord> {
    let fail = |e: Error| Error::SweepRecord {
        context: format!("d_f = {d_f}, f_n = {f_number}, c_max = {c_max_px}, P = {pixel_pitch}"),
        source: Box::new(e),
    };
    let c_max_m = c_max_px * pixel_pitch;
    let focal_length = focal_for_cmax(d_f, f_number, c_max_m, eta).map_err(&fail)?;
    let config = CameraConfig {
        focal_length,
        f_number,
        focus_distance: d_f,
        pixel_pitch,
    };
    let grid = depth_grid(d_f, eta, n_depth).map_err(&fail)?;
    let mut sigma_max = 0.0f64;
    let mut mae_max = 0.0f64;
    for (index, &offset) in grid.offsets.iter().enumerate() {
        if offset == 0.0 {
            continue;
        }
        let state = coc_from_depth(&config, offset).map_err(&fail)?;
        let curve = polychromatic_otf(&config, &state, spectral, FREQ_SAMPLES, quad)
            .map_err(|e| fail(Error::Domain(format!("depth index {index}: {e}"))))?;
        let fit = fit_sigma_equal_area(&mtf(&curve))
            .map_err(|e| fail(Error::Domain(format!("depth index {index}: {e}"))))?;
        // the frequency axis is cycles per pixel, so sigma is already in
        // pixel multiples; the tabulated error is renormalized from the
        // per-pixel band to a one-cycle-per-micrometer plot width
        sigma_max = sigma_max.max(fit.sigma);
        mae_max = mae_max.max(fit.mae / (pixel_pitch * 1e6));
    }
    Ok(SweepRecord {
        focus_distance: Some(d_f),
        f_number,
        c_max: c_max_px,
        pixel_pitch,
        focal_length,
        sigma_max,
        mae_max,
    })
}

/// Frequency samples per curve: power-of-two-plus-one on [0, 1] cycles per
/// pixel.
pub const FREQ_SAMPLES: usize = 257;

/// Runs the grid, in parallel, in lexicographic tuple order.
///
/// With `collapse_depth` the focus-distance axis is dropped and every
/// (f-number, blur budget, pitch) triple is evaluated once at
/// [`COLLAPSED_REFERENCE_DEPTH`]; records then carry no focus distance.
pub fn run_sweep(
    grid: &SweepGrid,
    spectral: &SpectralModel,
    quad: &QuadratureSpec,
    collapse_depth: bool,
) -> Result<SweepOutcome> {
    grid.validate()?;
    spectral.validate()?;
    quad.validate()?;
    let tuples: Vec<(Option<f64>, f64, f64, f64)> = if collapse_depth {
        let mut v = Vec::new();
        for &f_n in &grid.f_numbers {
            for &c in &grid.c_max_values {
                for &p in &grid.pixel_pitches {
                    v.push((None, f_n, c, p));
                }
            }
        }
        v
    } else {
        let mut v = Vec::new();
        for &d_f in &grid.focus_distances {
            for &f_n in &grid.f_numbers {
                for &c in &grid.c_max_values {
                    for &p in &grid.pixel_pitches {
                        v.push((Some(d_f), f_n, c, p));
                    }
                }
            }
        }
        v
    };

    let results: Vec<std::result::Result<SweepRecord, RecordFailure>> = tuples
        .par_iter()
        .map(|&(d_f_opt, f_n, c, p)| {
            let d_f = d_f_opt.unwrap_or(COLLAPSED_REFERENCE_DEPTH);
            match evaluate_record(d_f, f_n, c, p, grid.eta, grid.n_depth, spectral, quad) {
                Ok(mut record) => {
                    record.focus_distance = d_f_opt;
                    Ok(record)
                }
                Err(error) => Err(RecordFailure {
                    focus_distance: d_f,
                    f_number: f_n,
                    c_max: c,
                    pixel_pitch: p,
                    error,
                }),
            }
        })
        .collect();

    let mut outcome = SweepOutcome::default();
    for result in results {
        match result {
            Ok(record) => outcome.records.push(record),
            Err(failure) => outcome.failures.push(failure),
        }
    }
    Ok(outcome)
}

/// Applies the criteria and counts surviving records per focus distance.
pub fn filter_records(
    records: &[SweepRecord],
    criteria: &FilterCriteria,
) -> (Vec<SweepRecord>, Vec<(f64, usize)>) {
    let filtered: Vec<SweepRecord> = records
        .iter()
        .filter(|r| criteria.admits(r))
        .copied()
        .collect();
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for record in &filtered {
        if let Some(d_f) = record.focus_distance {
            let entry = counts.entry(d_f.to_bits()).or_insert((d_f, 0));
            entry.1 += 1;
        }
    }
    let mut per_depth: Vec<(f64, usize)> = counts.into_values().collect();
    per_depth.sort_by(|a, b| a.0.total_cmp(&b.0));
    (filtered, per_depth)
}

/// Per-depth summary row: the count of admitted settings and the extent of
/// pitch, focal length and f-number among them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthStatistics {
    pub focus_distance: f64,
    pub count: usize,
    pub pixel_min: f64,
    pub pixel_max: f64,
    pub focal_min: f64,
    pub focal_max: f64,
    pub f_number_min: f64,
    pub f_number_max: f64,
}

/// Summarizes filtered depth-resolved records per focus distance.
pub fn depth_statistics(records: &[SweepRecord]) -> Vec<DepthStatistics> {
    let mut groups: BTreeMap<u64, Vec<&SweepRecord>> = BTreeMap::new();
    for record in records {
        if let Some(d_f) = record.focus_distance {
            groups.entry(d_f.to_bits()).or_default().push(record);
        }
    }
    let mut stats: Vec<DepthStatistics> = groups
        .values()
        .map(|group| {
            let d_f = group[0].focus_distance.unwrap();
            let fold = |init: f64, f: &dyn Fn(&SweepRecord) -> f64, max: bool| {
                group.iter().map(|r| f(r)).fold(init, |acc, v| {
                    if max {
                        acc.max(v)
                    } else {
                        acc.min(v)
                    }
                })
            };
            DepthStatistics {
                focus_distance: d_f,
                count: group.len(),
                pixel_min: fold(f64::INFINITY, &|r| r.pixel_pitch, false),
                pixel_max: fold(0.0, &|r| r.pixel_pitch, true),
                focal_min: fold(f64::INFINITY, &|r| r.focal_length, false),
                focal_max: fold(0.0, &|r| r.focal_length, true),
                f_number_min: fold(f64::INFINITY, &|r| r.f_number, false),
                f_number_max: fold(0.0, &|r| r.f_number, true),
            }
        })
        .collect();
    stats.sort_by(|a, b| a.focus_distance.total_cmp(&b.focus_distance));
    stats
}

/// Output format of [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Header of the depth-collapsed CSV schema.
pub const COLLAPSED_HEADER: &str = "f_number,c_max_px,pixel_um,sigma_max_px,mae_max";
/// Header of the depth-resolved CSV schema.
pub const FULL_HEADER: &str = "d_f_m,f_number,c_max_px,pixel_um,focal_mm,sigma_max_px,mae_max";
/// Header of the per-depth statistics CSV schema.
pub const STATS_HEADER: &str =
    "d_f_m,count,pixel_um_min,pixel_um_max,focal_mm_min,focal_mm_max,f_number_min,f_number_max";

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Renders records as CSV text in the declared schema. Records with a focus
/// distance use the full schema, depth-collapsed ones the short schema; a
/// mixture is rejected.
pub fn render_csv(records: &[SweepRecord]) -> Result<String> {
    let collapsed = records.first().map_or(true, |r| r.focus_distance.is_none());
    if records
        .iter()
        .any(|r| r.focus_distance.is_none() != collapsed)
    {
        return Err(Error::Schema(
            "cannot mix depth-resolved and collapsed records in one table".into(),
        ));
    }
    let mut out = String::new();
    out.push_str(if collapsed { COLLAPSED_HEADER } else { FULL_HEADER });
    out.push('\n');
    for r in records {
        if let Some(d_f) = r.focus_distance {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                d_f,
                r.f_number,
                r.c_max,
                r.pixel_pitch * 1e6,
                fmt4(r.focal_length * 1e3),
                fmt4(r.sigma_max),
                fmt4(r.mae_max),
            ));
        } else {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.f_number,
                r.c_max,
                r.pixel_pitch * 1e6,
                fmt4(r.sigma_max),
                fmt4(r.mae_max),
            ));
        }
    }
    Ok(out)
}

/// Renders per-depth statistics in the stats CSV schema.
pub fn render_stats_csv(stats: &[DepthStatistics]) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.focus_distance,
            s.count,
            s.pixel_min * 1e6,
            s.pixel_max * 1e6,
            fmt4(s.focal_min * 1e3),
            fmt4(s.focal_max * 1e3),
            s.f_number_min,
            s.f_number_max,
        ));
    }
    out
}

/// Parses a CSV table produced by [`render_csv`] back into records.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Schema("empty table".into()))?;
    let collapsed = match header {
        COLLAPSED_HEADER => true,
        FULL_HEADER => false,
        other => {
            let expected: Vec<&str> = FULL_HEADER.split(',').collect();
            let got: Vec<&str> = other.split(',').collect();
            let offending = expected
                .iter()
                .zip(&got)
                .find(|(e, g)| e != g)
                .map(|(_, g)| (*g).to_string())
                .unwrap_or_else(|| other.to_string());
            return Err(Error::Schema(format!(
                "unrecognized header column `{offending}`"
            )));
        }
    };
    let mut records = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if collapsed { 5 } else { 7 };
        if fields.len() != expected {
            return Err(Error::Schema(format!(
                "line {}: expected {expected} fields, found {}",
                line_no + 2,
                fields.len()
            )));
        }
        let parse = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| {
                Error::Schema(format!("line {}: bad number `{}`", line_no + 2, fields[i]))
            })
        };
        let record = if collapsed {
            SweepRecord {
                focus_distance: None,
                f_number: parse(0)?,
                c_max: parse(1)?,
                pixel_pitch: parse(2)? * 1e-6,
                focal_length: f64::NAN,
                sigma_max: parse(3)?,
                mae_max: parse(4)?,
            }
        } else {
            SweepRecord {
                focus_distance: Some(parse(0)?),
                f_number: parse(1)?,
                c_max: parse(2)?,
                pixel_pitch: parse(3)? * 1e-6,
                focal_length: parse(4)? * 1e-3,
                sigma_max: parse(5)?,
                mae_max: parse(6)?,
            }
        };
        records.push(record);
    }
    Ok(records)
}

/// Writes records to `destination` in the requested format.
pub fn emit_table(records: &[SweepRecord], format: TableFormat, destination: &Path) -> Result<()> {
    let payload = match format {
        TableFormat::Csv => render_csv(records)?,
        TableFormat::Json => {
            serde_json::to_string_pretty(records).map_err(|e| Error::Io {
                path: destination.display().to_string(),
                message: e.to_string(),
            })? + "\n"
        }
    };
    let mut file =
        std::fs::File::create(destination).map_err(|e| Error::io(destination, e))?;
    file.write_all(payload.as_bytes())
        .map_err(|e| Error::io(destination, e))?;
    Ok(())
}
