//! Thin-lens geometry: image distance, circle of confusion, the linear link
//! between blur-circle diameter and the defocus wavefront coefficient, and
//! the quadratic focal-length solve.
//!
//! Sign convention: the blur-circle diameter `C` carries the sign of the
//! depth offset. Everything downstream of the wavefront coefficient is even
//! in its sign, so callers that only need severity can take the absolute
//! value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical camera settings. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    /// Focal length f.
    pub focal_length: f64,
    /// f-number f/A.
    pub f_number: f64,
    /// Focused depth d_f measured from the lens.
    pub focus_distance: f64,
    /// Sensor pixel width P.
    pub pixel_pitch: f64,
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length > 0.0) {
            return Err(Error::Geometry("focal_length must be positive".into()));
        }
        if !(self.f_number >= 1.0) {
            return Err(Error::Geometry("f_number must be at least 1".into()));
        }
        if !(self.pixel_pitch > 0.0) {
            return Err(Error::Geometry("pixel_pitch must be positive".into()));
        }
        if !(self.focus_distance > self.focal_length) {
            return Err(Error::Geometry(
                "focus_distance must exceed focal_length (no real image)".into(),
            ));
        }
        Ok(())
    }
}

/// Image-side quantities derived from a [`CameraConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedOptics {
    /// Image distance d_i from the thin-lens law.
    pub image_distance: f64,
    /// Aperture diameter A = f / f_number.
    pub aperture_diameter: f64,
    /// Blur scale C_o = A f / (d_f - f).
    pub in_focus_blur_scale: f64,
    /// Wavefront coefficient per unit blur diameter, A / (8 d_i).
    pub ar_per_coc: f64,
}

/// One out-of-focus condition: depth offset, blur circle, and the quadratic
/// wavefront coefficient, all mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefocusState {
    /// Signed depth offset from the focused plane.
    pub depth_offset: f64,
    /// Signed blur-circle diameter C.
    pub coc_diameter: f64,
    /// Wavefront coefficient A_R = ar_per_coc * C.
    pub wavefront_coefficient: f64,
}

/// Uniform grid of depth offsets spanning +/- eta * d_f.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthGrid {
    pub relative_half_range: f64,
    pub point_count: usize,
    pub offsets: Vec<f64>,
}

/// Relative depth offsets beyond this multiple of the focus distance are
/// rejected by [`depth_from_coc`] as outside the model's validity.
pub const DEPTH_RANGE_CAP: f64 = 10.0;

/// Computes the image-side quantities of a camera configuration.
pub fn derive_optics(config: &CameraConfig) -> Result<DerivedOptics> {
    config.validate()?;
    let f = config.focal_length;
    let d_f = config.focus_distance;
    let image_distance = f * d_f / (d_f - f);
    let aperture_diameter = f / config.f_number;
    let in_focus_blur_scale = aperture_diameter * f / (d_f - f);
    let ar_per_coc = aperture_diameter / (8.0 * image_distance);
    Ok(DerivedOptics {
        image_distance,
        aperture_diameter,
        in_focus_blur_scale,
        ar_per_coc,
    })
}

/// Maps a signed depth offset to its blur circle and wavefront coefficient.
pub fn coc_from_depth(config: &CameraConfig, depth_offset: f64) -> Result<DefocusState> {
    let optics = derive_optics(config)?;
    let d_f = config.focus_distance;
    if !(d_f + depth_offset > 0.0) {
        return Err(Error::Geometry(
            "scene point at or behind the lens plane".into(),
        ));
    }
    let coc_diameter = depth_offset * optics.in_focus_blur_scale / (d_f + depth_offset);
    Ok(DefocusState {
        depth_offset,
        coc_diameter,
        wavefront_coefficient: optics.ar_per_coc * coc_diameter,
    })
}

/// Inverts the blur-circle relation for the depth offset.
pub fn depth_from_coc(config: &CameraConfig, coc_diameter: f64) -> Result<f64> {
    let optics = derive_optics(config)?;
    let c_o = optics.in_focus_blur_scale;
    if coc_diameter >= c_o {
        return Err(Error::Domain(format!(
            "coc_diameter {coc_diameter} at or beyond the pole C_o = {c_o}"
        )));
    }
    let depth = coc_diameter * config.focus_distance / (c_o - coc_diameter);
    if depth.abs() > DEPTH_RANGE_CAP * config.focus_distance {
        return Err(Error::Domain(format!(
            "recovered depth offset {depth} exceeds {DEPTH_RANGE_CAP} focus distances"
        )));
    }
    Ok(depth)
}

/// Largest blur-circle diameter over the relative depth range +/- eta,
/// attained at the near endpoint -eta * d_f.
pub fn max_coc(config: &CameraConfig, eta: f64) -> Result<f64> {
    let optics = derive_optics(config)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain("eta must lie in (0, 1)".into()));
    }
    Ok(eta / (1.0 - eta) * optics.in_focus_blur_scale)
}

/// Solves the quadratic for the focal length that yields a prescribed
/// maximum blur circle over the +/- eta depth range.
///
/// `c_max` is in meters. The positive root always exists for positive
/// inputs.
pub fn focal_for_cmax(d_f: f64, f_number: f64, c_max: f64, eta: f64) -> Result<f64> {
    if !(d_f > 0.0 && f_number > 0.0 && c_max > 0.0) {
        return Err(Error::Domain("all inputs must be positive".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain("eta must lie in (0, 1)".into()));
    }
    let c_m = (1.0 - eta) / eta * c_max;
    let cf = c_m * f_number;
    Ok(0.5 * cf * ((1.0 + 4.0 * d_f / cf).sqrt() - 1.0))
}

/// Uniform depth grid of `n_points` offsets spanning [-eta d_f, +eta d_f].
pub fn depth_grid(d_f: f64, eta: f64, n_points: usize) -> Result<DepthGrid> {
    if n_points < 2 {
        return Err(Error::Domain("depth grid needs at least 2 points".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain("eta must lie in (0, 1)".into()));
    }
    if !(d_f > 0.0) {
        return Err(Error::Domain("focus distance must be positive".into()));
    }
    let n = n_points as f64;
    let offsets = (0..n_points)
        .map(|t| eta * d_f * (2.0 * t as f64 - n + 1.0) / (n - 1.0))
        .collect();
    Ok(DepthGrid {
        relative_half_range: eta,
        point_count: n_points,
        offsets,
    })
}

/// Quadratic defocus path-length error at normalized pupil radius `r`,
/// peaking at the coefficient `a_r` on the aperture edge.
pub fn defocus_wavefront(normalized_radius: f64, a_r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&normalized_radius) {
        return Err(Error::Domain(
            "normalized pupil radius must lie in [0, 1]".into(),
        ));
    }
    Ok(a_r * normalized_radius * normalized_radius)
}
