//! Black-body spectral radiance and the polychromatic defocusing filter.
//!
//! The filter is sampled on the cycles-per-pixel axis `u = rho * P` over one
//! cycle per pixel. For each frequency sample and wavelength node the
//! normalized frequency is `s = rho * lambda * d_i / A`; wavelengths past
//! their cutoff (`s >= 1`) contribute zero while remaining in the spectral
//! normalization.
//!
//! Two spectral combinations are provided. [`SpectralCombination::FilterRatio`]
//! divides the radiance-weighted defocused OTF by the radiance-weighted
//! aberration-free OTF, i.e. it normalizes the polychromatic curve by its
//! zero-defocus counterpart; this is the construction that reproduces the
//! published sweep tables and is the default everywhere.
//! [`SpectralCombination::TransferAverage`] instead averages the per-wavelength
//! transfer ratios directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{derive_optics, CameraConfig, DefocusState};
use crate::mono::{defocused_otf_exact, diffraction_otf, TransferMode};
use crate::quadrature::QuadratureSpec;

/// Planck constant as used throughout, J s.
pub const PLANCK_H: f64 = 6.63e-34;
/// Speed of light, m/s.
pub const LIGHT_SPEED: f64 = 3e8;
/// Boltzmann constant, J/K.
pub const BOLTZMANN_K: f64 = 1.38e-23;

/// Black-body illumination model and its wavelength discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub temperature: f64,
    pub lambda_samples: usize,
}

impl Default for SpectralModel {
    /// Solar-like ambient spectrum: 200 nm to 2 um at 6000 K.
    fn default() -> Self {
        Self {
            lambda_min: 200e-9,
            lambda_max: 2e-6,
            temperature: 6000.0,
            lambda_samples: 256,
        }
    }
}

impl SpectralModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max) {
            return Err(Error::Domain(
                "need 0 < lambda_min < lambda_max".into(),
            ));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Domain("temperature must be positive".into()));
        }
        if self.lambda_samples < 16 {
            return Err(Error::Domain("need at least 16 wavelength samples".into()));
        }
        Ok(())
    }

    /// Uniform wavelength nodes with trapezoid weights folded into the
    /// Planck radiance.
    fn weighted_nodes(&self) -> Vec<(f64, f64)> {
        let n = self.lambda_samples;
        let step = (self.lambda_max - self.lambda_min) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let lambda = self.lambda_min + i as f64 * step;
                let trapezoid = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                let weight = trapezoid * planck_radiance(lambda, self.temperature).unwrap();
                (lambda, weight)
            })
            .collect()
    }
}

/// Spectral energy density of a black body at the given wavelength.
pub fn planck_radiance(lambda: f64, temperature: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain("wavelength must be positive".into()));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain("temperature must be positive".into()));
    }
    let x = PLANCK_H * LIGHT_SPEED / (lambda * BOLTZMANN_K * temperature);
    if x > 700.0 {
        return Ok(0.0);
    }
    let prefactor = 8.0 * std::f64::consts::PI * PLANCK_H * LIGHT_SPEED / lambda.powi(5);
    Ok(prefactor / x.exp_m1())
}

/// How per-wavelength responses are combined into the polychromatic filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SpectralCombination {
    /// Radiance-weighted defocused OTF divided by the radiance-weighted
    /// aberration-free OTF. Reproduces the published sweep tables.
    #[default]
    FilterRatio,
    /// Radiance-weighted average of the per-wavelength transfer ratios.
    TransferAverage,
}

/// Frequency axis of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyAxis {
    /// Fraction of the incoherent cutoff.
    NormalizedToCutoff,
    /// Cycles per pixel, `u = rho * P`.
    CyclesPerPixel,
}

/// The camera and defocus condition a curve was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveContext {
    pub config: CameraConfig,
    pub state: DefocusState,
}

/// A sampled transfer-function curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtfCurve {
    pub axis: FrequencyAxis,
    /// (frequency, value) pairs with strictly increasing frequencies.
    pub samples: Vec<(f64, f64)>,
    pub context: Option<CurveContext>,
}

impl OtfCurve {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|&(u, _)| u)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|&(_, v)| v)
    }
}

/// Polychromatic defocusing filter with the default [`SpectralCombination`].
pub fn polychromatic_otf(
    config: &CameraConfig,
    state: &DefocusState,
    spectral: &SpectralModel,
    freq_samples: usize,
    quad: &QuadratureSpec,
) -> Result<OtfCurve> {
    polychromatic_otf_with(
        config,
        state,
        spectral,
        freq_samples,
        quad,
        SpectralCombination::FilterRatio,
    )
}

/// Polychromatic defocusing filter with an explicit combination rule.
pub fn polychromatic_otf_with(
    config: &CameraConfig,
    state: &DefocusState,
    spectral: &SpectralModel,
    freq_samples: usize,
    quad: &QuadratureSpec,
    combination: SpectralCombination,
) -> Result<OtfCurve> {
    if freq_samples < 32 {
        return Err(Error::Domain("need at least 32 frequency samples".into()));
    }
    spectral.validate()?;
    quad.validate()?;
    let optics = derive_optics(config)?;
    let nodes = spectral.weighted_nodes();
    let total_weight: f64 = nodes.iter().map(|&(_, w)| w).sum();
    if !(total_weight > 0.0) {
        return Err(Error::Domain(
            "spectral weights vanish over the requested band".into(),
        ));
    }
    let ar = state.wavefront_coefficient.abs();
    // s = rho * lambda * d_i / A with rho = u / P
    let s_per_lambda_u =
        optics.image_distance / (optics.aperture_diameter * config.pixel_pitch);

    let mut samples = Vec::with_capacity(freq_samples);
    for k in 0..freq_samples {
        let u = k as f64 / (freq_samples - 1) as f64;
        let value = match combination {
            SpectralCombination::FilterRatio => {
                let mut defocused = 0.0;
                let mut reference = 0.0;
                for &(lambda, w) in &nodes {
                    let s = u * lambda * s_per_lambda_u;
                    if s < 1.0 {
                        let severity = ar / lambda;
                        defocused += w
                            * defocused_otf_exact(s, severity, quad)
                            .map_err(|e| annotate(e, u, lambda))?;
                        reference += w * diffraction_otf(s)?;
                    }
                }
                if reference > 0.0 {
                    // |<w h_def>| <= <w h> holds exactly; clamp noise
                    (defocused / reference).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            }
            SpectralCombination::TransferAverage => {
                let mut acc = 0.0;
                for &(lambda, w) in &nodes {
                    let s = u * lambda * s_per_lambda_u;
                    if s < 1.0 {
                        let severity = ar / lambda;
                        let t = crate::mono::defocus_transfer(
                            s,
                            severity,
                            quad,
                            TransferMode::Exact,
                        )
                        .map_err(|e| annotate(e, u, lambda))?;
                        acc += w * t.value;
                    }
                }
                acc / total_weight
            }
        };
        samples.push((u, value));
    }
    Ok(OtfCurve {
        axis: FrequencyAxis::CyclesPerPixel,
        samples,
        context: Some(CurveContext {
            config: *config,
            state: *state,
        }),
    })
}

fn annotate(err: Error, u: f64, lambda: f64) -> Error {
    match err {
        Error::QuadratureNonConvergence(msg) => Error::QuadratureNonConvergence(format!(
            "{msg} (u = {u}, lambda = {lambda})"
        )),
        other => other,
    }
}

/// Modulation transfer function: pointwise absolute value of a curve.
pub fn mtf(curve: &OtfCurve) -> OtfCurve {
    OtfCurve {
        axis: curve.axis,
        samples: curve
            .samples
            .iter()
            .map(|&(u, v)| (u, v.abs()))
            .collect(),
        context: curve.context,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::coc_from_depth;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig5_config() -> CameraConfig {
        CameraConfig {
            focal_length: 15e-3,
            f_number: 1.4,
            focus_distance: 1.0,
            pixel_pitch: 5.6e-6,
        }
    }

    #[test]
    fn planck_reference_value() {
        let phi = planck_radiance(500e-9, 6000.0).unwrap();
        assert_relative_eq!(phi, 1.32158821963291e6, max_relative = 1e-10);
    }

    #[test]
    fn planck_peak_matches_wien_displacement() {
        let mut best = (0.0, 0.0);
        for i in 1..20000 {
            let lambda = 100e-9 + i as f64 * (3e-6 - 100e-9) / 20000.0;
            let phi = planck_radiance(lambda, 6000.0).unwrap();
            if phi > best.1 {
                best = (lambda, phi);
            }
        }
        let wien = 2.898e-3 / 6000.0;
        assert_abs_diff_eq!(best.0, wien, epsilon = 2e-9);
    }

    #[test]
    fn planck_positive_and_overflow_safe() {
        for &lambda in &[1e-9, 100e-9, 1e-6, 1e-3] {
            assert!(planck_radiance(lambda, 6000.0).unwrap() >= 0.0);
        }
        // deep Wien tail underflows to zero instead of overflowing
        assert_eq!(planck_radiance(1e-9, 1.0).unwrap(), 0.0);
        assert!(planck_radiance(0.0, 6000.0).is_err());
        assert!(planck_radiance(500e-9, 0.0).is_err());
    }

    #[test]
    fn zero_defocus_filter_ratio_is_all_pass() {
        let cfg = fig5_config();
        let state = coc_from_depth(&cfg, 0.0).unwrap();
        let curve = polychromatic_otf(
            &cfg,
            &state,
            &SpectralModel::default(),
            65,
            &QuadratureSpec::default(),
        )
        .unwrap();
        for (_, v) in curve.samples {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_defocus_transfer_average_tracks_surviving_weight() {
        // with the per-wavelength average, the zero-defocus curve equals the
        // spectral weight fraction below cutoff; for this wide-open config
        // every wavelength stays below cutoff across the whole band
        let cfg = fig5_config();
        let state = coc_from_depth(&cfg, 0.0).unwrap();
        let curve = polychromatic_otf_with(
            &cfg,
            &state,
            &SpectralModel::default(),
            65,
            &QuadratureSpec::default(),
            SpectralCombination::TransferAverage,
        )
        .unwrap();
        for (_, v) in curve.samples {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dc_normalization_for_any_state() {
        let cfg = fig5_config();
        for &dd in &[-0.1, -0.05, 0.02, 0.1] {
            let state = coc_from_depth(&cfg, dd).unwrap();
            for combination in [
                SpectralCombination::FilterRatio,
                SpectralCombination::TransferAverage,
            ] {
                let curve = polychromatic_otf_with(
                    &cfg,
                    &state,
                    &SpectralModel::default(),
                    33,
                    &QuadratureSpec::default(),
                    combination,
                )
                .unwrap();
                assert_abs_diff_eq!(curve.samples[0].1, 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn curve_magnitude_never_exceeds_unity() {
        let cfg = fig5_config();
        let state = coc_from_depth(&cfg, -0.1).unwrap();
        let curve = polychromatic_otf(
            &cfg,
            &state,
            &SpectralModel::default(),
            129,
            &QuadratureSpec::default(),
        )
        .unwrap();
        for (u, v) in curve.samples {
            assert!(v.abs() <= 1.0, "|H({u})| = {} exceeds 1", v.abs());
        }
    }

    #[test]
    fn bell_shape_in_the_small_defocus_regime() {
        // interior of the 0 < A_R < 0.15 P regime keeps the polychromatic
        // MTF monotone within 1e-3; at the 0.15 P boundary itself a faint
        // band-edge lobe already appears
        let cfg = fig5_config();
        let optics = derive_optics(&cfg).unwrap();
        for frac in [0.05, 0.10, 0.12] {
            let ar = frac * cfg.pixel_pitch;
            let state = DefocusState {
                depth_offset: 0.0,
                coc_diameter: ar / optics.ar_per_coc,
                wavefront_coefficient: ar,
            };
            let curve = mtf(&polychromatic_otf(
                &cfg,
                &state,
                &SpectralModel::default(),
                129,
                &QuadratureSpec::default(),
            )
            .unwrap());
            let values: Vec<f64> = curve.values().collect();
            for pair in values.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-3, "not bell-shaped: {pair:?}");
            }
        }
    }

    #[test]
    fn dirac_spectrum_matches_monochrome_transfer() {
        let cfg = fig5_config();
        let state = coc_from_depth(&cfg, -0.05).unwrap();
        let lambda0 = 550e-9;
        let spectral = SpectralModel {
            lambda_min: lambda0,
            lambda_max: lambda0 * (1.0 + 1e-9),
            temperature: 6000.0,
            lambda_samples: 16,
        };
        let quad = QuadratureSpec::default();
        let optics = derive_optics(&cfg).unwrap();
        for combination in [
            SpectralCombination::FilterRatio,
            SpectralCombination::TransferAverage,
        ] {
            let curve =
                polychromatic_otf_with(&cfg, &state, &spectral, 65, &quad, combination).unwrap();
            for &(u, v) in &curve.samples {
                let s = u * lambda0 * optics.image_distance
                    / (optics.aperture_diameter * cfg.pixel_pitch);
                let expected = if s < 1.0 {
                    crate::mono::defocus_transfer(
                        s,
                        state.wavefront_coefficient.abs() / lambda0,
                        &quad,
                        TransferMode::Exact,
                    )
                    .unwrap()
                    .value
                } else {
                    0.0
                };
                assert_abs_diff_eq!(v, expected, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn spectral_grid_convergence() {
        let cfg = fig5_config();
        let state = coc_from_depth(&cfg, -0.1).unwrap();
        let quad = QuadratureSpec::default();
        let coarse = polychromatic_otf(
            &cfg,
            &state,
            &SpectralModel {
                lambda_samples: 256,
                ..Default::default()
            },
            65,
            &quad,
        )
        .unwrap();
        let fine = polychromatic_otf(
            &cfg,
            &state,
            &SpectralModel {
                lambda_samples: 512,
                ..Default::default()
            },
            65,
            &quad,
        )
        .unwrap();
        for (a, b) in coarse.samples.iter().zip(&fine.samples) {
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-4);
        }
    }

    #[test]
    fn mtf_folds_negative_lobes_and_is_idempotent() {
        let curve = OtfCurve {
            axis: FrequencyAxis::CyclesPerPixel,
            samples: vec![(0.0, 1.0), (0.5, -0.2), (1.0, 0.05)],
            context: None,
        };
        let folded = mtf(&curve);
        assert_eq!(folded.samples[1].1, 0.2);
        assert_eq!(mtf(&folded), folded);
        // non-negative input is unchanged
        let positive = OtfCurve {
            axis: FrequencyAxis::CyclesPerPixel,
            samples: vec![(0.0, 1.0), (1.0, 0.3)],
            context: None,
        };
        assert_eq!(mtf(&positive), positive);
    }

    #[test]
    fn rejects_invalid_spectral_model() {
        let bad = SpectralModel {
            lambda_min: 2e-6,
            lambda_max: 200e-9,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let few = SpectralModel {
            lambda_samples: 8,
            ..Default::default()
        };
        assert!(few.validate().is_err());
    }
}
