//! Defocused optical transfer functions for circular-pupil,
//! diffraction-limited imaging systems.
//!
//! The crate covers the full chain from thin-lens geometry to camera-design
//! tables:
//!
//! 1. **Geometry** ([`geometry`]): thin-lens law, circle of confusion,
//!    depth-blur mapping, the linear link between blur diameter and the
//!    defocus wavefront coefficient, and the quadratic focal-length solve.
//! 2. **Monochrome OTF** ([`mono`]): the exact defocused OTF as an
//!    oscillatory integral with adaptive Gauss-Legendre quadrature, the
//!    closed-form chord approximation, fringe/zero-crossing prediction, and
//!    a numeric root finder.
//! 3. **Polychromatic filter** ([`spectral`]): Planck black-body radiance
//!    and the wavelength-averaged defocusing filter on the cycles-per-pixel
//!    axis.
//! 4. **Gaussian model** ([`fit`]): equal-area fitting of
//!    `exp(-sigma^2 rho^2 / 2)` with MAE/RMSE fit metrics.
//! 5. **Settings sweep** ([`sweep`]): enumeration of camera-setting grids,
//!    per-record blur/error maxima, acceptance filters, and CSV/JSON
//!    tables.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example thin_lens_geometry
//! cargo run --release --example mono_otf_curves
//! cargo run --release --example fringe_zeros
//! cargo run --release --example chord_exponent
//! cargo run --release --example blackbody_spectrum
//! cargo run --release --example polychromatic_mtf
//! cargo run --release --example gaussian_fit_demo
//! cargo run --release --example depth_blur_profile
//! cargo run --release --example settings_sweep_reduced
//! ```
//!
//! A thin `defocus` binary exposes the same pipeline for scripting; see the
//! [`cli`] module or `defocus --help`.
//!
//! # Quick start
//!
//! ```
//! use defocus_optics::geometry::{coc_from_depth, CameraConfig};
//! use defocus_optics::fit::fit_sigma_equal_area;
//! use defocus_optics::quadrature::QuadratureSpec;
//! use defocus_optics::spectral::{mtf, polychromatic_otf, SpectralModel};
//!
//! let config = CameraConfig {
//!     focal_length: 15e-3,
//!     f_number: 1.4,
//!     focus_distance: 1.0,
//!     pixel_pitch: 5.6e-6,
//! };
//! // a scene point 10 cm nearer than the focused plane
//! let state = coc_from_depth(&config, -0.1).unwrap();
//! let curve = polychromatic_otf(
//!     &config,
//!     &state,
//!     &SpectralModel { lambda_samples: 64, ..Default::default() },
//!     65,
//!     &QuadratureSpec::default(),
//! )
//! .unwrap();
//! let fit = fit_sigma_equal_area(&mtf(&curve)).unwrap();
//! assert!(fit.sigma > 0.0 && fit.mae <= fit.rmse);
//! ```

pub mod cli;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod mono;
pub mod quadrature;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use fit::{fit_sigma_equal_area, GaussianFitResult};
pub use geometry::{coc_from_depth, derive_optics, CameraConfig, DefocusState, DerivedOptics};
pub use mono::{defocused_otf_exact, diffraction_otf, TransferMode};
pub use quadrature::QuadratureSpec;
pub use spectral::{mtf, planck_radiance, polychromatic_otf, OtfCurve, SpectralModel};
pub use sweep::{run_sweep, FilterCriteria, SweepGrid, SweepRecord};
