//! Joint direction-of-arrival and time-of-arrival estimation with wideband
//! elliptical sensor arrays, using phase-mode expansion and
//! frequency-invariant Bessel filters.
//!
//! The processing chain is
//! [`geometry`] -> [`channel`] -> [`beamform`] -> [`spectrum`], with
//! [`scenario`] wiring it to configuration files, presets and sweeps.

pub mod beamform;
pub mod channel;
pub mod geometry;
pub mod scenario;
pub mod specfun;
pub mod spectrum;

pub use beamform::{
    concentric_expand, make_filter, mode_limit, phase_mode_expand, BeamformError, FilterBank,
    FilterDesign, ModeMatrix, ModeRange, Reduction,
};
pub use channel::{
    add_awgn, superpose, synthesize_planewave, synthesize_spherical, wave_response_center,
    ChannelError, ChannelMatrix, ChannelModel, FrequencyGrid, IncidentWave,
};
pub use geometry::{
    build_concentric, build_ellipse, nyquist_audit, rotate_sensors, EllipseSpec, GeometryError,
    Sensor, SensorArray,
};
pub use scenario::{Scenario, ScenarioConfig};
pub use specfun::{bessel_j, bessel_j_prime, BesselEval, SpecfunError};
pub use spectrum::{
    find_peaks, joint_spectrum, Exclusion, JointSpectrum, PeakReport, SpectrumError,
};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("validation: {0}")]
    Validation(String),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("beamform: {0}")]
    Beamform(#[from] BeamformError),
    #[error("spectrum: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error("specfun: {0}")]
    Specfun(#[from] SpecfunError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status: 1 for unreadable or malformed input, 2 for
    /// inputs that parse but are rejected, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 1,
            Error::Validation(_) => 2,
            Error::Geometry(e) => match e {
                GeometryError::Parse { .. } | GeometryError::Io(_) => 1,
                GeometryError::InvalidSpec(_) | GeometryError::EmptyArray => 2,
            },
            Error::Channel(e) => match e {
                ChannelError::Parse { .. }
                | ChannelError::NonFinite { .. }
                | ChannelError::Io(_) => 1,
                _ => 2,
            },
            Error::Beamform(e) => match e {
                BeamformError::Instability { .. } | BeamformError::Specfun(_) => 3,
                BeamformError::Reduction(_) | BeamformError::Mismatch(_) => 2,
            },
            Error::Spectrum(e) => match e {
                SpectrumError::Degenerate | SpectrumError::NonFinite => 3,
                SpectrumError::InvalidPad => 2,
                SpectrumError::Io(_) => 1,
            },
            Error::Specfun(_) => 3,
        }
    }
}
