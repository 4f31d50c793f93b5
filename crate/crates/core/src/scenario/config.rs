//! Scenario files (TOML) and their resolution into library types.
//!
//! ```toml
//! name = "example"
//!
//! [[array.rings]]
//! semi_major_m = 0.5
//! eccentricity = 0.7          # default 0
//! rotation_deg = 0.0          # default 0
//! sensors = 720
//! position_noise_sigma_wavelengths = 0.5   # or position_noise_sigma_m
//!
//! [grid]
//! f_start_hz = 28e9
//! bandwidth_hz = 2e9
//! samples = 100
//!
//! [[scene.waves]]
//! azimuth_deg = 90.0
//! delay_s = 30e-9
//! elevation_deg = 90.0        # default 90
//! attenuation = 1.0           # default 1
//! source_distance_m = 9.0     # spherical model only, default c * delay
//!
//! [processing]                # every key optional
//! model = "plane-wave"        # or "spherical"
//! design = "robust"           # "plain", "average"
//! mode_half_width = 125       # absent: largest stable value
//! mode_threshold = 1e-6
//! reduction = "auto"          # "none", "parity", "symmetric"
//! pad_az = 1
//! pad_delay = 1
//! exclusion_az_bins = 2
//! exclusion_delay_bins = 2
//! peak_search = "expected"    # or "global"
//! top_peaks = 5
//! snr_db = 10.0               # absent: noiseless
//! seed = 0
//! allow_undersampled = false
//! force_modes = false
//! sensor_mode_threshold = 1e-3  # absent: every sensor serves every mode
//!
//! [output]
//! dir = "out"
//! spectrum_csv = true
//! heatmap = true
//! report = true
//! manifest = true
//! geometry_csv = false
//! channel_csv = false
//!
//! [sweep]                     # only read by `sweep`
//! axis = "azimuth_deg"
//! start = -90.0
//! stop = 90.0
//! step = 5.0                  # or: values = [...]
//! seeds = [1, 2, 3]           # optional, results averaged over seeds
//!
//! [[sweep.series]]            # optional
//! label = "e=0.7"
//! eccentricity = 0.7
//! mode_half_width = 180
//! ```
//!
//! A `[run]` table, as written into manifests, is accepted and ignored.

use serde::{Deserialize, Serialize};

use crate::beamform::{FilterDesign, ModeRange, Reduction};
use crate::channel::{ChannelModel, FrequencyGrid, IncidentWave};
use crate::geometry::EllipseSpec;
use crate::spectrum::Exclusion;
use crate::{Error, SPEED_OF_LIGHT};

fn yes() -> bool {
    true
}
fn ninety() -> f64 {
    90.0
}
fn one_f() -> f64 {
    1.0
}
fn one_u() -> usize {
    1
}
fn two_u() -> usize {
    2
}
fn five_u() -> usize {
    5
}
fn default_threshold() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub array: ArrayConfig,
    pub grid: GridConfig,
    pub scene: SceneConfig,
    #[serde(default)]
    pub processing: ProcessingConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Provenance block of a manifest. Ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<toml::Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub rings: Vec<RingConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub semi_major_m: f64,
    #[serde(default)]
    pub eccentricity: f64,
    #[serde(default)]
    pub rotation_deg: f64,
    pub sensors: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_noise_sigma_m: Option<f64>,
    /// Measured in wavelengths at the band centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_noise_sigma_wavelengths: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub f_start_hz: f64,
    pub bandwidth_hz: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub waves: Vec<WaveConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub azimuth_deg: f64,
    pub delay_s: f64,
    #[serde(default = "ninety")]
    pub elevation_deg: f64,
    #[serde(default = "one_f")]
    pub attenuation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_distance_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    #[default]
    PlaneWave,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DesignName {
    Plain,
    #[default]
    Robust,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionName {
    #[default]
    Auto,
    None,
    Parity,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PeakSearch {
    /// Main peak is the strongest bin near the first wave's true location.
    #[default]
    Expected,
    /// Main peak is the global maximum.
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessingConfig {
    #[serde(default)]
    pub model: ModelName,
    #[serde(default)]
    pub design: DesignName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_half_width: Option<usize>,
    #[serde(default = "default_threshold")]
    pub mode_threshold: f64,
    #[serde(default)]
    pub reduction: ReductionName,
    #[serde(default = "one_u")]
    pub pad_az: usize,
    #[serde(default = "one_u")]
    pub pad_delay: usize,
    #[serde(default = "two_u")]
    pub exclusion_az_bins: usize,
    #[serde(default = "two_u")]
    pub exclusion_delay_bins: usize,
    #[serde(default)]
    pub peak_search: PeakSearch,
    #[serde(default = "five_u")]
    pub top_peaks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_undersampled: bool,
    #[serde(default)]
    pub force_modes: bool,
    /// Per-sensor version of `mode_threshold`: a sensor only contributes
    /// to modes that pass the stability test at its own radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_mode_threshold: Option<f64>,
}

impl Default for ProcessingConfig {
    fn default() -> Self {
        toml::from_str("").expect("all processing keys have defaults")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub spectrum_csv: bool,
    #[serde(default = "yes")]
    pub heatmap: bool,
    #[serde(default = "yes")]
    pub report: bool,
    #[serde(default = "yes")]
    pub manifest: bool,
    #[serde(default)]
    pub geometry_csv: bool,
    #[serde(default)]
    pub channel_csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        toml::from_str("").expect("all output keys have defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    AzimuthDeg,
    ElevationDeg,
    DelayS,
    Eccentricity,
    RotationDeg,
    PositionNoiseSigmaWavelengths,
    SnrDb,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::AzimuthDeg => "azimuth_deg",
            SweepAxis::ElevationDeg => "elevation_deg",
            SweepAxis::DelayS => "delay_s",
            SweepAxis::Eccentricity => "eccentricity",
            SweepAxis::RotationDeg => "rotation_deg",
            SweepAxis::PositionNoiseSigmaWavelengths => "position_noise_sigma_wavelengths",
            SweepAxis::SnrDb => "snr_db",
        }
    }

    /// True when the axis leaves the array and filter bank untouched.
    pub fn scene_only(&self) -> bool {
        matches!(
            self,
            SweepAxis::AzimuthDeg | SweepAxis::ElevationDeg | SweepAxis::DelayS | SweepAxis::SnrDb
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eccentricity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_half_width: Option<usize>,
}

impl SweepConfig {
    /// Axis values, either listed or generated from `start..=stop` by `step`.
    pub fn axis_values(&self) -> Result<Vec<f64>, Error> {
        let bad = |m: &str| Err(Error::Validation(format!("sweep: {m}")));
        match (&self.values, self.start, self.stop, self.step) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    return bad("`values` is empty");
                }
                Ok(v.clone())
            }
            (None, Some(a), Some(b), Some(s)) => {
                if !(s > 0.0 && a.is_finite() && b.is_finite() && b >= a) {
                    return bad("need start <= stop and step > 0");
                }
                let n = ((b - a) / s + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| a + i as f64 * s).collect())
            }
            _ => bad("give either `values` or all of `start`, `stop`, `step`"),
        }
    }
}

impl ScenarioConfig {
    /// Parses a scenario file. Errors carry the line and column.
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks values and converts to library types.
    pub fn resolve(&self) -> Result<Scenario, Error> {
        let bad = |m: String| Err(Error::Validation(m));
        let g = &self.grid;
        let grid = FrequencyGrid::new(g.f_start_hz, g.bandwidth_hz, g.samples)?;
        let wavelength = SPEED_OF_LIGHT / grid.center_hz();
        let p = &self.processing;

        if self.array.rings.is_empty() {
            return bad("array needs at least one ring".into());
        }
        let mut rings = Vec::with_capacity(self.array.rings.len());
        for (i, r) in self.array.rings.iter().enumerate() {
            let sigma = match (r.position_noise_sigma_m, r.position_noise_sigma_wavelengths) {
                (Some(_), Some(_)) => {
                    return bad(format!(
                        "ring {i}: give the noise sigma in metres or in wavelengths, not both"
                    ))
                }
                (Some(m), None) => m,
                (None, Some(w)) => w * wavelength,
                (None, None) => 0.0,
            };
            let spec = EllipseSpec {
                semi_major_m: r.semi_major_m,
                eccentricity: r.eccentricity,
                rotation_deg: r.rotation_deg,
                sensor_count: r.sensors,
                position_noise_sigma_m: sigma,
                noise_seed: p.seed,
            };
            spec.validate()?;
            rings.push(spec);
        }

        if self.scene.waves.is_empty() {
            return bad("scene needs at least one wave".into());
        }
        let waves = self
            .scene
            .waves
            .iter()
            .map(|w| {
                let wave = IncidentWave {
                    azimuth_deg: w.azimuth_deg,
                    elevation_deg: w.elevation_deg,
                    delay_s: w.delay_s,
                    attenuation: w.attenuation,
                    source_distance_m: w.source_distance_m,
                };
                wave.validate().map(|_| wave)
            })
            .collect::<Result<Vec<_>, _>>()?;

        if !(p.mode_threshold > 0.0) {
            return bad(format!(
                "mode_threshold must be positive, got {}",
                p.mode_threshold
            ));
        }
        if let Some(t) = p.sensor_mode_threshold {
            if !(t > 0.0) {
                return bad(format!("sensor_mode_threshold must be positive, got {t}"));
            }
        }
        if p.pad_az == 0 || p.pad_delay == 0 {
            return bad("pad factors must be at least 1".into());
        }
        if let Some(s) = p.snr_db {
            if s.is_nan() || s == f64::NEG_INFINITY {
                return bad(format!("snr_db must be finite or +inf, got {s}"));
            }
        }

        Ok(Scenario {
            rings,
            grid,
            waves,
            model: match p.model {
                ModelName::PlaneWave => ChannelModel::PlaneWave,
                ModelName::Spherical => ChannelModel::Spherical,
            },
            design: match p.design {
                DesignName::Plain => FilterDesign::Plain,
                DesignName::Robust => FilterDesign::Robust,
                DesignName::Average => FilterDesign::Average,
            },
            modes: p.mode_half_width.map(ModeRange::new),
            mode_threshold: p.mode_threshold,
            reduction: match p.reduction {
                ReductionName::Auto => None,
                ReductionName::None => Some(Reduction::None),
                ReductionName::Parity => Some(Reduction::Parity),
                ReductionName::Symmetric => Some(Reduction::Symmetric),
            },
            pad_az: p.pad_az,
            pad_delay: p.pad_delay,
            exclusion: Exclusion {
                az_bins: p.exclusion_az_bins,
                delay_bins: p.exclusion_delay_bins,
            },
            peak_search: p.peak_search,
            top_peaks: p.top_peaks,
            snr_db: p.snr_db,
            seed: p.seed,
            allow_undersampled: p.allow_undersampled,
            force_modes: p.force_modes,
            sensor_mode_threshold: p.sensor_mode_threshold,
        })
    }
}

/// A validated scenario in library terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rings: Vec<EllipseSpec>,
    pub grid: FrequencyGrid,
    pub waves: Vec<IncidentWave>,
    pub model: ChannelModel,
    pub design: FilterDesign,
    /// `None` selects the largest stable mode range.
    pub modes: Option<ModeRange>,
    pub mode_threshold: f64,
    /// `None` picks the strongest reduction the geometry allows.
    pub reduction: Option<Reduction>,
    pub pad_az: usize,
    pub pad_delay: usize,
    pub exclusion: Exclusion,
    pub peak_search: PeakSearch,
    pub top_peaks: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub allow_undersampled: bool,
    pub force_modes: bool,
    pub sensor_mode_threshold: Option<f64>,
}

impl Scenario {
    /// Sets the master seed, which drives sensor perturbations and noise.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        for r in &mut self.rings {
            r.noise_seed = seed;
        }
    }

    pub fn wavelength_at_center(&self) -> f64 {
        SPEED_OF_LIGHT / self.grid.center_hz()
    }
}
