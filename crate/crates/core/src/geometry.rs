//! Sensor placement on (possibly rotated, perturbed, concentric) ellipses.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid ellipse: {0}")]
    InvalidSpec(String),
    #[error("a sensor array needs at least one ring")]
    EmptyArray,
    #[error("geometry csv line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("geometry csv: {0}")]
    Io(#[from] std::io::Error),
}

/// Placement recipe for one elliptical ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSpec {
    pub semi_major_m: f64,
    pub eccentricity: f64,
    /// Counter-clockwise rotation of the major axis, degrees in `[0, 360)`.
    pub rotation_deg: f64,
    pub sensor_count: usize,
    /// Total position-noise standard deviation; each axis gets `sigma / sqrt(2)`.
    pub position_noise_sigma_m: f64,
    pub noise_seed: u64,
}

impl EllipseSpec {
    pub fn circle(radius_m: f64, sensor_count: usize) -> Self {
        EllipseSpec {
            semi_major_m: radius_m,
            eccentricity: 0.0,
            rotation_deg: 0.0,
            sensor_count,
            position_noise_sigma_m: 0.0,
            noise_seed: 0,
        }
    }

    pub fn ellipse(
        semi_major_m: f64,
        eccentricity: f64,
        rotation_deg: f64,
        sensor_count: usize,
    ) -> Self {
        EllipseSpec {
            semi_major_m,
            eccentricity,
            rotation_deg,
            sensor_count,
            position_noise_sigma_m: 0.0,
            noise_seed: 0,
        }
    }

    pub fn with_noise(mut self, sigma_m: f64, seed: u64) -> Self {
        self.position_noise_sigma_m = sigma_m;
        self.noise_seed = seed;
        self
    }

    pub fn semi_minor_m(&self) -> f64 {
        self.semi_major_m * (1.0 - self.eccentricity * self.eccentricity).sqrt()
    }

    /// True when every sensor sits at the same radius.
    pub fn is_exact_circle(&self) -> bool {
        self.eccentricity == 0.0 && self.position_noise_sigma_m == 0.0
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |msg: String| Err(GeometryError::InvalidSpec(msg));
        if !(self.semi_major_m.is_finite() && self.semi_major_m > 0.0) {
            return bad(format!(
                "semi-major axis must be positive, got {}",
                self.semi_major_m
            ));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return bad(format!(
                "eccentricity must lie in [0, 1), got {}",
                self.eccentricity
            ));
        }
        if !(0.0..360.0).contains(&self.rotation_deg) {
            return bad(format!(
                "rotation must lie in [0, 360) degrees, got {}",
                self.rotation_deg
            ));
        }
        if self.sensor_count < 4 {
            return bad(format!(
                "at least 4 sensors per ring, got {}",
                self.sensor_count
            ));
        }
        if !(self.position_noise_sigma_m.is_finite() && self.position_noise_sigma_m >= 0.0) {
            return bad(format!(
                "position noise must be finite and non-negative, got {}",
                self.position_noise_sigma_m
            ));
        }
        Ok(())
    }
}

/// A realised sensor position. Polar coordinates are always derived from
/// the stored Cartesian pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensor {
    index: usize,
    ring: usize,
    x: f64,
    y: f64,
}

impl Sensor {
    pub fn new(ring: usize, index: usize, x: f64, y: f64) -> Self {
        Sensor { index, ring, x, y }
    }
    pub fn index(&self) -> usize {
        self.index
    }
    pub fn ring(&self) -> usize {
        self.ring
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    /// Distance from the array centre.
    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
    /// Polar azimuth in radians, `(-pi, pi]`.
    pub fn azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Built,
    Ingested,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    /// `None` for rings read from a file.
    pub spec: Option<EllipseSpec>,
    pub sensors: Vec<Sensor>,
}

impl Ring {
    pub fn len(&self) -> usize {
        self.sensors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }
    pub fn min_radius(&self) -> f64 {
        self.sensors
            .iter()
            .map(Sensor::radius)
            .fold(f64::INFINITY, f64::min)
    }
    pub fn max_radius(&self) -> f64 {
        self.sensors.iter().map(Sensor::radius).fold(0.0, f64::max)
    }
    /// `(a + b) / 2`, falling back to the radial extremes for ingested rings.
    pub fn mean_axis(&self) -> f64 {
        match &self.spec {
            Some(s) => 0.5 * (s.semi_major_m + s.semi_minor_m()),
            None => 0.5 * (self.min_radius() + self.max_radius()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorArray {
    pub rings: Vec<Ring>,
    pub provenance: Provenance,
}

impl SensorArray {
    pub fn total_sensors(&self) -> usize {
        self.rings.iter().map(Ring::len).sum()
    }
    /// All sensors, ring by ring.
    pub fn sensors(&self) -> impl Iterator<Item = &Sensor> {
        self.rings.iter().flat_map(|r| r.sensors.iter())
    }
    pub fn min_radius(&self) -> f64 {
        self.rings
            .iter()
            .map(Ring::min_radius)
            .fold(f64::INFINITY, f64::min)
    }
    pub fn max_radius(&self) -> f64 {
        self.rings.iter().map(Ring::max_radius).fold(0.0, f64::max)
    }
    /// Offset of ring `ring` in the flattened sensor order.
    pub fn ring_offset(&self, ring: usize) -> usize {
        self.rings[..ring].iter().map(Ring::len).sum()
    }
}

/// Sine and cosine of an angle in degrees, exact at multiples of 90.
pub(crate) fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let turns = deg.rem_euclid(360.0);
    if turns % 90.0 == 0.0 {
        match (turns / 90.0) as u8 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        deg.to_radians().sin_cos()
    }
}

fn place(spec: &EllipseSpec, ring: usize) -> Vec<Sensor> {
    let a = spec.semi_major_m;
    let b = spec.semi_minor_m();
    let (sa, ca) = sin_cos_deg(spec.rotation_deg);
    let count = spec.sensor_count;

    let mut noise = (spec.position_noise_sigma_m > 0.0).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.noise_seed);
        rng.set_stream(ring as u64);
        let normal = Normal::new(0.0, spec.position_noise_sigma_m / std::f64::consts::SQRT_2)
            .expect("finite sigma");
        (rng, normal)
    });

    (0..count)
        .map(|p| {
            let eta = 2.0 * std::f64::consts::PI * p as f64 / count as f64;
            let (se, ce) = eta.sin_cos();
            let mut x = a * ce * ca - b * se * sa;
            let mut y = a * ce * sa + b * se * ca;
            if let Some((rng, normal)) = noise.as_mut() {
                x += normal.sample(rng);
                y += normal.sample(rng);
            }
            Sensor::new(ring, p, x, y)
        })
        .collect()
}

/// Places `sensor_count` sensors at uniform elliptic angle `eta = 2 pi p / P`.
pub fn build_ellipse(spec: &EllipseSpec) -> Result<Vec<Sensor>, GeometryError> {
    spec.validate()?;
    Ok(place(spec, 0))
}

/// Counter-clockwise rotation about the origin.
pub fn rotate_sensors(sensors: &[Sensor], alpha_deg: f64) -> Vec<Sensor> {
    let (s, c) = sin_cos_deg(alpha_deg);
    sensors
        .iter()
        .map(|t| Sensor {
            x: t.x * c - t.y * s,
            y: t.x * s + t.y * c,
            ..*t
        })
        .collect()
}

/// Alternative rotation form:
/// `x' = x cos a - y sin a`, `y' = x sin a - y cos a`.
/// This is a rotation composed with a reflection, so it mirrors the array
/// across the x axis at `a = 0`. Kept for comparison only; placement uses
/// [`rotate_sensors`] semantics.
pub fn rotate_sensors_as_printed(sensors: &[Sensor], alpha_deg: f64) -> Vec<Sensor> {
    let (s, c) = sin_cos_deg(alpha_deg);
    sensors
        .iter()
        .map(|t| Sensor {
            x: t.x * c - t.y * s,
            y: t.x * s - t.y * c,
            ..*t
        })
        .collect()
}

/// Realises each spec as its own ring, in list order.
pub fn build_concentric(specs: &[EllipseSpec]) -> Result<SensorArray, GeometryError> {
    if specs.is_empty() {
        return Err(GeometryError::EmptyArray);
    }
    let mut rings = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        spec.validate()?;
        rings.push(Ring {
            spec: Some(*spec),
            sensors: place(spec, i),
        });
    }
    Ok(SensorArray {
        rings,
        provenance: Provenance::Built,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingSpacing {
    pub ring: usize,
    pub max_spacing_m: f64,
    pub max_spacing_wavelengths: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NyquistReport {
    pub f_max_hz: f64,
    pub wavelength_m: f64,
    pub rings: Vec<RingSpacing>,
}

impl NyquistReport {
    pub fn pass(&self) -> bool {
        self.rings.iter().all(|r| r.pass)
    }
    pub fn worst_spacing_wavelengths(&self) -> f64 {
        self.rings
            .iter()
            .map(|r| r.max_spacing_wavelengths)
            .fold(0.0, f64::max)
    }
}

/// Largest cyclic gap between consecutive sensors of each ring, against
/// half a wavelength at `f_max_hz`.
pub fn nyquist_audit(array: &SensorArray, f_max_hz: f64) -> NyquistReport {
    let wavelength = SPEED_OF_LIGHT / f_max_hz;
    let rings = array
        .rings
        .iter()
        .enumerate()
        .map(|(i, ring)| {
            let s = &ring.sensors;
            let gap = (0..s.len())
                .map(|p| {
                    let q = (p + 1) % s.len();
                    (s[q].x - s[p].x).hypot(s[q].y - s[p].y)
                })
                .fold(0.0, f64::max);
            RingSpacing {
                ring: i,
                max_spacing_m: gap,
                max_spacing_wavelengths: gap / wavelength,
                pass: gap < 0.5 * wavelength,
            }
        })
        .collect();
    NyquistReport {
        f_max_hz,
        wavelength_m: wavelength,
        rings,
    }
}

pub const GEOMETRY_HEADER: &str = "ring,p,x_m,y_m";

pub fn geometry_to_csv(array: &SensorArray) -> String {
    let mut out = String::with_capacity(64 * array.total_sensors() + 16);
    out.push_str(GEOMETRY_HEADER);
    out.push('\n');
    for s in array.sensors() {
        let _ = writeln!(out, "{},{},{:.16e},{:.16e}", s.ring, s.index, s.x, s.y);
    }
    out
}

pub fn write_geometry_csv(array: &SensorArray, path: &Path) -> Result<(), GeometryError> {
    std::fs::write(path, geometry_to_csv(array))?;
    Ok(())
}

/// Rows must be grouped by ring (0, 1, ...) with `p` counting up from 0.
pub fn geometry_from_csv(text: &str) -> Result<SensorArray, GeometryError> {
    let perr = |line: usize, message: String| GeometryError::Parse { line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == GEOMETRY_HEADER => {}
        _ => return Err(perr(1, format!("expected header `{GEOMETRY_HEADER}`"))),
    }
    let mut rings: Vec<Ring> = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split(',').collect();
        if cols.len() != 4 {
            return Err(perr(
                line,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let ring: usize = cols[0]
            .trim()
            .parse()
            .map_err(|e| perr(line, format!("ring: {e}")))?;
        let p: usize = cols[1]
            .trim()
            .parse()
            .map_err(|e| perr(line, format!("p: {e}")))?;
        let x: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|e| perr(line, format!("x_m: {e}")))?;
        let y: f64 = cols[3]
            .trim()
            .parse()
            .map_err(|e| perr(line, format!("y_m: {e}")))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(perr(line, "non-finite coordinate".into()));
        }
        if ring == rings.len() {
            rings.push(Ring {
                spec: None,
                sensors: Vec::new(),
            });
        } else if ring + 1 != rings.len() {
            return Err(perr(line, format!("ring {ring} out of order")));
        }
        let current = rings.last_mut().expect("ring pushed above");
        if p != current.sensors.len() {
            return Err(perr(
                line,
                format!("sensor index {p} out of order in ring {ring}"),
            ));
        }
        current.sensors.push(Sensor::new(ring, p, x, y));
    }
    if rings.is_empty() {
        return Err(GeometryError::EmptyArray);
    }
    Ok(SensorArray {
        rings,
        provenance: Provenance::Ingested,
    })
}

pub fn read_geometry_csv(path: &Path) -> Result<SensorArray, GeometryError> {
    geometry_from_csv(&std::fs::read_to_string(path)?)
}
