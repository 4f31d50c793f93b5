//! Synthetic wideband channels and the measured-channel file format.
//!
//! Delay convention: a path arriving `tau` seconds after the reference
//! contributes `kappa * exp(-j 2 pi f tau)`. A sensor displaced towards the
//! source by `delta` metres sees the wave earlier, i.e. an extra factor
//! `exp(+j 2 pi f delta / c)`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::geometry::{sin_cos_deg, SensorArray};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("invalid wave: {0}")]
    InvalidWave(String),
    #[error("the scene contains no waves")]
    EmptyScene,
    #[error(
        "source distance {distance_m} m does not clear the array (max radius {max_radius_m} m)"
    )]
    SourceInsideArray { distance_m: f64, max_radius_m: f64 },
    #[error("snr must be finite or +inf, got {0}")]
    InvalidSnr(f64),
    #[error("channel csv line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("channel csv line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("channel has {found} sensors, geometry has {expected}")]
    SensorCount { expected: usize, found: usize },
    #[error("sensor {sensor} has {found} frequency samples, expected {expected}")]
    SampleCount {
        sensor: usize,
        expected: usize,
        found: usize,
    },
    #[error("frequency grid is not uniform: sample {index} is {found} Hz, expected {expected} Hz")]
    NonUniformGrid {
        index: usize,
        expected: f64,
        found: f64,
    },
    #[error("channel csv: {0}")]
    Io(#[from] std::io::Error),
}

/// `samples` points from `f_start_hz` to `f_start_hz + bandwidth_hz`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub f_start_hz: f64,
    pub bandwidth_hz: f64,
    pub samples: usize,
}

impl FrequencyGrid {
    pub fn new(f_start_hz: f64, bandwidth_hz: f64, samples: usize) -> Result<Self, ChannelError> {
        let grid = FrequencyGrid {
            f_start_hz,
            bandwidth_hz,
            samples,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.f_start_hz.is_finite() && self.f_start_hz > 0.0) {
            return Err(ChannelError::InvalidGrid(format!(
                "start frequency {}",
                self.f_start_hz
            )));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(ChannelError::InvalidGrid(format!(
                "bandwidth {}",
                self.bandwidth_hz
            )));
        }
        if self.samples < 2 {
            return Err(ChannelError::InvalidGrid(format!(
                "{} samples (need 2)",
                self.samples
            )));
        }
        Ok(())
    }

    pub fn step_hz(&self) -> f64 {
        self.bandwidth_hz / (self.samples - 1) as f64
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.f_start_hz + k as f64 * self.bandwidth_hz / (self.samples - 1) as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.frequency(k)).collect()
    }

    pub fn f_stop_hz(&self) -> f64 {
        self.f_start_hz + self.bandwidth_hz
    }

    pub fn center_hz(&self) -> f64 {
        self.f_start_hz + 0.5 * self.bandwidth_hz
    }

    pub fn delay_resolution_s(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    pub fn max_delay_s(&self) -> f64 {
        (self.samples - 1) as f64 / self.bandwidth_hz
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    pub azimuth_deg: f64,
    /// 90 degrees is the array plane.
    pub elevation_deg: f64,
    pub delay_s: f64,
    pub attenuation: f64,
    /// Used by the spherical model only. `None` means `c * delay`.
    pub source_distance_m: Option<f64>,
}

impl IncidentWave {
    pub fn new(azimuth_deg: f64, delay_s: f64) -> Self {
        IncidentWave {
            azimuth_deg,
            elevation_deg: 90.0,
            delay_s,
            attenuation: 1.0,
            source_distance_m: None,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |m: String| Err(ChannelError::InvalidWave(m));
        if !self.azimuth_deg.is_finite() || !self.elevation_deg.is_finite() {
            return bad("angles must be finite".into());
        }
        if !(self.delay_s.is_finite() && self.delay_s >= 0.0) {
            return bad(format!(
                "delay must be finite and non-negative, got {}",
                self.delay_s
            ));
        }
        if !(self.attenuation.is_finite() && self.attenuation > 0.0) {
            return bad(format!(
                "attenuation must be positive, got {}",
                self.attenuation
            ));
        }
        if let Some(d) = self.source_distance_m {
            if !(d > 0.0) {
                return bad(format!("source distance must be positive, got {d}"));
            }
        }
        Ok(())
    }

    pub fn distance_m(&self) -> f64 {
        self.source_distance_m
            .unwrap_or(SPEED_OF_LIGHT * self.delay_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    Spherical,
    PlaneWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelProvenance {
    Spherical,
    PlaneWave,
    Ingested,
}

/// Per-sensor frequency responses, row-major over (sensor, frequency).
/// Sensors follow the flattened ring order of the array.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub grid: FrequencyGrid,
    pub sensor_count: usize,
    pub values: Vec<Complex64>,
    pub provenance: ChannelProvenance,
}

impl ChannelMatrix {
    pub fn zeros(grid: FrequencyGrid, sensor_count: usize, provenance: ChannelProvenance) -> Self {
        ChannelMatrix {
            grid,
            sensor_count,
            values: vec![Complex64::new(0.0, 0.0); sensor_count * grid.samples],
            provenance,
        }
    }

    #[inline]
    pub fn get(&self, sensor: usize, k: usize) -> Complex64 {
        self.values[sensor * self.grid.samples + k]
    }

    pub fn row(&self, sensor: usize) -> &[Complex64] {
        let k = self.grid.samples;
        &self.values[sensor * k..(sensor + 1) * k]
    }

    /// Rows `start..start + count`, e.g. one ring of a concentric array.
    pub fn rows(&self, start: usize, count: usize) -> &[Complex64] {
        let k = self.grid.samples;
        &self.values[start * k..(start + count) * k]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn mean_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

#[inline]
fn path_term(amplitude: f64, f: f64, delay_s: f64, advance_m: f64) -> Complex64 {
    Complex64::from_polar(
        amplitude,
        2.0 * PI * f * (advance_m / SPEED_OF_LIGHT - delay_s),
    )
}

/// Response at the array centre: `kappa * exp(-j 2 pi f tau)`.
pub fn wave_response_center(wave: &IncidentWave, grid: &FrequencyGrid) -> Vec<Complex64> {
    (0..grid.samples)
        .map(|k| path_term(wave.attenuation, grid.frequency(k), wave.delay_s, 0.0))
        .collect()
}

/// Exact point-source model including the `d / d_p` spreading ratio.
pub fn synthesize_spherical(
    array: &SensorArray,
    wave: &IncidentWave,
    grid: &FrequencyGrid,
) -> Result<ChannelMatrix, ChannelError> {
    wave.validate()?;
    grid.validate()?;
    let d = wave.distance_m();
    let max_r = array.max_radius();
    if !(d.is_finite() && d > max_r) {
        return Err(ChannelError::SourceInsideArray {
            distance_m: d,
            max_radius_m: max_r,
        });
    }
    let (sin_el, _) = sin_cos_deg(wave.elevation_deg);
    let az = wave.azimuth_deg.to_radians();
    let mut out = ChannelMatrix::zeros(*grid, array.total_sensors(), ChannelProvenance::Spherical);
    let k = grid.samples;
    for (p, s) in array.sensors().enumerate() {
        let r = s.radius();
        let proj = sin_el * (az - s.azimuth()).cos();
        let d_p = (d * d + r * r - 2.0 * d * r * proj).sqrt();
        // d - d_p without cancellation
        let advance = (2.0 * d * r * proj - r * r) / (d + d_p);
        let amp = wave.attenuation * d / d_p;
        for (kk, v) in out.values[p * k..(p + 1) * k].iter_mut().enumerate() {
            *v = path_term(amp, grid.frequency(kk), wave.delay_s, advance);
        }
    }
    Ok(out)
}

/// Far-field model: unit spreading, linear phase across the aperture.
pub fn synthesize_planewave(
    array: &SensorArray,
    wave: &IncidentWave,
    grid: &FrequencyGrid,
) -> Result<ChannelMatrix, ChannelError> {
    wave.validate()?;
    grid.validate()?;
    let (sin_el, _) = sin_cos_deg(wave.elevation_deg);
    let az = wave.azimuth_deg.to_radians();
    let mut out = ChannelMatrix::zeros(*grid, array.total_sensors(), ChannelProvenance::PlaneWave);
    let k = grid.samples;
    for (p, s) in array.sensors().enumerate() {
        let advance = s.radius() * sin_el * (az - s.azimuth()).cos();
        for (kk, v) in out.values[p * k..(p + 1) * k].iter_mut().enumerate() {
            *v = path_term(wave.attenuation, grid.frequency(kk), wave.delay_s, advance);
        }
    }
    Ok(out)
}

/// Sum of the per-wave channels, in scene order.
pub fn superpose(
    scene: &[IncidentWave],
    array: &SensorArray,
    grid: &FrequencyGrid,
    model: ChannelModel,
) -> Result<ChannelMatrix, ChannelError> {
    let synth = |w: &IncidentWave| match model {
        ChannelModel::Spherical => synthesize_spherical(array, w, grid),
        ChannelModel::PlaneWave => synthesize_planewave(array, w, grid),
    };
    let (first, rest) = scene.split_first().ok_or(ChannelError::EmptyScene)?;
    let mut total = synth(first)?;
    for w in rest {
        let next = synth(w)?;
        total
            .values
            .iter_mut()
            .zip(&next.values)
            .for_each(|(a, b)| *a += b);
    }
    Ok(total)
}

/// Adds circular complex white Gaussian noise at `snr_db` relative to the
/// mean entry power. `f64::INFINITY` leaves the channel untouched.
pub fn add_awgn(
    channel: &ChannelMatrix,
    snr_db: f64,
    seed: u64,
) -> Result<ChannelMatrix, ChannelError> {
    if snr_db == f64::INFINITY {
        return Ok(channel.clone());
    }
    if !snr_db.is_finite() {
        return Err(ChannelError::InvalidSnr(snr_db));
    }
    let variance = channel.mean_power() / 10f64.powf(snr_db / 10.0);
    let normal =
        Normal::new(0.0, (0.5 * variance).sqrt()).map_err(|_| ChannelError::InvalidSnr(snr_db))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 << 32);
    let mut out = channel.clone();
    for v in out.values.iter_mut() {
        let re = normal.sample(&mut rng);
        let im = normal.sample(&mut rng);
        *v += Complex64::new(re, im);
    }
    Ok(out)
}

pub const CHANNEL_HEADER: &str = "p,f_hz,re,im";

pub fn channel_to_csv(channel: &ChannelMatrix) -> String {
    let mut out = String::with_capacity(80 * channel.values.len() + 16);
    out.push_str(CHANNEL_HEADER);
    out.push('\n');
    let freqs = channel.grid.frequencies();
    for p in 0..channel.sensor_count {
        for (k, v) in channel.row(p).iter().enumerate() {
            let _ = writeln!(out, "{p},{:.16e},{:.16e},{:.16e}", freqs[k], v.re, v.im);
        }
    }
    out
}

pub fn write_channel_csv(channel: &ChannelMatrix, path: &Path) -> Result<(), ChannelError> {
    std::fs::write(path, channel_to_csv(channel))?;
    Ok(())
}

/// Parses a channel file. When `expected_sensors` is given the sensor count
/// must match it. The frequency grid is inferred from the first sensor and
/// must be uniform to within `1e-6` of the step.
pub fn channel_from_csv(
    text: &str,
    expected_sensors: Option<usize>,
) -> Result<ChannelMatrix, ChannelError> {
    let perr = |line: usize, message: String| ChannelError::Parse { line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CHANNEL_HEADER => {}
        _ => return Err(perr(1, format!("expected header `{CHANNEL_HEADER}`"))),
    }

    let mut freqs: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
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
        let p: usize = cols[0]
            .trim()
            .parse()
            .map_err(|e| perr(line, format!("p: {e}")))?;
        let num = |s: &str, name: &str| -> Result<f64, ChannelError> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| perr(line, format!("{name}: {e}")))
        };
        let f = num(cols[1], "f_hz")?;
        let re = num(cols[2], "re")?;
        let im = num(cols[3], "im")?;
        if !(f.is_finite() && re.is_finite() && im.is_finite()) {
            return Err(ChannelError::NonFinite { line });
        }
        if p == freqs.len() {
            freqs.push(Vec::new());
        } else if p + 1 != freqs.len() {
            return Err(perr(line, format!("sensor {p} out of order")));
        }
        let row = freqs.last_mut().expect("row pushed above");
        if let Some(&last) = row.last() {
            if f <= last {
                return Err(perr(
                    line,
                    format!("frequency {f} not ascending for sensor {p}"),
                ));
            }
        }
        row.push(f);
        values.push(Complex64::new(re, im));
    }

    let sensor_count = freqs.len();
    if sensor_count == 0 {
        return Err(perr(2, "no data rows".into()));
    }
    if let Some(expected) = expected_sensors {
        if expected != sensor_count {
            return Err(ChannelError::SensorCount {
                expected,
                found: sensor_count,
            });
        }
    }
    let reference = &freqs[0];
    let samples = reference.len();
    for (sensor, row) in freqs.iter().enumerate() {
        if row.len() != samples {
            return Err(ChannelError::SampleCount {
                sensor,
                expected: samples,
                found: row.len(),
            });
        }
    }
    if samples < 2 {
        return Err(ChannelError::InvalidGrid(
            "need at least 2 frequency samples".into(),
        ));
    }
    let grid = FrequencyGrid::new(reference[0], reference[samples - 1] - reference[0], samples)?;
    let tol = 1e-6 * grid.step_hz();
    for row in &freqs {
        for (index, &found) in row.iter().enumerate() {
            let expected = grid.frequency(index);
            if (found - expected).abs() > tol {
                return Err(ChannelError::NonUniformGrid {
                    index,
                    expected,
                    found,
                });
            }
        }
    }
    Ok(ChannelMatrix {
        grid,
        sensor_count,
        values,
        provenance: ChannelProvenance::Ingested,
    })
}

pub fn read_channel_csv(
    path: &Path,
    expected_sensors: Option<usize>,
) -> Result<ChannelMatrix, ChannelError> {
    channel_from_csv(&std::fs::read_to_string(path)?, expected_sensors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_concentric, EllipseSpec, Provenance, Ring, Sensor};

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(28e9, 2e9, 100).unwrap()
    }

    fn single(x: f64, y: f64) -> SensorArray {
        SensorArray {
            rings: vec![Ring {
                spec: None,
                sensors: vec![Sensor::new(0, 0, x, y)],
            }],
            provenance: Provenance::Ingested,
        }
    }

    #[test]
    fn grid_layout() {
        let g = FrequencyGrid::new(58e9, 4e9, 200).unwrap();
        assert_eq!(g.frequency(0), 58e9);
        assert_eq!(g.frequency(199), 62e9);
        assert!((g.step_hz() - 4e9 / 199.0).abs() < 1e-3);
        assert_eq!(g.delay_resolution_s(), 0.25e-9);
        assert!(FrequencyGrid::new(1e9, 1e9, 1).is_err());
        assert!(FrequencyGrid::new(0.0, 1e9, 4).is_err());
    }

    #[test]
    fn center_response() {
        let g = grid();
        let ones = wave_response_center(&IncidentWave::new(10.0, 0.0), &g);
        assert!(ones.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let mut w = IncidentWave::new(0.0, 0.0);
        w.attenuation = 2.0;
        assert!(wave_response_center(&w, &g)
            .iter()
            .all(|v| *v == Complex64::new(2.0, 0.0)));

        let h = wave_response_center(&IncidentWave::new(0.0, 30e-9), &g);
        let want = -(2.0 * PI * 28e9 * 30e-9);
        assert!((h[0] - Complex64::from_polar(1.0, want)).norm() < 1e-12);
    }

    #[test]
    fn centre_sensor_sees_centre_response() {
        let arr = single(0.0, 0.0);
        let mut w = IncidentWave::new(33.0, 10e-9);
        w.source_distance_m = Some(2.0);
        let h = synthesize_spherical(&arr, &w, &grid()).unwrap();
        assert_eq!(h.row(0), wave_response_center(&w, &grid()).as_slice());
    }

    #[test]
    fn plane_wave_special_cases() {
        let g = grid();
        let arr = single(0.0, 0.5);
        let w = IncidentWave::new(0.0, 5e-9);
        let h = synthesize_planewave(&arr, &w, &g).unwrap();
        let c = wave_response_center(&w, &g);
        for (a, b) in h.row(0).iter().zip(&c) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut up = IncidentWave::new(0.0, 5e-9);
        up.elevation_deg = 0.0;
        let arr = single(0.3, 0.1);
        let h = synthesize_planewave(&arr, &up, &g).unwrap();
        assert_eq!(h.row(0), wave_response_center(&up, &g).as_slice());
    }

    #[test]
    fn spherical_limit_phase() {
        let g = grid();
        let arr = single(0.5, 0.0);
        let mut w = IncidentWave::new(0.0, 0.0);
        w.source_distance_m = Some(1e7);
        let h = synthesize_spherical(&arr, &w, &g).unwrap();
        let want = Complex64::from_polar(1.0, 2.0 * PI * g.frequency(0) * 0.5 / SPEED_OF_LIGHT);
        assert!((h.get(0, 0) - want).norm() < 1e-6);
    }

    #[test]
    fn source_inside_array() {
        let arr = build_concentric(&[EllipseSpec::circle(0.5, 8)]).unwrap();
        let mut w = IncidentWave::new(0.0, 0.0);
        w.source_distance_m = Some(0.4);
        assert!(matches!(
            synthesize_spherical(&arr, &w, &grid()),
            Err(ChannelError::SourceInsideArray { .. })
        ));
    }

    #[test]
    fn models_converge_with_distance() {
        let g = grid();
        let arr = build_concentric(&[EllipseSpec::ellipse(0.5, 0.7, 30.0, 64)]).unwrap();
        let mut errors = Vec::new();
        for ratio in [10.0, 100.0, 1000.0] {
            let mut w = IncidentWave::new(47.0, 0.0);
            w.source_distance_m = Some(0.5 * ratio);
            let s = synthesize_spherical(&arr, &w, &g).unwrap();
            let p = synthesize_planewave(&arr, &w, &g).unwrap();
            let worst = s
                .values
                .iter()
                .zip(&p.values)
                .map(|(a, b)| (a / b).arg().abs())
                .fold(0.0, f64::max);
            errors.push(worst);
        }
        // curvature error falls off like 1/d
        assert!(errors[0] > errors[1] && errors[1] > errors[2]);
        let ratio = errors[1] / errors[2];
        assert!((8.0..12.0).contains(&ratio), "{errors:?}");
    }

    #[test]
    fn negated_scene_cancels() {
        let g = grid();
        let arr = build_concentric(&[EllipseSpec::circle(0.2, 16)]).unwrap();
        let w = IncidentWave::new(12.0, 3e-9);
        let h = superpose(&[w, w], &arr, &g, ChannelModel::PlaneWave).unwrap();
        let s = synthesize_planewave(&arr, &w, &g).unwrap();
        for (a, b) in h.values.iter().zip(&s.values) {
            assert_eq!(*a, b + b);
        }
        assert!(superpose(&[], &arr, &g, ChannelModel::PlaneWave).is_err());
    }

    #[test]
    fn awgn_behaviour() {
        let g = FrequencyGrid::new(28e9, 2e9, 100).unwrap();
        let arr = build_concentric(&[EllipseSpec::circle(0.5, 1000)]).unwrap();
        let h = synthesize_planewave(&arr, &IncidentWave::new(90.0, 30e-9), &g).unwrap();
        assert_eq!(add_awgn(&h, f64::INFINITY, 1).unwrap(), h);
        assert!(add_awgn(&h, f64::NAN, 1).is_err());
        let a = add_awgn(&h, 0.0, 7).unwrap();
        assert_eq!(a, add_awgn(&h, 0.0, 7).unwrap());
        let noise: f64 = a
            .values
            .iter()
            .zip(&h.values)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            / h.values.len() as f64;
        let snr = 10.0 * (h.mean_power() / noise).log10();
        assert!(snr.abs() < 0.5, "snr {snr}");
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let g = FrequencyGrid::new(58e9, 4e9, 200).unwrap();
        let arr = build_concentric(&[EllipseSpec::ellipse(0.242, 0.7, 0.0, 8)]).unwrap();
        let h = synthesize_planewave(&arr, &IncidentWave::new(330.0, 4e-9), &g).unwrap();
        let text = channel_to_csv(&h);
        let back = channel_from_csv(&text, Some(8)).unwrap();
        assert_eq!(back.values, h.values);
        assert_eq!(back.grid.samples, 200);
        assert!((back.grid.bandwidth_hz - 4e9).abs() < 1.0);
        assert!((back.grid.step_hz() - 20.1e6).abs() < 0.1e6);

        assert!(matches!(
            channel_from_csv(&text, Some(9)),
            Err(ChannelError::SensorCount { .. })
        ));

        let short: String = text
            .lines()
            .filter(|l| !l.starts_with("3,"))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(channel_from_csv(&short, None).is_err());

        let mut rows: Vec<String> = text.lines().map(String::from).collect();
        let cols: Vec<String> = rows[2].split(',').map(String::from).collect();
        rows[2] = format!(
            "{},{:.16e},{},{}",
            cols[0],
            g.frequency(1) + 0.3 * g.step_hz(),
            cols[2],
            cols[3]
        );
        assert!(matches!(
            channel_from_csv(&rows.join("\n"), None),
            Err(ChannelError::NonUniformGrid { index: 1, .. })
        ));

        let mut rows: Vec<String> = text.lines().map(String::from).collect();
        let cols: Vec<String> = rows[5].split(',').map(String::from).collect();
        rows[5] = format!("{},{},NaN,{}", cols[0], cols[1], cols[3]);
        assert!(matches!(
            channel_from_csv(&rows.join("\n"), None),
            Err(ChannelError::NonFinite { line: 6 })
        ));
    }
}
