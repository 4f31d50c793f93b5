//! Joint azimuth-delay spectrum, peak search and the main-to-artifact ratio.
//!
//! Azimuth bin `q` sits at `q * 360 / (M * pad_az)` degrees. Delay bin `t`
//! sits at `t / (B * pad_delay)` seconds, measured relative to the first
//! frequency sample, so the carrier does not shift the delay axis. The delay
//! axis has `(K - 1) * pad_delay` bins; with no padding the last frequency
//! sample aliases onto the first, since it is exactly one period away.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::beamform::ModeMatrix;
use crate::channel::FrequencyGrid;

/// Lower end of the heatmap dynamic range, dB below the main peak.
pub const HEATMAP_FLOOR_DB: f64 = -35.0;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("spectrum is identically zero")]
    Degenerate,
    #[error("zero-padding factors must be at least 1")]
    InvalidPad,
    #[error("mode matrix contains non-finite values")]
    NonFinite,
    #[error("spectrum output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub grid: FrequencyGrid,
    pub mode_count: usize,
    pub pad_az: usize,
    pub pad_delay: usize,
    pub az_bins: usize,
    pub delay_bins: usize,
    /// Row-major: azimuth rows, delay columns.
    pub magnitude: Vec<f64>,
}

impl JointSpectrum {
    pub fn get(&self, q: usize, t: usize) -> f64 {
        self.magnitude[q * self.delay_bins + t]
    }
    pub fn azimuth_deg(&self, q: usize) -> f64 {
        q as f64 * 360.0 / self.az_bins as f64
    }
    pub fn delay_s(&self, t: usize) -> f64 {
        t as f64 / (self.grid.bandwidth_hz * self.pad_delay as f64)
    }
    /// Bin nearest to `(azimuth_deg, delay_s)`; azimuth wraps, delay clamps.
    pub fn nearest_bin(&self, azimuth_deg: f64, delay_s: f64) -> (usize, usize) {
        let q = (azimuth_deg.rem_euclid(360.0) * self.az_bins as f64 / 360.0).round() as usize
            % self.az_bins;
        let t = (delay_s * self.grid.bandwidth_hz * self.pad_delay as f64).round();
        let t = t.clamp(0.0, (self.delay_bins - 1) as f64) as usize;
        (q, t)
    }
    pub fn max(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

/// Two-dimensional transform of the mode matrix: forward over modes,
/// `exp(+j 2 pi (f - f0) tau)` over frequency.
pub fn joint_spectrum(
    modes: &ModeMatrix,
    pad_az: usize,
    pad_delay: usize,
) -> Result<JointSpectrum, SpectrumError> {
    if pad_az == 0 || pad_delay == 0 {
        return Err(SpectrumError::InvalidPad);
    }
    if modes
        .values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(SpectrumError::NonFinite);
    }
    let nm = modes.modes.count();
    let nk = modes.grid.samples;
    let na = nm * pad_az;
    let nd = (nk - 1) * pad_delay;
    let zero = Complex64::new(0.0, 0.0);

    let mut buf = vec![zero; na * nd];
    for (mi, m) in modes.modes.modes().enumerate() {
        let q = m.rem_euclid(na as i64) as usize;
        let row = &mut buf[q * nd..(q + 1) * nd];
        for (k, v) in modes.values[mi * nk..(mi + 1) * nk].iter().enumerate() {
            row[k % nd] += v;
        }
    }

    let mut planner = FftPlanner::<f64>::new();
    let delay_fft = planner.plan_fft_inverse(nd);
    for row in buf.chunks_exact_mut(nd) {
        delay_fft.process(row);
    }
    let az_fft = planner.plan_fft_forward(na);
    let mut column = vec![zero; na];
    for t in 0..nd {
        for q in 0..na {
            column[q] = buf[q * nd + t];
        }
        az_fft.process(&mut column);
        for q in 0..na {
            buf[q * nd + t] = column[q];
        }
    }

    Ok(JointSpectrum {
        grid: modes.grid,
        mode_count: nm,
        pad_az,
        pad_delay,
        az_bins: na,
        delay_bins: nd,
        magnitude: buf.iter().map(|v| v.norm()).collect(),
    })
}

/// Half-widths, in unpadded bins, of the neighbourhood around the main
/// peak that is not searched for artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exclusion {
    pub az_bins: usize,
    pub delay_bins: usize,
}

impl Default for Exclusion {
    fn default() -> Self {
        Exclusion {
            az_bins: 2,
            delay_bins: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub az_bin: usize,
    pub delay_bin: usize,
    pub azimuth_deg: f64,
    pub delay_s: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub main: Peak,
    pub artifact: Option<Peak>,
    /// `20 log10(main / artifact)`; infinite when nothing qualifies.
    pub delta_db: f64,
    /// Local maxima by decreasing magnitude, at most the requested count.
    pub ranked: Vec<Peak>,
}

fn peak(s: &JointSpectrum, q: usize, t: usize) -> Peak {
    Peak {
        az_bin: q,
        delay_bin: t,
        azimuth_deg: s.azimuth_deg(q),
        delay_s: s.delay_s(t),
        magnitude: s.get(q, t),
    }
}

fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Bins strictly above all eight neighbours. Azimuth wraps; delay
/// neighbours beyond either end are skipped.
pub fn local_maxima(s: &JointSpectrum) -> Vec<(usize, usize)> {
    let (na, nd) = (s.az_bins, s.delay_bins);
    let mut out = Vec::new();
    for q in 0..na {
        for t in 0..nd {
            let v = s.get(q, t);
            let mut is_max = true;
            'scan: for dq in [na - 1, 0, 1] {
                let qq = (q + dq) % na;
                for dt in [-1i64, 0, 1] {
                    let tt = t as i64 + dt;
                    if tt < 0 || tt >= nd as i64 || (qq == q && dt == 0) {
                        continue;
                    }
                    if !(v > s.get(qq, tt as usize)) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if is_max {
                out.push((q, t));
            }
        }
    }
    out
}

/// Main peak, largest artifact outside the exclusion window and the ratio
/// between them. With `expected`, the main peak is the strongest bin inside
/// the window around the bin nearest to it; otherwise the global maximum.
/// Ties go to the lowest `(azimuth, delay)` index.
pub fn find_peaks(
    s: &JointSpectrum,
    expected: Option<(f64, f64)>,
    exclusion: Exclusion,
    top_n: usize,
) -> Result<PeakReport, SpectrumError> {
    if !(s.max() > 0.0) {
        return Err(SpectrumError::Degenerate);
    }
    let wa = exclusion.az_bins * s.pad_az;
    let wd = exclusion.delay_bins * s.pad_delay;
    let inside = |q: usize, t: usize, q0: usize, t0: usize| {
        cyclic_distance(q, q0, s.az_bins) <= wa && t.abs_diff(t0) <= wd
    };

    let mut best = (0usize, 0usize);
    let mut best_v = -1.0;
    for q in 0..s.az_bins {
        for t in 0..s.delay_bins {
            if let Some((az, tau)) = expected {
                let (q0, t0) = s.nearest_bin(az, tau);
                if !inside(q, t, q0, t0) {
                    continue;
                }
            }
            let v = s.get(q, t);
            if v > best_v {
                best_v = v;
                best = (q, t);
            }
        }
    }
    let main = peak(s, best.0, best.1);

    let mut maxima: Vec<Peak> = local_maxima(s)
        .into_iter()
        .map(|(q, t)| peak(s, q, t))
        .collect();
    // stable sort keeps index order among equal magnitudes
    maxima.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));

    let artifact = maxima
        .iter()
        .find(|p| !inside(p.az_bin, p.delay_bin, main.az_bin, main.delay_bin))
        .copied();
    let delta_db = match artifact {
        Some(a) => 20.0 * (main.magnitude / a.magnitude).log10(),
        None => f64::INFINITY,
    };
    maxima.truncate(top_n);
    Ok(PeakReport {
        main,
        artifact,
        delta_db,
        ranked: maxima,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub report: PeakReport,
}

/// Runs `point` for each axis value, in order.
pub fn delta_sweep<E, F>(axis: &[f64], mut point: F) -> Result<Vec<SweepPoint>, E>
where
    F: FnMut(f64) -> Result<PeakReport, E>,
{
    axis.iter()
        .map(|&value| {
            Ok(SweepPoint {
                value,
                report: point(value)?,
            })
        })
        .collect()
}

fn level_db(v: f64, reference: f64) -> f64 {
    (20.0 * (v / reference).log10()).max(-400.0)
}

/// CSV `phi_deg,tau_s,mag_db`, in dB relative to `reference` (normally the
/// main-peak magnitude), azimuth-major.
pub fn spectrum_to_csv(s: &JointSpectrum, reference: f64) -> String {
    let mut out = String::with_capacity(40 * s.magnitude.len() + 32);
    out.push_str("phi_deg,tau_s,mag_db\n");
    for q in 0..s.az_bins {
        let phi = s.azimuth_deg(q);
        for t in 0..s.delay_bins {
            let _ = writeln!(
                out,
                "{phi},{:e},{:.6}",
                s.delay_s(t),
                level_db(s.get(q, t), reference)
            );
        }
    }
    out
}

/// Binary PGM: one row per azimuth bin (ascending), one column per delay
/// bin (ascending). White is the reference level, black is 35 dB below it
/// or less.
pub fn spectrum_to_pgm(s: &JointSpectrum, reference: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.magnitude.len() + 128);
    let _ = write!(
        out,
        "P5\n# rows: azimuth ascending, columns: delay ascending, 0 = {HEATMAP_FLOOR_DB} dB\n{} {}\n255\n",
        s.delay_bins, s.az_bins
    );
    for &v in &s.magnitude {
        let db = level_db(v, reference).clamp(HEATMAP_FLOOR_DB, 0.0);
        out.push((255.0 * (db - HEATMAP_FLOOR_DB) / -HEATMAP_FLOOR_DB).round() as u8);
    }
    out
}

pub fn write_spectrum_csv(
    s: &JointSpectrum,
    reference: f64,
    path: &Path,
) -> Result<(), SpectrumError> {
    std::fs::write(path, spectrum_to_csv(s, reference))?;
    Ok(())
}

pub fn write_heatmap(s: &JointSpectrum, reference: f64, path: &Path) -> Result<(), SpectrumError> {
    std::fs::write(path, spectrum_to_pgm(s, reference))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::ModeRange;
    use std::f64::consts::PI;

    fn ideal(half: usize, grid: FrequencyGrid, az_deg: f64, tau: f64) -> ModeMatrix {
        let modes = ModeRange::new(half);
        let mut mm = ModeMatrix::zeros(modes, grid);
        let nk = grid.samples;
        for (mi, m) in modes.modes().enumerate() {
            for k in 0..nk {
                let df = grid.frequency(k) - grid.f_start_hz;
                let ph = m as f64 * az_deg.to_radians() - 2.0 * PI * df * tau;
                mm.values[mi * nk + k] = Complex64::from_polar(1.0, ph);
            }
        }
        mm
    }

    /// Direct double sum, for checking the FFT layout.
    fn direct(mm: &ModeMatrix, pad_az: usize, pad_delay: usize) -> Vec<f64> {
        let nk = mm.grid.samples;
        let na = mm.modes.count() * pad_az;
        let nd = (nk - 1) * pad_delay;
        let mut out = Vec::new();
        for q in 0..na {
            let phi = 2.0 * PI * q as f64 / na as f64;
            for t in 0..nd {
                let tau = t as f64 / (mm.grid.bandwidth_hz * pad_delay as f64);
                let mut acc = Complex64::new(0.0, 0.0);
                for (mi, m) in mm.modes.modes().enumerate() {
                    for k in 0..nk {
                        let df = mm.grid.frequency(k) - mm.grid.f_start_hz;
                        let ph = -(m as f64) * phi + 2.0 * PI * df * tau;
                        acc += mm.values[mi * nk + k] * Complex64::from_polar(1.0, ph);
                    }
                }
                out.push(acc.norm());
            }
        }
        out
    }

    #[test]
    fn fft_matches_direct_sum() {
        let g = FrequencyGrid::new(10e9, 1e9, 9).unwrap();
        let mm = ideal(3, g, 77.0, 2.3e-9);
        for (pa, pd) in [(1, 1), (2, 3)] {
            let s = joint_spectrum(&mm, pa, pd).unwrap();
            let d = direct(&mm, pa, pd);
            assert_eq!(s.magnitude.len(), d.len());
            for (a, b) in s.magnitude.iter().zip(&d) {
                assert!((a - b).abs() < 1e-9 * d.iter().copied().fold(0.0, f64::max));
            }
        }
    }

    #[test]
    fn on_grid_exponential_peaks_exactly() {
        let g = FrequencyGrid::new(28e9, 2e9, 101).unwrap();
        let az = 36.0 * 360.0 / 251.0;
        let mm = ideal(125, g, az, 30e-9);
        let s = joint_spectrum(&mm, 1, 1).unwrap();
        let r = find_peaks(&s, None, Exclusion::default(), 5).unwrap();
        assert_eq!((r.main.az_bin, r.main.delay_bin), (36, 60));
        assert!((r.main.delay_s - 30e-9).abs() < 1e-18);
        // the last frequency sample aliases onto the first delay period and
        // leaves a flat floor K times below the peak
        assert!(r.delta_db >= 20.0 * 101f64.log10() - 0.5, "{}", r.delta_db);
    }

    #[test]
    fn constant_input_peaks_at_origin() {
        let g = FrequencyGrid::new(28e9, 2e9, 11).unwrap();
        let mut mm = ModeMatrix::zeros(ModeRange::new(4), g);
        mm.values
            .iter_mut()
            .for_each(|v| *v = Complex64::new(1.0, 0.0));
        let s = joint_spectrum(&mm, 1, 1).unwrap();
        let r = find_peaks(&s, None, Exclusion::default(), 1).unwrap();
        assert_eq!((r.main.az_bin, r.main.delay_bin), (0, 0));
    }

    #[test]
    fn zero_spectrum_is_an_error() {
        let g = FrequencyGrid::new(28e9, 2e9, 5).unwrap();
        let s = joint_spectrum(&ModeMatrix::zeros(ModeRange::new(2), g), 1, 1).unwrap();
        assert!(matches!(
            find_peaks(&s, None, Exclusion::default(), 3),
            Err(SpectrumError::Degenerate)
        ));
        assert!(joint_spectrum(&ModeMatrix::zeros(ModeRange::new(2), g), 0, 1).is_err());
    }

    #[test]
    fn local_maxima_rules() {
        let g = FrequencyGrid::new(1e9, 1e9, 4).unwrap();
        let mut s = JointSpectrum {
            grid: g,
            mode_count: 4,
            pad_az: 1,
            pad_delay: 1,
            az_bins: 4,
            delay_bins: 3,
            magnitude: vec![0.0; 12],
        };
        // wraps in azimuth: row 3 neighbours row 0
        s.magnitude[0] = 5.0; // (0, 0) at the delay edge
        s.magnitude[3 * 3 + 0] = 4.0;
        s.magnitude[2 * 3 + 2] = 1.0; // (2, 2)
        s.magnitude[2 * 3 + 1] = 1.0; // tie with (2, 2): neither is strict
        let m = local_maxima(&s);
        assert_eq!(m, vec![(0, 0)]);
    }

    #[test]
    fn expected_location_restricts_main_peak() {
        let g = FrequencyGrid::new(1e9, 1e9, 21).unwrap();
        let mut s = JointSpectrum {
            grid: g,
            mode_count: 20,
            pad_az: 1,
            pad_delay: 1,
            az_bins: 20,
            delay_bins: 20,
            magnitude: vec![0.1; 400],
        };
        s.magnitude[3 * 20 + 4] = 10.0;
        s.magnitude[15 * 20 + 10] = 5.0;
        let free = find_peaks(&s, None, Exclusion::default(), 4).unwrap();
        assert_eq!((free.main.az_bin, free.main.delay_bin), (3, 4));
        assert!((free.delta_db - 20.0 * 2f64.log10()).abs() < 1e-12);
        let az = s.azimuth_deg(15);
        let pinned = find_peaks(&s, Some((az, 10e-9)), Exclusion::default(), 4).unwrap();
        assert_eq!((pinned.main.az_bin, pinned.main.delay_bin), (15, 10));
        assert!(pinned.delta_db < 0.0);
        assert_eq!(pinned.ranked.len(), 2);
    }

    #[test]
    fn heatmap_layout() {
        let g = FrequencyGrid::new(1e9, 1e9, 4).unwrap();
        let s = JointSpectrum {
            grid: g,
            mode_count: 2,
            pad_az: 1,
            pad_delay: 1,
            az_bins: 2,
            delay_bins: 3,
            magnitude: vec![1.0, 0.1, 0.0, 0.5, 1e-3, 0.02],
        };
        let pgm = spectrum_to_pgm(&s, 1.0);
        let text = String::from_utf8_lossy(&pgm);
        assert!(text.starts_with("P5\n"));
        assert!(text.contains("\n3 2\n255\n"));
        let pixels = &pgm[pgm.len() - 6..];
        assert_eq!(pixels[0], 255);
        assert_eq!(pixels[2], 0);
        assert_eq!(pixels[4], 0);
        assert_eq!(pixels[1], (255.0 * 15.0 / 35.0f64).round() as u8);
        let csv = spectrum_to_csv(&s, 1.0);
        assert!(csv.starts_with("phi_deg,tau_s,mag_db\n0,0e0,0.000000\n"));
        assert_eq!(csv.lines().count(), 7);
    }
}
