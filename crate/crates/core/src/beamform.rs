//! Bessel filter banks and the phase-mode expansion.
//!
//! The expansion of ring `psi` is
//! `H_m(f) = 1/P * sum_p H_p(f) * exp(j m phi_p) * W_{m,p}(f)`
//! with the filter `W` depending on the sensor only through its radius.
//! Weights are even in `m`, and sensors related by the quadrant symmetry
//! of an unperturbed ellipse share a radius, which is what the reductions
//! exploit.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{ChannelMatrix, FrequencyGrid};
use crate::geometry::SensorArray;
use crate::specfun::{
    bessel_j, bessel_j_orders, bessel_j_orders_fast, bessel_j_prime, SpecfunError, MAX_ORDER,
};
use crate::SPEED_OF_LIGHT;

/// Smallest filter denominator magnitude accepted at run time.
pub const INSTABILITY_FLOOR: f64 = 1e-12;

/// Banks whose weights fit in this many bytes are computed up front.
const CACHE_BYTES: usize = 512 << 20;

#[derive(Debug, Error)]
pub enum BeamformError {
    #[error("filter denominator {magnitude:.3e} below floor for mode {mode}, ring {ring}, sensor {sensor}, {f_hz} Hz")]
    Instability {
        mode: i64,
        ring: usize,
        sensor: usize,
        f_hz: f64,
        magnitude: f64,
    },
    #[error("reduction not applicable: {0}")]
    Reduction(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDesign {
    /// `1 / (j^m J_m(x))`
    Plain,
    /// `2 / (j^m (J_m(x) - j J'_m(x)))`
    Robust,
    /// Robust filter evaluated once per ring at the mean axis `(a + b) / 2`.
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// Every (mode, sensor) weight evaluated directly.
    None,
    /// Negative modes reuse the positive-mode weights.
    Parity,
    /// Parity plus shared weights across each quadrant-mirrored sensor orbit.
    Symmetric,
}

/// Modes `-half_width ..= half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeRange {
    half_width: usize,
}

impl ModeRange {
    pub fn new(half_width: usize) -> Self {
        ModeRange { half_width }
    }
    pub fn half_width(&self) -> usize {
        self.half_width
    }
    pub fn count(&self) -> usize {
        2 * self.half_width + 1
    }
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let h = self.half_width as i64;
        -h..=h
    }
    /// Row of mode `m` in a [`ModeMatrix`].
    pub fn index(&self, m: i64) -> usize {
        (m + self.half_width as i64) as usize
    }
}

/// `j^m` exactly.
#[inline]
fn j_power(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Denominator of the filter for mode `m` given `J_m` and `J'_m`.
#[inline]
fn denominator(design: FilterDesign, m: i64, jm: f64, jpm: f64) -> Complex64 {
    let core = match design {
        FilterDesign::Plain => Complex64::new(jm, 0.0),
        FilterDesign::Robust | FilterDesign::Average => Complex64::new(jm, -jpm),
    };
    j_power(m) * core
}

#[inline]
fn numerator(design: FilterDesign) -> f64 {
    match design {
        FilterDesign::Plain => 1.0,
        FilterDesign::Robust | FilterDesign::Average => 2.0,
    }
}

fn argument(radius_m: f64, f_hz: f64) -> f64 {
    2.0 * PI * f_hz * radius_m / SPEED_OF_LIGHT
}

/// One filter weight. For [`FilterDesign::Average`] pass the mean axis as
/// `radius_m`.
pub fn make_filter(
    design: FilterDesign,
    m: i64,
    radius_m: f64,
    f_hz: f64,
) -> Result<Complex64, BeamformError> {
    let x = argument(radius_m, f_hz);
    let den = denominator(design, m, bessel_j(m, x)?, bessel_j_prime(m, x)?);
    let magnitude = den.norm();
    if !(magnitude >= INSTABILITY_FLOOR) {
        return Err(BeamformError::Instability {
            mode: m,
            ring: 0,
            sensor: 0,
            f_hz,
            magnitude,
        });
    }
    Ok(numerator(design) / den)
}

/// Largest `M_h` such that `|J_m(x) - j J'_m(x)| >= threshold` for every
/// `|m| <= M_h`, at the smallest radius and lowest frequency of the setup.
pub fn mode_limit(
    array: &SensorArray,
    grid: &FrequencyGrid,
    threshold: f64,
) -> Result<usize, BeamformError> {
    let x = argument(array.min_radius(), grid.f_start_hz);
    mode_limit_at(x, threshold)
}

pub(crate) fn mode_limit_at(x: f64, threshold: f64) -> Result<usize, BeamformError> {
    let mut top = (x.ceil() as usize + 64).min(MAX_ORDER as usize - 1);
    loop {
        let j = bessel_j_orders(x, top + 1)?;
        for m in 0..=top {
            let jp = if m == 0 {
                -j[1]
            } else {
                0.5 * (j[m - 1] - j[m + 1])
            };
            if j[m].hypot(jp) < threshold {
                return Ok(m.saturating_sub(1));
            }
        }
        if top + 1 >= MAX_ORDER as usize {
            return Ok(top);
        }
        top = (2 * top).min(MAX_ORDER as usize - 1);
    }
}

/// How one ring's sensors map onto distinct filter radii.
#[derive(Debug, Clone, PartialEq)]
struct RingPlan {
    slot_of: Vec<usize>,
    slot_radius: Vec<f64>,
    /// A sensor index using each slot, for error messages.
    slot_sensor: Vec<usize>,
    /// Highest |m| each slot contributes to; `usize::MAX` when unlimited.
    slot_cutoff: Vec<usize>,
}

/// Canonical member of the orbit `{p, P - p, P/2 - p, P/2 + p}`.
fn quadrant_slot(p: usize, count: usize) -> usize {
    let half = count / 2;
    [
        p,
        (count - p) % count,
        (half + count - p) % count,
        (half + p) % count,
    ]
    .into_iter()
    .min()
    .expect("non-empty orbit")
}

impl RingPlan {
    fn build(
        array: &SensorArray,
        ring: usize,
        design: FilterDesign,
        reduction: Reduction,
    ) -> Result<Self, BeamformError> {
        let r = &array.rings[ring];
        let count = r.len();
        if design == FilterDesign::Average {
            return Ok(RingPlan {
                slot_of: vec![0; count],
                slot_radius: vec![r.mean_axis()],
                slot_sensor: vec![0],
                slot_cutoff: Vec::new(),
            });
        }
        match reduction {
            Reduction::None => Ok(Self::per_sensor(array, ring)),
            Reduction::Parity => match r.spec {
                Some(spec) if spec.is_exact_circle() => Ok(RingPlan {
                    slot_of: vec![0; count],
                    slot_radius: vec![spec.semi_major_m],
                    slot_sensor: vec![0],
                    slot_cutoff: Vec::new(),
                }),
                _ => Ok(Self::per_sensor(array, ring)),
            },
            Reduction::Symmetric => {
                let spec = r.spec.ok_or_else(|| {
                    BeamformError::Reduction(format!(
                        "ring {ring} has no placement recipe (ingested geometry)"
                    ))
                })?;
                if spec.position_noise_sigma_m > 0.0 {
                    return Err(BeamformError::Reduction(format!(
                        "ring {ring} is perturbed"
                    )));
                }
                if count % 4 != 0 {
                    return Err(BeamformError::Reduction(format!(
                        "ring {ring} has {count} sensors, not a multiple of 4"
                    )));
                }
                if spec.is_exact_circle() {
                    return Ok(RingPlan {
                        slot_of: vec![0; count],
                        slot_radius: vec![spec.semi_major_m],
                        slot_sensor: vec![0],
                        slot_cutoff: Vec::new(),
                    });
                }
                let slots = count / 4 + 1;
                Ok(RingPlan {
                    slot_of: (0..count).map(|p| quadrant_slot(p, count)).collect(),
                    slot_radius: (0..slots).map(|p| r.sensors[p].radius()).collect(),
                    slot_sensor: (0..slots).collect(),
                    slot_cutoff: Vec::new(),
                })
            }
        }
    }

    fn per_sensor(array: &SensorArray, ring: usize) -> Self {
        let s = &array.rings[ring].sensors;
        RingPlan {
            slot_of: (0..s.len()).collect(),
            slot_radius: s.iter().map(|t| t.radius()).collect(),
            slot_sensor: (0..s.len()).collect(),
            slot_cutoff: Vec::new(),
        }
    }
}

/// Filter weights for every ring, mode, distinct radius and frequency.
///
/// Banks up to 512 MB are evaluated when built, so an unstable filter is
/// reported by [`FilterBank::build`]. Larger ones (thousands of perturbed
/// sensors) are evaluated one frequency at a time as they are read.
#[derive(Debug, Clone)]
pub struct FilterBank {
    design: FilterDesign,
    reduction: Reduction,
    modes: ModeRange,
    grid: FrequencyGrid,
    rings: Vec<RingPlan>,
    sensor_cutoff: Option<f64>,
    /// `[ring][k]` -> slot-major table, present when small enough.
    cache: Option<Vec<Vec<Vec<Complex64>>>>,
}

/// Weights of one ring at one frequency.
#[derive(Debug, Clone)]
pub struct WeightTable<'a> {
    data: Cow<'a, [Complex64]>,
    stored: usize,
    half: usize,
    mirrored: bool,
}

impl WeightTable<'_> {
    pub fn get(&self, slot: usize, m: i64) -> Complex64 {
        self.data[slot * self.stored + self.column(m)]
    }
    fn column(&self, m: i64) -> usize {
        if self.mirrored {
            m.unsigned_abs() as usize
        } else {
            (m + self.half as i64) as usize
        }
    }
    fn slot_row(&self, slot: usize) -> &[Complex64] {
        &self.data[slot * self.stored..(slot + 1) * self.stored]
    }
}

impl FilterBank {
    pub fn build(
        array: &SensorArray,
        grid: &FrequencyGrid,
        design: FilterDesign,
        modes: ModeRange,
        reduction: Reduction,
    ) -> Result<Self, BeamformError> {
        Self::build_with_cutoff(array, grid, design, modes, reduction, None)
    }

    /// Like [`FilterBank::build`], but with `sensor_cutoff = Some(threshold)`
    /// each filter radius only serves the modes that pass [`mode_limit`]'s
    /// test at that radius. Weights above the cutoff are zero and the
    /// expansion averages each mode over the sensors that serve it, so
    /// sensors pulled close to the centre no longer amplify leakage from
    /// lower modes.
    pub fn build_with_cutoff(
        array: &SensorArray,
        grid: &FrequencyGrid,
        design: FilterDesign,
        modes: ModeRange,
        reduction: Reduction,
        sensor_cutoff: Option<f64>,
    ) -> Result<Self, BeamformError> {
        let mut rings = (0..array.rings.len())
            .map(|i| RingPlan::build(array, i, design, reduction))
            .collect::<Result<Vec<_>, _>>()?;
        for plan in &mut rings {
            plan.slot_cutoff = match sensor_cutoff {
                Some(t) => plan
                    .slot_radius
                    .iter()
                    .map(|&r| mode_limit_at(argument(r, grid.f_start_hz), t))
                    .collect::<Result<_, _>>()?,
                None => vec![usize::MAX; plan.slot_radius.len()],
            };
        }
        let mut bank = FilterBank {
            design,
            reduction,
            modes,
            grid: *grid,
            rings,
            sensor_cutoff,
            cache: None,
        };
        if bank.stored_weight_count() * std::mem::size_of::<Complex64>() <= CACHE_BYTES {
            let cache = (0..bank.rings.len())
                .map(|ring| {
                    (0..grid.samples)
                        .map(|k| bank.compute(ring, k))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            bank.cache = Some(cache);
        }
        // larger banks are recomputed per frequency on use, and report
        // instabilities from there
        Ok(bank)
    }

    pub fn design(&self) -> FilterDesign {
        self.design
    }
    pub fn reduction(&self) -> Reduction {
        self.reduction
    }
    pub fn modes(&self) -> ModeRange {
        self.modes
    }
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }
    pub fn ring_count(&self) -> usize {
        self.rings.len()
    }
    pub fn sensor_cutoff(&self) -> Option<f64> {
        self.sensor_cutoff
    }

    /// Sensors of `ring` that contribute to mode `m`.
    pub fn contributors(&self, ring: usize, m: i64) -> usize {
        let plan = &self.rings[ring];
        let a = m.unsigned_abs() as usize;
        plan.slot_of
            .iter()
            .filter(|&&slot| plan.slot_cutoff[slot] >= a)
            .count()
    }

    fn mirrored(&self) -> bool {
        self.reduction != Reduction::None
    }

    fn stored_modes(&self) -> usize {
        if self.mirrored() {
            self.modes.half_width() + 1
        } else {
            self.modes.count()
        }
    }

    /// Distinct radii (filter slots) of one ring.
    pub fn slot_count(&self, ring: usize) -> usize {
        self.rings[ring].slot_radius.len()
    }

    /// Distinct weights per ring and frequency, summed over rings.
    pub fn unique_weight_count(&self) -> usize {
        self.rings
            .iter()
            .map(|r| r.slot_radius.len() * self.stored_modes())
            .sum()
    }

    fn stored_weight_count(&self) -> usize {
        self.unique_weight_count() * self.grid.samples
    }

    /// Number of (order, argument) Bessel pairs the bank evaluates.
    pub fn bessel_evaluations(&self) -> usize {
        self.stored_weight_count()
    }

    /// Evaluations a bank without any reduction would need.
    pub fn unreduced_evaluations(&self) -> usize {
        self.rings.iter().map(|r| r.slot_of.len()).sum::<usize>()
            * self.modes.count()
            * self.grid.samples
    }

    fn compute(&self, ring: usize, k: usize) -> Result<Vec<Complex64>, BeamformError> {
        let plan = &self.rings[ring];
        let f = self.grid.frequency(k);
        let h = self.modes.half_width();
        let stored = self.stored_modes();
        let num = numerator(self.design);
        let mut out = Vec::with_capacity(plan.slot_radius.len() * stored);
        for (slot, &radius) in plan.slot_radius.iter().enumerate() {
            let j = bessel_j_orders_fast(argument(radius, f), h + 1)?;
            let first = if self.mirrored() { 0 } else { -(h as i64) };
            for m in first..=h as i64 {
                let a = m.unsigned_abs() as usize;
                if a > plan.slot_cutoff[slot] {
                    out.push(Complex64::new(0.0, 0.0));
                    continue;
                }
                let jp = if a == 0 {
                    -j[1]
                } else {
                    0.5 * (j[a - 1] - j[a + 1])
                };
                let sign = if m < 0 && a % 2 == 1 { -1.0 } else { 1.0 };
                let den = denominator(self.design, m, sign * j[a], sign * jp);
                if !(den.norm_sqr() >= INSTABILITY_FLOOR * INSTABILITY_FLOOR) {
                    return Err(BeamformError::Instability {
                        mode: m,
                        ring,
                        sensor: plan.slot_sensor[slot],
                        f_hz: f,
                        magnitude: den.norm(),
                    });
                }
                out.push(num / den);
            }
        }
        Ok(out)
    }

    /// Weights of `ring` at frequency sample `k`.
    pub fn weights_at(&self, ring: usize, k: usize) -> Result<WeightTable<'_>, BeamformError> {
        let data = match &self.cache {
            Some(c) => Cow::Borrowed(c[ring][k].as_slice()),
            None => Cow::Owned(self.compute(ring, k)?),
        };
        Ok(WeightTable {
            data,
            stored: self.stored_modes(),
            half: self.modes.half_width(),
            mirrored: self.mirrored(),
        })
    }

    /// Filter slot used by sensor `p` of `ring`.
    pub fn slot(&self, ring: usize, p: usize) -> usize {
        self.rings[ring].slot_of[p]
    }

    /// `W_{m,p}(f_k)` for sensor `p` of `ring`.
    pub fn weight(
        &self,
        ring: usize,
        m: i64,
        p: usize,
        k: usize,
    ) -> Result<Complex64, BeamformError> {
        Ok(self.weights_at(ring, k)?.get(self.slot(ring, p), m))
    }

    /// Full bank as CSV `m,p,ring,f_hz,re,im`. The output has
    /// `modes x sensors x samples` rows, which is hundreds of megabytes at
    /// the scale of the built-in presets.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), std::io::Error> {
        writeln!(out, "m,p,ring,f_hz,re,im")?;
        for (ring, plan) in self.rings.iter().enumerate() {
            for k in 0..self.grid.samples {
                let table = self.weights_at(ring, k).map_err(std::io::Error::other)?;
                let f = self.grid.frequency(k);
                for m in self.modes.modes() {
                    for (p, &slot) in plan.slot_of.iter().enumerate() {
                        let w = table.get(slot, m);
                        writeln!(out, "{m},{p},{ring},{f:.16e},{:.16e},{:.16e}", w.re, w.im)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Mode-domain response, row-major over (mode, frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    pub modes: ModeRange,
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

impl ModeMatrix {
    pub fn zeros(modes: ModeRange, grid: FrequencyGrid) -> Self {
        ModeMatrix {
            modes,
            grid,
            values: vec![Complex64::new(0.0, 0.0); modes.count() * grid.samples],
        }
    }
    pub fn get(&self, m: i64, k: usize) -> Complex64 {
        self.values[self.modes.index(m) * self.grid.samples + k]
    }
    pub fn row(&self, m: i64) -> &[Complex64] {
        let k = self.grid.samples;
        let i = self.modes.index(m);
        &self.values[i * k..(i + 1) * k]
    }
}

/// Phase-mode expansion of one ring. Sensors are accumulated in ascending
/// order for every (mode, frequency) cell.
pub fn phase_mode_expand(
    channel: &ChannelMatrix,
    array: &SensorArray,
    ring: usize,
    bank: &FilterBank,
) -> Result<ModeMatrix, BeamformError> {
    if channel.sensor_count != array.total_sensors() {
        return Err(BeamformError::Mismatch(format!(
            "channel has {} sensors, array has {}",
            channel.sensor_count,
            array.total_sensors()
        )));
    }
    if bank.ring_count() != array.rings.len() {
        return Err(BeamformError::Mismatch(
            "bank and array ring counts differ".into(),
        ));
    }
    if channel.grid != bank.grid {
        return Err(BeamformError::Mismatch(
            "bank frequency grid differs from channel grid".into(),
        ));
    }
    let sensors = &array.rings[ring].sensors;
    let count = sensors.len();
    let offset = array.ring_offset(ring);
    let modes = bank.modes;
    let nm = modes.count();
    let nk = channel.grid.samples;

    let mut steer = Vec::with_capacity(count * nm);
    for s in sensors {
        let phi = s.azimuth();
        steer.extend(
            modes
                .modes()
                .map(|m| Complex64::from_polar(1.0, m as f64 * phi)),
        );
    }

    let norms: Vec<usize> = modes.modes().map(|m| bank.contributors(ring, m)).collect();
    let mut out = ModeMatrix::zeros(modes, channel.grid);
    let mut cell = vec![Complex64::new(0.0, 0.0); nm];
    for k in 0..nk {
        let table = bank.weights_at(ring, k)?;
        let half = modes.half_width();
        cell.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for p in 0..count {
            let h = channel.get(offset + p, k);
            let e = &steer[p * nm..(p + 1) * nm];
            let w = table.slot_row(bank.slot(ring, p));
            if table.mirrored {
                // column |m|: walk both halves outward from m = 0
                let (neg, pos) = cell.split_at_mut(half);
                let (e_neg, e_pos) = e.split_at(half);
                for ((c, &ev), &wv) in pos.iter_mut().zip(e_pos).zip(w) {
                    *c += h * ev * wv;
                }
                for ((c, &ev), &wv) in neg.iter_mut().rev().zip(e_neg.iter().rev()).zip(&w[1..]) {
                    *c += h * ev * wv;
                }
            } else {
                for ((c, &ev), &wv) in cell.iter_mut().zip(e).zip(w) {
                    *c += h * ev * wv;
                }
            }
        }
        for (mi, c) in cell.iter().enumerate() {
            out.values[mi * nk + k] = if norms[mi] > 0 {
                c / norms[mi] as f64
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }
    Ok(out)
}

/// Equal-weight mean of per-ring mode matrices, in ring order.
pub fn average_rings(parts: &[ModeMatrix]) -> Result<ModeMatrix, BeamformError> {
    let first = parts
        .first()
        .ok_or_else(|| BeamformError::Mismatch("no rings to combine".into()))?;
    for p in parts {
        if p.modes != first.modes || p.grid != first.grid {
            return Err(BeamformError::Mismatch(
                "rings differ in mode range or frequency grid".into(),
            ));
        }
    }
    let mut out = ModeMatrix::zeros(first.modes, first.grid);
    for p in parts {
        out.values
            .iter_mut()
            .zip(&p.values)
            .for_each(|(a, b)| *a += b);
    }
    let n = parts.len() as f64;
    out.values.iter_mut().for_each(|v| *v /= n);
    Ok(out)
}

/// Expands every ring of `array` and averages the results.
pub fn concentric_expand(
    channel: &ChannelMatrix,
    array: &SensorArray,
    bank: &FilterBank,
) -> Result<ModeMatrix, BeamformError> {
    let parts = (0..array.rings.len())
        .map(|ring| phase_mode_expand(channel, array, ring, bank))
        .collect::<Result<Vec<_>, _>>()?;
    average_rings(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{synthesize_planewave, IncidentWave};
    use crate::geometry::{build_concentric, EllipseSpec, Provenance, Ring, Sensor};

    #[test]
    fn robust_weight_at_unit_argument() {
        let r = SPEED_OF_LIGHT / (2.0 * PI * 1e9);
        let w = make_filter(FilterDesign::Robust, 0, r, 1e9).unwrap();
        let want = Complex64::new(2.0, 0.0)
            / Complex64::new(0.765_197_686_557_966_6, 0.440_050_585_744_933_5);
        assert!((w - want).norm() < 1e-14);
    }

    #[test]
    fn plain_weight_limits() {
        let w = make_filter(FilterDesign::Plain, 0, 1e-9, 1e9).unwrap();
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let zero = 2.404_825_557_695_773;
        let r = zero * SPEED_OF_LIGHT / (2.0 * PI * 1e9);
        assert!(matches!(
            make_filter(FilterDesign::Plain, 0, r, 1e9),
            Err(BeamformError::Instability { mode: 0, .. })
        ));
        assert!(make_filter(FilterDesign::Robust, 0, r, 1e9).is_ok());
    }

    #[test]
    fn weights_are_even_in_mode() {
        for design in [FilterDesign::Plain, FilterDesign::Robust] {
            for m in 1..9 {
                let a = make_filter(design, m, 0.3, 29e9).unwrap();
                let b = make_filter(design, -m, 0.3, 29e9).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn mode_limit_cases() {
        let g = FrequencyGrid::new(28e9, 2e9, 10).unwrap();
        let arr = build_concentric(&[EllipseSpec::circle(0.5, 720)]).unwrap();
        assert!(mode_limit(&arr, &g, 1e-6).unwrap() >= 250);
        // J'_1(0) = 1/2 keeps the first mode alive at a vanishing radius
        assert_eq!(mode_limit_at(0.0, 1e-6).unwrap(), 1);
        assert_eq!(mode_limit_at(1e-9, 1e-6).unwrap(), 1);
        let mut last = 0;
        for x in [1.0, 10.0, 50.0, 200.0, 400.0] {
            let m = mode_limit_at(x, 1e-6).unwrap();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn quadrant_orbits() {
        assert_eq!(quadrant_slot(0, 8), 0);
        assert_eq!(quadrant_slot(7, 8), 1);
        assert_eq!(quadrant_slot(3, 8), 1);
        assert_eq!(quadrant_slot(5, 8), 1);
        assert_eq!(quadrant_slot(4, 8), 0);
        assert_eq!(quadrant_slot(2, 8), 2);
        assert_eq!(quadrant_slot(6, 8), 2);
        let slots: std::collections::BTreeSet<_> =
            (0..720).map(|p| quadrant_slot(p, 720)).collect();
        assert_eq!(slots.len(), 181);
        assert_eq!(*slots.iter().max().unwrap(), 180);
    }

    #[test]
    fn reduction_guards() {
        let g = FrequencyGrid::new(28e9, 2e9, 4).unwrap();
        let m = ModeRange::new(3);
        let noisy =
            build_concentric(&[EllipseSpec::ellipse(0.1, 0.5, 0.0, 16).with_noise(1e-3, 1)])
                .unwrap();
        assert!(matches!(
            FilterBank::build(&noisy, &g, FilterDesign::Robust, m, Reduction::Symmetric),
            Err(BeamformError::Reduction(_))
        ));
        assert!(FilterBank::build(&noisy, &g, FilterDesign::Robust, m, Reduction::Parity).is_ok());
        let odd = build_concentric(&[EllipseSpec::ellipse(0.1, 0.5, 0.0, 18)]).unwrap();
        assert!(
            FilterBank::build(&odd, &g, FilterDesign::Robust, m, Reduction::Symmetric).is_err()
        );
    }

    #[test]
    fn circle_and_average_collapse_to_one_slot() {
        let g = FrequencyGrid::new(28e9, 2e9, 4).unwrap();
        let m = ModeRange::new(5);
        let circle = build_concentric(&[EllipseSpec::circle(0.1, 64)]).unwrap();
        let bank =
            FilterBank::build(&circle, &g, FilterDesign::Robust, m, Reduction::Symmetric).unwrap();
        assert_eq!(bank.slot_count(0), 1);
        assert_eq!(bank.unique_weight_count(), 6);
        let ell = build_concentric(&[EllipseSpec::ellipse(0.1, 0.7, 0.0, 64)]).unwrap();
        let bank = FilterBank::build(&ell, &g, FilterDesign::Average, m, Reduction::None).unwrap();
        assert_eq!(bank.slot_count(0), 1);
        let spec = ell.rings[0].spec.unwrap();
        let want = make_filter(
            FilterDesign::Robust,
            2,
            0.5 * (0.1 + spec.semi_minor_m()),
            g.frequency(1),
        )
        .unwrap();
        let got = bank.weight(0, 2, 17, 1).unwrap();
        assert!((got - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn trivial_expansion_is_plain_average() {
        let g = FrequencyGrid::new(1e6, 1e6, 3).unwrap();
        // a centre-heavy tiny ring keeps the m = 0 weight ~ 1 for the plain design
        let sensors = (0..4)
            .map(|p| Sensor::new(0, p, 1e-9 * (p as f64 + 1.0), 0.0))
            .collect();
        let arr = SensorArray {
            rings: vec![Ring {
                spec: None,
                sensors,
            }],
            provenance: Provenance::Ingested,
        };
        let bank = FilterBank::build(
            &arr,
            &g,
            FilterDesign::Plain,
            ModeRange::new(0),
            Reduction::None,
        )
        .unwrap();
        let mut h = ChannelMatrix::zeros(g, 4, crate::channel::ChannelProvenance::Ingested);
        h.values
            .iter_mut()
            .for_each(|v| *v = Complex64::new(1.0, 0.0));
        let out = phase_mode_expand(&h, &arr, 0, &bank).unwrap();
        for k in 0..3 {
            assert!((out.get(0, k) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_ring_average_is_identity() {
        let g = FrequencyGrid::new(28e9, 2e9, 8).unwrap();
        let arr = build_concentric(&[EllipseSpec::ellipse(0.05, 0.6, 10.0, 64)]).unwrap();
        let bank = FilterBank::build(
            &arr,
            &g,
            FilterDesign::Robust,
            ModeRange::new(6),
            Reduction::Symmetric,
        )
        .unwrap();
        let h = synthesize_planewave(&arr, &IncidentWave::new(40.0, 2e-9), &g).unwrap();
        let one = phase_mode_expand(&h, &arr, 0, &bank).unwrap();
        assert_eq!(concentric_expand(&h, &arr, &bank).unwrap(), one);
        assert_eq!(average_rings(&[one.clone(), one.clone()]).unwrap(), one);
        assert!(average_rings(&[]).is_err());
    }

    #[test]
    fn sensor_cutoff_drops_unsupported_modes() {
        let g = FrequencyGrid::new(28e9, 2e9, 5).unwrap();
        let modes = ModeRange::new(20);
        // one sensor far inside the others
        let mut sensors: Vec<Sensor> = (0..15)
            .map(|p| {
                let a = 2.0 * PI * p as f64 / 16.0;
                Sensor::new(0, p, 0.05 * a.cos(), 0.05 * a.sin())
            })
            .collect();
        sensors.push(Sensor::new(0, 15, 0.02, -0.001));
        let arr = SensorArray {
            rings: vec![Ring {
                spec: None,
                sensors,
            }],
            provenance: Provenance::Ingested,
        };
        let plain =
            FilterBank::build(&arr, &g, FilterDesign::Robust, modes, Reduction::Parity).unwrap();
        let cut = FilterBank::build_with_cutoff(
            &arr,
            &g,
            FilterDesign::Robust,
            modes,
            Reduction::Parity,
            Some(1e-3),
        )
        .unwrap();
        let inner = mode_limit_at(
            argument(arr.rings[0].sensors[15].radius(), g.f_start_hz),
            1e-3,
        )
        .unwrap();
        assert!(inner < 20);
        for k in 0..5 {
            for m in modes.modes() {
                let a = m.unsigned_abs() as usize;
                let w = cut.weight(0, m, 15, k).unwrap();
                if a > inner {
                    assert_eq!(w, Complex64::new(0.0, 0.0));
                } else {
                    assert_eq!(w, plain.weight(0, m, 15, k).unwrap());
                }
                assert_eq!(
                    cut.weight(0, m, 3, k).unwrap(),
                    plain.weight(0, m, 3, k).unwrap()
                );
            }
        }
        assert_eq!(cut.contributors(0, 0), 16);
        assert_eq!(cut.contributors(0, inner as i64 + 1), 15);
        assert_eq!(plain.contributors(0, 20), 16);

        // modes every sensor serves come out exactly as without the cutoff
        let h = synthesize_planewave(&arr, &IncidentWave::new(40.0, 2e-9), &g).unwrap();
        let a = phase_mode_expand(&h, &arr, 0, &plain).unwrap();
        let b = phase_mode_expand(&h, &arr, 0, &cut).unwrap();
        for k in 0..5 {
            assert_eq!(a.get(1, k), b.get(1, k));
            assert_ne!(a.get(20, k), b.get(20, k));
        }
    }
}
