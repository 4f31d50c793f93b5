//! geometry -> channel -> filter bank -> expansion -> spectrum -> peaks.

use crate::beamform::{
    concentric_expand, mode_limit, FilterBank, FilterDesign, ModeMatrix, ModeRange, Reduction,
};
use crate::channel::{add_awgn, superpose, ChannelMatrix, ChannelModel, FrequencyGrid};
use crate::geometry::{build_concentric, nyquist_audit, NyquistReport, SensorArray};
use crate::scenario::config::{PeakSearch, Scenario, ScenarioConfig};
use crate::spectrum::Exclusion;
use crate::spectrum::{find_peaks, joint_spectrum, JointSpectrum, PeakReport};
use crate::Error;

/// Everything that depends on the array and grid but not on the scene.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub array: SensorArray,
    pub bank: FilterBank,
    pub mode_limit: usize,
    pub reduction: Reduction,
    pub nyquist: NyquistReport,
}

impl Prepared {
    pub fn modes(&self) -> ModeRange {
        self.bank.modes()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub channel: ChannelMatrix,
    pub modes: ModeMatrix,
    /// At the requested zero-padding; only used for display.
    pub spectrum: JointSpectrum,
    /// From the unpadded spectrum.
    pub report: PeakReport,
}

/// Strongest reduction the array supports.
pub fn auto_reduction(array: &SensorArray, design: FilterDesign) -> Reduction {
    let symmetric = design != FilterDesign::Average
        && array.rings.iter().all(|r| match r.spec {
            Some(s) => s.position_noise_sigma_m == 0.0 && s.sensor_count % 4 == 0,
            None => false,
        });
    if symmetric {
        Reduction::Symmetric
    } else {
        Reduction::Parity
    }
}

/// Highest mode a ring of P sensors samples without aliasing, `(P - 1) / 2`,
/// for the smallest ring. Caps the automatic mode range.
pub fn alias_limit(array: &SensorArray) -> usize {
    array
        .rings
        .iter()
        .map(|r| (r.sensors.len().max(1) - 1) / 2)
        .min()
        .unwrap_or(0)
}

pub fn prepare(scenario: &Scenario) -> Result<Prepared, Error> {
    prepare_array(scenario, build_concentric(&scenario.rings)?)
}

/// Sampling and mode-range checks, then the filter bank.
pub fn prepare_array(scenario: &Scenario, array: SensorArray) -> Result<Prepared, Error> {
    let grid = &scenario.grid;
    let nyquist = nyquist_audit(&array, grid.f_stop_hz());
    if !nyquist.pass() && !scenario.allow_undersampled {
        return Err(Error::Validation(format!(
            "largest sensor spacing is {:.3} wavelengths at {} Hz, above the 0.5 limit (allow with --allow-undersampled)",
            nyquist.worst_spacing_wavelengths(),
            grid.f_stop_hz()
        )));
    }
    let limit = mode_limit(&array, grid, scenario.mode_threshold)?;
    let modes = scenario
        .modes
        .unwrap_or(ModeRange::new(limit.min(alias_limit(&array))));
    if modes.half_width() > limit && !scenario.force_modes {
        return Err(Error::Validation(format!(
            "mode half-width {} exceeds the stable limit {} (threshold {:e}; override with --force-modes)",
            modes.half_width(),
            limit,
            scenario.mode_threshold
        )));
    }
    let reduction = scenario
        .reduction
        .unwrap_or_else(|| auto_reduction(&array, scenario.design));
    let bank = FilterBank::build_with_cutoff(
        &array,
        grid,
        scenario.design,
        modes,
        reduction,
        scenario.sensor_mode_threshold,
    )?;
    Ok(Prepared {
        array,
        bank,
        mode_limit: limit,
        reduction,
        nyquist,
    })
}

/// Synthesises the scene on a prepared array and analyses it.
pub fn simulate(scenario: &Scenario, prepared: &Prepared) -> Result<RunOutput, Error> {
    let clean = superpose(
        &scenario.waves,
        &prepared.array,
        &scenario.grid,
        scenario.model,
    )?;
    let channel = match scenario.snr_db {
        Some(snr) => add_awgn(&clean, snr, scenario.seed)?,
        None => clean,
    };
    analyse(scenario, prepared, channel)
}

/// Expansion, spectrum and peak search for a given channel.
pub fn analyse(
    scenario: &Scenario,
    prepared: &Prepared,
    channel: ChannelMatrix,
) -> Result<RunOutput, Error> {
    let modes = concentric_expand(&channel, &prepared.array, &prepared.bank)?;
    let native = joint_spectrum(&modes, 1, 1)?;
    let expected = match (scenario.peak_search, scenario.waves.first()) {
        (PeakSearch::Expected, Some(w)) => Some((w.azimuth_deg, w.delay_s)),
        _ => None,
    };
    let report = find_peaks(&native, expected, scenario.exclusion, scenario.top_peaks)?;
    let spectrum = if scenario.pad_az == 1 && scenario.pad_delay == 1 {
        native
    } else {
        joint_spectrum(&modes, scenario.pad_az, scenario.pad_delay)?
    };
    Ok(RunOutput {
        channel,
        modes,
        spectrum,
        report,
    })
}

pub fn run_scenario(scenario: &Scenario) -> Result<(Prepared, RunOutput), Error> {
    let prepared = prepare(scenario)?;
    let out = simulate(scenario, &prepared)?;
    Ok((prepared, out))
}

/// Scenario for processing a measured channel on `grid`. Processing
/// settings come from `config` when given; without one the defaults apply
/// and the main peak is the global maximum.
pub fn ingest_scenario(
    config: Option<&ScenarioConfig>,
    grid: FrequencyGrid,
) -> Result<Scenario, Error> {
    let mut s = match config {
        Some(c) => c.resolve()?,
        None => Scenario {
            rings: Vec::new(),
            grid,
            waves: Vec::new(),
            model: ChannelModel::PlaneWave,
            design: FilterDesign::Robust,
            modes: None,
            mode_threshold: 1e-6,
            reduction: None,
            pad_az: 1,
            pad_delay: 1,
            exclusion: Exclusion::default(),
            peak_search: PeakSearch::Global,
            top_peaks: 5,
            snr_db: None,
            seed: 0,
            allow_undersampled: false,
            force_modes: false,
            sensor_mode_threshold: None,
        },
    };
    s.grid = grid;
    s.snr_db = None;
    Ok(s)
}

/// Processes a measured channel recorded on `array`.
pub fn run_ingested(
    config: Option<&ScenarioConfig>,
    array: SensorArray,
    channel: ChannelMatrix,
) -> Result<(Scenario, Prepared, RunOutput), Error> {
    if channel.sensor_count != array.total_sensors() {
        return Err(Error::Validation(format!(
            "channel has {} sensors but the geometry has {}",
            channel.sensor_count,
            array.total_sensors()
        )));
    }
    let scenario = ingest_scenario(config, channel.grid)?;
    let prepared = prepare_array(&scenario, array)?;
    let out = analyse(&scenario, &prepared, channel)?;
    Ok((scenario, prepared, out))
}
