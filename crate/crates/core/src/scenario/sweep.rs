//! One full pipeline run per axis value, optionally per series and seed.

use crate::beamform::{ModeRange, Reduction};
use crate::scenario::config::{ScenarioConfig, SeriesConfig, SweepAxis, SweepConfig};
use crate::scenario::pipeline::{prepare, simulate, Prepared};
use crate::scenario::Scenario;
use crate::spectrum::{delta_sweep, PeakReport};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub series: String,
    pub value: f64,
    /// Mean over seeds.
    pub delta_db: f64,
    pub delta_db_min: f64,
    pub delta_db_max: f64,
    /// Main peak of the first seed.
    pub azimuth_deg: f64,
    pub delay_s: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesInfo {
    pub label: String,
    pub mode_half_width: usize,
    pub mode_limit: usize,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    pub series: Vec<SeriesInfo>,
}

/// Applies one axis value to a copy of the scenario.
pub fn apply_axis(base: &Scenario, axis: SweepAxis, value: f64) -> Scenario {
    let mut s = base.clone();
    let lambda = s.wavelength_at_center();
    match axis {
        SweepAxis::AzimuthDeg => s.waves[0].azimuth_deg = value,
        SweepAxis::ElevationDeg => s.waves[0].elevation_deg = value,
        SweepAxis::DelayS => s.waves[0].delay_s = value,
        SweepAxis::Eccentricity => s.rings.iter_mut().for_each(|r| r.eccentricity = value),
        SweepAxis::RotationDeg => s
            .rings
            .iter_mut()
            .for_each(|r| r.rotation_deg = value.rem_euclid(360.0)),
        SweepAxis::PositionNoiseSigmaWavelengths => s
            .rings
            .iter_mut()
            .for_each(|r| r.position_noise_sigma_m = value * lambda),
        SweepAxis::SnrDb => s.snr_db = Some(value),
    }
    s
}

fn apply_series(base: &Scenario, series: &SeriesConfig) -> Scenario {
    let mut s = base.clone();
    for r in &mut s.rings {
        if let Some(e) = series.eccentricity {
            r.eccentricity = e;
        }
        if let Some(a) = series.rotation_deg {
            r.rotation_deg = a;
        }
    }
    if let Some(h) = series.mode_half_width {
        s.modes = Some(ModeRange::new(h));
    }
    s
}

fn summarize(series: &str, value: f64, runs: &[PeakReport]) -> SweepRow {
    let deltas: Vec<f64> = runs.iter().map(|r| r.delta_db).collect();
    SweepRow {
        series: series.to_string(),
        value,
        delta_db: deltas.iter().sum::<f64>() / deltas.len() as f64,
        delta_db_min: deltas.iter().copied().fold(f64::INFINITY, f64::min),
        delta_db_max: deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        azimuth_deg: runs[0].main.azimuth_deg,
        delay_s: runs[0].main.delay_s,
        runs: runs.len(),
    }
}

/// Runs the sweep described by `config.sweep` on top of `base` (the
/// resolved form of `config`).
pub fn run_sweep(config: &ScenarioConfig, base: &Scenario) -> Result<SweepOutcome, Error> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Validation("scenario has no [sweep] section".into()))?;
    run_sweep_with(sweep, base)
}

pub fn run_sweep_with(sweep: &SweepConfig, base: &Scenario) -> Result<SweepOutcome, Error> {
    let values = sweep.axis_values()?;
    let seeds = sweep.seeds.clone().unwrap_or_else(|| vec![base.seed]);
    if seeds.is_empty() {
        return Err(Error::Validation("sweep: `seeds` is empty".into()));
    }
    let series: Vec<SeriesConfig> = if sweep.series.is_empty() {
        vec![SeriesConfig {
            label: String::new(),
            eccentricity: None,
            rotation_deg: None,
            mode_half_width: None,
        }]
    } else {
        sweep.series.clone()
    };

    let mut rows = Vec::new();
    let mut infos = Vec::new();
    for s in &series {
        let scenario = apply_series(base, s);
        // per_value[i][seed]
        let mut per_value: Vec<Vec<PeakReport>> = vec![Vec::new(); values.len()];
        let mut info: Option<SeriesInfo> = None;
        for &seed in &seeds {
            let mut seeded = scenario.clone();
            seeded.set_seed(seed);
            let mut note = |p: &Prepared| {
                info.get_or_insert_with(|| SeriesInfo {
                    label: s.label.clone(),
                    mode_half_width: p.modes().half_width(),
                    mode_limit: p.mode_limit,
                    reduction: p.reduction,
                });
            };
            let points = if sweep.axis.scene_only() {
                let prepared = prepare(&seeded)?;
                note(&prepared);
                delta_sweep(&values, |v| {
                    simulate(&apply_axis(&seeded, sweep.axis, v), &prepared).map(|o| o.report)
                })?
            } else {
                delta_sweep(&values, |v| {
                    let point = apply_axis(&seeded, sweep.axis, v);
                    let prepared = prepare(&point)?;
                    note(&prepared);
                    simulate(&point, &prepared).map(|o| o.report)
                })?
            };
            for (slot, p) in per_value.iter_mut().zip(points) {
                slot.push(p.report);
            }
        }
        for (v, runs) in values.iter().zip(&per_value) {
            rows.push(summarize(&s.label, *v, runs));
        }
        infos.extend(info);
    }
    Ok(SweepOutcome {
        axis: sweep.axis,
        rows,
        series: infos,
    })
}

pub fn sweep_to_csv(outcome: &SweepOutcome) -> String {
    let mut out = format!(
        "series,{},delta_db,delta_db_min,delta_db_max,phi_hat_deg,tau_hat_s,runs\n",
        outcome.axis.name()
    );
    for r in &outcome.rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{},{:e},{}\n",
            r.series,
            r.value,
            r.delta_db,
            r.delta_db_min,
            r.delta_db_max,
            r.azimuth_deg,
            r.delay_s,
            r.runs
        ));
    }
    out
}
