//! Artifacts written by a run or a sweep, and the replayable manifest.

use std::path::Path;

use toml::{Table, Value};

use crate::beamform::Reduction;
use crate::channel::write_channel_csv;
use crate::geometry::write_geometry_csv;
use crate::scenario::config::{OutputConfig, ReductionName, ScenarioConfig};
use crate::scenario::pipeline::{Prepared, RunOutput};
use crate::scenario::sweep::{sweep_to_csv, SweepOutcome};
use crate::spectrum::{write_heatmap, write_spectrum_csv, Peak, PeakReport};
use crate::{Error, VERSION};

pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const HEATMAP_FILE: &str = "heatmap.pgm";
pub const REPORT_FILE: &str = "report.toml";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const GEOMETRY_FILE: &str = "geometry.csv";
pub const CHANNEL_FILE: &str = "channel.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

fn reduction_name(r: Reduction) -> ReductionName {
    match r {
        Reduction::None => ReductionName::None,
        Reduction::Parity => ReductionName::Parity,
        Reduction::Symmetric => ReductionName::Symmetric,
    }
}

fn reduction_str(r: Reduction) -> &'static str {
    match r {
        Reduction::None => "none",
        Reduction::Parity => "parity",
        Reduction::Symmetric => "symmetric",
    }
}

/// The config with every automatic choice written out: noise sigma in
/// metres, the mode half-width, the reduction. Running the manifest again
/// reproduces the run exactly.
pub fn resolved_config(
    config: &ScenarioConfig,
    prepared: &Prepared,
) -> Result<ScenarioConfig, Error> {
    let mut out = config.clone();
    let wavelength = config.resolve()?.wavelength_at_center();
    for r in &mut out.array.rings {
        if let Some(w) = r.position_noise_sigma_wavelengths.take() {
            r.position_noise_sigma_m = Some(w * wavelength);
        }
    }
    out.processing.mode_half_width = Some(prepared.modes().half_width());
    out.processing.reduction = reduction_name(prepared.reduction);
    let mut run = Table::new();
    run.insert("version".into(), Value::String(VERSION.into()));
    run.insert(
        "mode_limit".into(),
        Value::Integer(prepared.mode_limit as i64),
    );
    run.insert(
        "mode_half_width".into(),
        Value::Integer(prepared.modes().half_width() as i64),
    );
    run.insert(
        "reduction".into(),
        Value::String(reduction_str(prepared.reduction).into()),
    );
    run.insert("seed".into(), Value::Integer(config.processing.seed as i64));
    run.insert(
        "unique_weights".into(),
        Value::Integer(prepared.bank.unique_weight_count() as i64),
    );
    run.insert(
        "nyquist_pass".into(),
        Value::Boolean(prepared.nyquist.pass()),
    );
    out.run = Some(run);
    Ok(out)
}

fn peak_table(p: &Peak, reference: f64) -> Table {
    let mut t = Table::new();
    t.insert("azimuth_deg".into(), Value::Float(p.azimuth_deg));
    t.insert("delay_s".into(), Value::Float(p.delay_s));
    t.insert("az_bin".into(), Value::Integer(p.az_bin as i64));
    t.insert("delay_bin".into(), Value::Integer(p.delay_bin as i64));
    t.insert("magnitude".into(), Value::Float(p.magnitude));
    t.insert(
        "level_db".into(),
        Value::Float(20.0 * (p.magnitude / reference).log10()),
    );
    t
}

/// Peak report as TOML. An infinite delta is written as the string "inf".
pub fn report_to_toml(report: &PeakReport) -> String {
    let reference = report.main.magnitude;
    let mut t = Table::new();
    t.insert(
        "delta_db".into(),
        if report.delta_db.is_finite() {
            Value::Float(report.delta_db)
        } else {
            Value::String("inf".into())
        },
    );
    t.insert(
        "main".into(),
        Value::Table(peak_table(&report.main, reference)),
    );
    if let Some(a) = &report.artifact {
        t.insert("artifact".into(), Value::Table(peak_table(a, reference)));
    }
    t.insert(
        "ranked".into(),
        Value::Array(
            report
                .ranked
                .iter()
                .map(|p| Value::Table(peak_table(p, reference)))
                .collect(),
        ),
    );
    toml::to_string(&t).expect("report tables always serialize")
}

/// Writes the artifacts enabled in `config.output` to `dir`, creating it.
pub fn write_run(
    dir: &Path,
    config: &ScenarioConfig,
    prepared: &Prepared,
    run: &RunOutput,
) -> Result<(), Error> {
    write_artifacts(dir, &config.output, prepared, run)?;
    if config.output.manifest {
        std::fs::write(
            dir.join(MANIFEST_FILE),
            resolved_config(config, prepared)?.to_toml(),
        )?;
    }
    Ok(())
}

/// Everything `write_run` writes except the manifest.
pub fn write_artifacts(
    dir: &Path,
    o: &OutputConfig,
    prepared: &Prepared,
    run: &RunOutput,
) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let reference = run.report.main.magnitude;
    if o.spectrum_csv {
        write_spectrum_csv(&run.spectrum, reference, &dir.join(SPECTRUM_FILE))?;
    }
    if o.heatmap {
        write_heatmap(&run.spectrum, reference, &dir.join(HEATMAP_FILE))?;
    }
    if o.report {
        std::fs::write(dir.join(REPORT_FILE), report_to_toml(&run.report))?;
    }
    if o.geometry_csv {
        write_geometry_csv(&prepared.array, &dir.join(GEOMETRY_FILE))?;
    }
    if o.channel_csv {
        write_channel_csv(&run.channel, &dir.join(CHANNEL_FILE))?;
    }
    Ok(())
}

/// Writes `sweep.csv` and, if enabled, the manifest (the config plus a
/// `[run]` table listing the per-series mode choices).
pub fn write_sweep(
    dir: &Path,
    config: &ScenarioConfig,
    outcome: &SweepOutcome,
) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(SWEEP_FILE), sweep_to_csv(outcome))?;
    if config.output.manifest {
        let mut m = config.clone();
        let mut run = Table::new();
        run.insert("version".into(), Value::String(VERSION.into()));
        run.insert("seed".into(), Value::Integer(config.processing.seed as i64));
        let series = outcome
            .series
            .iter()
            .map(|s| {
                let mut t = Table::new();
                t.insert("label".into(), Value::String(s.label.clone()));
                t.insert("mode_limit".into(), Value::Integer(s.mode_limit as i64));
                t.insert(
                    "mode_half_width".into(),
                    Value::Integer(s.mode_half_width as i64),
                );
                t.insert(
                    "reduction".into(),
                    Value::String(reduction_str(s.reduction).into()),
                );
                Value::Table(t)
            })
            .collect();
        run.insert("series".into(), Value::Array(series));
        m.run = Some(run);
        std::fs::write(dir.join(MANIFEST_FILE), m.to_toml())?;
    }
    Ok(())
}
