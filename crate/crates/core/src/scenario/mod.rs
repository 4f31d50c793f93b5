//! Scenario files, presets, the end-to-end pipeline and sweeps.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod presets;
pub mod sweep;

pub use config::{Scenario, ScenarioConfig, SweepAxis};
pub use pipeline::{
    analyse, auto_reduction, ingest_scenario, prepare, prepare_array, run_ingested, run_scenario,
    simulate, Prepared, RunOutput,
};
pub use presets::{find_preset, load_preset, PRESETS};
pub use sweep::{run_sweep, sweep_to_csv, SweepOutcome, SweepRow};
