use phasemode::scenario::output::{report_to_toml, resolved_config};
use phasemode::scenario::{load_preset, run_scenario};
use phasemode::ScenarioConfig;

#[test]
fn resolved_config_reproduces_the_run() {
    for name in ["fig7-ucca", "multipath"] {
        let config = load_preset(name).unwrap();
        let (prepared, first) = run_scenario(&config.resolve().unwrap()).unwrap();
        let frozen = resolved_config(&config, &prepared).unwrap().to_toml();
        let again = ScenarioConfig::from_toml(&frozen).unwrap();
        assert_eq!(again.to_toml(), frozen, "{name}");
        let (_, second) = run_scenario(&again.resolve().unwrap()).unwrap();
        assert_eq!(
            first.spectrum.magnitude, second.spectrum.magnitude,
            "{name}"
        );
        assert_eq!(
            report_to_toml(&first.report),
            report_to_toml(&second.report),
            "{name}"
        );
    }
}

#[test]
fn perturbed_arrays_replay_with_their_seed() {
    let mut config = load_preset("fig8").unwrap();
    config.sweep = None;
    config.processing.seed = 3;
    let (prepared, first) = run_scenario(&config.resolve().unwrap()).unwrap();
    let again =
        ScenarioConfig::from_toml(&resolved_config(&config, &prepared).unwrap().to_toml()).unwrap();
    let (_, second) = run_scenario(&again.resolve().unwrap()).unwrap();
    assert_eq!(first.spectrum.magnitude, second.spectrum.magnitude);
}
