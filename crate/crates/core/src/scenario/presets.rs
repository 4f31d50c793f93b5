//! Built-in scenarios reproducing the published simulation studies.

use crate::scenario::config::ScenarioConfig;
use crate::Error;

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig3",
        summary: "single wave, 0.5 m circle, 28-30 GHz",
        toml: include_str!("../../presets/fig3.toml"),
    },
    Preset {
        name: "fig4a",
        summary: "delta vs azimuth for e = 0, 0.7, 0.95, 0.99",
        toml: include_str!("../../presets/fig4a.toml"),
    },
    Preset {
        name: "fig4b",
        summary: "as fig4a with the major axis at 90 degrees",
        toml: include_str!("../../presets/fig4b.toml"),
    },
    Preset {
        name: "fig4c",
        summary: "two crossed e = 0.95 ellipses, delta vs azimuth",
        toml: include_str!("../../presets/fig4c.toml"),
    },
    Preset {
        name: "fig5",
        summary: "delta vs elevation for e = 0, 0.7, 0.95",
        toml: include_str!("../../presets/fig5.toml"),
    },
    Preset {
        name: "fig7-uca",
        summary: "circular array, 39.5-43.5 GHz",
        toml: include_str!("../../presets/fig7-uca.toml"),
    },
    Preset {
        name: "fig7-ucca",
        summary: "nine concentric circles, 39.5-43.5 GHz",
        toml: include_str!("../../presets/fig7-ucca.toml"),
    },
    Preset {
        name: "fig7-cea",
        summary: "concentric elliptical array, 39.5-43.5 GHz",
        toml: include_str!("../../presets/fig7-cea.toml"),
    },
    Preset {
        name: "fig8",
        summary: "perturbed concentric elliptical array, sigma sweep",
        toml: include_str!("../../presets/fig8.toml"),
    },
    Preset {
        name: "multipath",
        summary: "two rays on crossed e = 0.7 ellipses, 58-62 GHz",
        toml: include_str!("../../presets/multipath.toml"),
    },
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn load_preset(name: &str) -> Result<ScenarioConfig, Error> {
    let preset = find_preset(name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        Error::Config(format!(
            "unknown preset `{name}` (known: {})",
            known.join(", ")
        ))
    })?;
    ScenarioConfig::from_toml(preset.toml)
}
