//! Bundled golden configs, one per numerical study.

use super::config::{ConfigErrors, ExperimentConfig};

pub const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Config text of a preset.
pub fn text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Option<Result<ExperimentConfig, ConfigErrors>> {
    text(name).map(ExperimentConfig::from_toml_str)
}
