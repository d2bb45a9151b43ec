//! Scenarios shipped with the binary.

use crate::config::ScenarioConfig;
use crate::CliError;

pub const BUNDLED: &[(&str, &str)] = &[
    ("toa1d_flat", include_str!("../scenarios/toa1d_flat.toml")),
    ("toa1d_quadratic", include_str!("../scenarios/toa1d_quadratic.toml")),
    ("qb4d_j0", include_str!("../scenarios/qb4d_j0.toml")),
    ("contraction_violation", include_str!("../scenarios/contraction_violation.toml")),
];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|b| b.0).collect()
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|b| b.0 == name).map(|b| b.1)
}

pub fn load(name: &str) -> Result<ScenarioConfig, CliError> {
    let text = source(name)
        .ok_or_else(|| CliError::Config(format!("no bundled scenario '{name}'; available: {}", names().join(", "))))?;
    ScenarioConfig::from_toml(text)
}
