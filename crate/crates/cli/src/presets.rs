//! Device presets shipped with the binary.

use crate::config::DeviceConfig;
use crate::error::{CliError, CliResult};

const PRESETS: [(&str, &str); 5] = [
    ("R2-I", include_str!("../presets/R2-I.json")),
    ("R4-I", include_str!("../presets/R4-I.json")),
    ("R4-I-sim", include_str!("../presets/R4-I-sim.json")),
    ("R3-II", include_str!("../presets/R3-II.json")),
    ("Q2-III", include_str!("../presets/Q2-III.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> CliResult<DeviceConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset `{name}`, expected one of {}",
                names().collect::<Vec<_>>().join(", ")
            ))
        })?;
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("preset {name}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse_and_build() {
        for name in names() {
            let d = load(name).unwrap();
            d.build("device").unwrap();
        }
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert!(load("q2-iii").is_ok());
        assert!(matches!(load("X9"), Err(CliError::Config(_))));
    }
}
