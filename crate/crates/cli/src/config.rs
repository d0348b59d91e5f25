//! Run configuration in lab units: GHz for transition frequencies (ω/2π),
//! MHz for rates (γ/2π) and E_c/h, μs and ns for times, mK, μeV for the gap.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qthermo::device::{BaseRateModel, BathCoupling, BathTemperature, DeviceParams};
use qthermo::experiment::{SweepConfig, SweepNoise, QP_ONSET_CUTOFF};
use qthermo::protocol::{DelayPlacement, ProtocolConfig, PureStateResponses, ReadoutMode};
use qthermo::quasiparticle::JunctionParams;
use qthermo::thermometry::{RatioFamily, RatioKind};
use qthermo::units::{
    energy_from_ghz, energy_from_mhz, ghz, mhz, micro_ev, microseconds, millikelvin, nanoseconds, RateConvention,
};

use crate::error::{CliError, CliResult};
use crate::presets;

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    /// Fixed bath temperature; the bath follows the swept temperature when absent.
    #[serde(default)]
    pub temperature_mk: Option<f64>,
    #[serde(default)]
    pub gamma1_mhz: Option<f64>,
    #[serde(default)]
    pub tau1_us: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionConfig {
    pub gap_uev: f64,
    pub charging_energy_mhz: f64,
    pub normal_resistance_ohm: f64,
    #[serde(default = "default_transparency")]
    pub transparency_inverse: f64,
    /// Overrides the value derived from the g-e frequency and E_c.
    #[serde(default)]
    pub josephson_energy_ghz: Option<f64>,
}

fn default_transparency() -> f64 {
    JunctionParams::DEFAULT_TRANSPARENCY_INVERSE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub omega_ge_ghz: f64,
    pub omega_ef_ghz: f64,
    #[serde(default)]
    pub base_rate_model: BaseRateModel,
    #[serde(default = "default_ef_factor")]
    pub ef_rate_factor: f64,
    pub baths: Vec<BathConfig>,
    #[serde(default)]
    pub junction: Option<JunctionConfig>,
}

fn default_ef_factor() -> f64 {
    2.0
}

impl DeviceConfig {
    pub fn build(&self, at: &str) -> CliResult<(DeviceParams, Option<JunctionParams>)> {
        let omega_ge = ghz(positive(&format!("{at}.omega_ge_ghz"), self.omega_ge_ghz)?);
        let omega_ef = ghz(positive(&format!("{at}.omega_ef_ghz"), self.omega_ef_ghz)?);
        if self.baths.is_empty() {
            return Err(invalid(&format!("{at}.baths"), "bath list is empty"));
        }
        let mut baths = Vec::with_capacity(self.baths.len());
        for (i, b) in self.baths.iter().enumerate() {
            let here = format!("{at}.baths[{i}]");
            let gamma1 = match (b.gamma1_mhz, b.tau1_us) {
                (Some(g), None) => mhz(positive(&format!("{here}.gamma1_mhz"), g)?),
                (None, Some(t)) => {
                    RateConvention::TwoPi.rate_from_time(microseconds(positive(&format!("{here}.tau1_us"), t)?))
                }
                _ => return Err(invalid(&here, "give exactly one of gamma1_mhz, tau1_us")),
            };
            let temperature = match b.temperature_mk {
                Some(t) => BathTemperature::Fixed(millikelvin(positive(&format!("{here}.temperature_mk"), t)?)),
                None => BathTemperature::Tracking,
            };
            baths.push(BathCoupling { temperature, gamma1 });
        }
        let device = DeviceParams {
            omega_ge,
            omega_ef,
            baths,
            ef_rate_factor: self.ef_rate_factor,
            base_rate_model: self.base_rate_model,
        };
        device.validate().map_err(|e| invalid(at, e))?;
        let junction = match &self.junction {
            None => None,
            Some(j) => {
                let here = format!("{at}.junction");
                let gap = micro_ev(positive(&format!("{here}.gap_uev"), j.gap_uev)?);
                let ec = energy_from_mhz(positive(&format!("{here}.charging_energy_mhz"), j.charging_energy_mhz)?);
                let rn = positive(&format!("{here}.normal_resistance_ohm"), j.normal_resistance_ohm)?;
                let zeta = positive(&format!("{here}.transparency_inverse"), j.transparency_inverse)?;
                let built = match j.josephson_energy_ghz {
                    Some(ej) => JunctionParams::new(gap, ec, energy_from_ghz(ej), rn, zeta),
                    None => JunctionParams::from_transition(omega_ge, gap, ec, rn, zeta),
                };
                Some(built.map_err(|e| invalid(&here, e))?)
            }
        };
        Ok((device, junction))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub pi_pulse_ns: f64,
    pub readout_us: f64,
    pub efficiency_ge: f64,
    pub efficiency_ef: f64,
    pub readout_mode: ReadoutMode,
    pub delay_placement: DelayPlacement,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            pi_pulse_ns: 0.0,
            readout_us: 0.0,
            efficiency_ge: 1.0,
            efficiency_ef: 1.0,
            readout_mode: ReadoutMode::default(),
            delay_placement: DelayPlacement::default(),
        }
    }
}

impl ProtocolSection {
    pub fn build(&self) -> CliResult<ProtocolConfig> {
        let p = ProtocolConfig {
            pi_pulse_duration: nanoseconds(self.pi_pulse_ns),
            readout_duration: microseconds(self.readout_us),
            efficiency_ge: self.efficiency_ge,
            efficiency_ef: self.efficiency_ef,
            readout_mode: self.readout_mode,
            delay_placement: self.delay_placement,
        };
        p.validate().map_err(|e| invalid("protocol", e))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResponsesSection {
    pub phi_g: f64,
    pub phi_e: f64,
    pub phi_f: f64,
}

impl Default for ResponsesSection {
    fn default() -> Self {
        Self {
            phi_g: 0.0,
            phi_e: 1.0,
            phi_f: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Per-outcome readout noise, in the units of the responses.
    pub sigma_v: f64,
    pub shots: u64,
    pub monte_carlo: bool,
    pub t_meas_s: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            sigma_v: 0.0,
            shots: 1,
            monte_carlo: false,
            t_meas_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub start_mk: f64,
    pub stop_mk: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            start_mk: 20.0,
            stop_mk: 300.0,
            points: 29,
        }
    }
}

impl GridSection {
    /// Temperatures in kelvin.
    pub fn temperatures(&self) -> CliResult<Vec<f64>> {
        let start = positive("grid.start_mk", self.start_mk)?;
        let stop = positive("grid.stop_mk", self.stop_mk)?;
        match self.points {
            0 => Err(invalid("grid.points", "must be >= 1")),
            1 => Ok(vec![millikelvin(start)]),
            n => Ok((0..n)
                .map(|i| millikelvin(start + (stop - start) * i as f64 / (n - 1) as f64))
                .collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FisherSection {
    pub shots: u64,
    /// Level count of the degenerate comparison curve.
    pub degeneracy: u32,
    pub t_meas_s: f64,
}

impl Default for FisherSection {
    fn default() -> Self {
        Self {
            shots: 1 << 17,
            degeneracy: 10,
            t_meas_s: 29.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub cutoff_mk: f64,
    /// Estimator whose temperature a sweep file contributes, e.g. "A2".
    pub estimator: String,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            cutoff_mk: QP_ONSET_CUTOFF * 1e3,
            estimator: "A2".into(),
        }
    }
}

impl FitSection {
    pub fn kind(&self) -> CliResult<RatioKind> {
        RatioKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(&self.estimator))
            .ok_or_else(|| invalid("fit.estimator", format!("unknown estimator `{}`", self.estimator)))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub device: Option<DeviceConfig>,
    pub protocol: ProtocolSection,
    pub responses: ResponsesSection,
    pub noise: NoiseSection,
    pub grid: GridSection,
    pub fisher: FisherSection,
    pub fit: FitSection,
    pub seed: u64,
    pub output: OutputSection,
}

/// A config with the device resolved and every section checked.
pub struct Resolved {
    pub config: RunConfig,
    pub device: DeviceParams,
    pub junction: Option<JunctionParams>,
    pub sweep: SweepConfig,
    pub temperatures: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Replaces a preset reference by the preset's device and validates everything.
    pub fn resolve(mut self) -> CliResult<Resolved> {
        let device_cfg = match (&self.preset, &self.device) {
            (Some(_), Some(_)) => return Err(invalid("device", "give either a preset or an inline device, not both")),
            (Some(name), None) => presets::load(name)?,
            (None, Some(d)) => d.clone(),
            (None, None) => return Err(invalid("device", "no preset and no inline device")),
        };
        let (device, junction) = device_cfg.build("device")?;
        self.device = Some(device_cfg);
        let protocol = self.protocol.build()?;
        let r = &self.responses;
        let phi = PureStateResponses::new(r.phi_g, r.phi_e, r.phi_f);
        phi.require_distinguishable().map_err(|e| invalid("responses", e))?;
        if !(self.noise.sigma_v.is_finite() && self.noise.sigma_v >= 0.0) {
            return Err(invalid("noise.sigma_v", "must be finite and >= 0"));
        }
        if self.noise.shots == 0 {
            return Err(invalid("noise.shots", "must be >= 1"));
        }
        positive("noise.t_meas_s", self.noise.t_meas_s)?;
        if self.fisher.shots == 0 {
            return Err(invalid("fisher.shots", "must be >= 1"));
        }
        if self.fisher.degeneracy < 2 {
            return Err(invalid("fisher.degeneracy", "must be >= 2"));
        }
        positive("fisher.t_meas_s", self.fisher.t_meas_s)?;
        positive("fit.cutoff_mk", self.fit.cutoff_mk)?;
        self.fit.kind()?;
        let temperatures = self.grid.temperatures()?;
        let sweep = SweepConfig {
            device: device.clone(),
            junction,
            protocol,
            phi,
            noise: SweepNoise {
                sigma_v: self.noise.sigma_v,
                shots: self.noise.shots,
                monte_carlo: self.noise.monte_carlo,
                t_meas: self.noise.t_meas_s,
            },
            denominator_floor: qthermo::thermometry::DEFAULT_DENOMINATOR_FLOOR,
        };
        Ok(Resolved {
            config: self,
            device,
            junction,
            sweep,
            temperatures,
        })
    }
}

pub fn family_index(family: RatioFamily) -> usize {
    match family {
        RatioFamily::A => 0,
        RatioFamily::B => 1,
        RatioFamily::C => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "device": {
            "omega_ge_ghz": 6.649,
            "omega_ef_ghz": 6.417,
            "base_rate_model": "constant",
            "baths": [{ "gamma1_mhz": 0.19 }, { "temperature_mk": 400, "tau1_us": 200 }]
        },
        "protocol": { "pi_pulse_ns": 165, "readout_us": 2, "efficiency_ge": 0.9 },
        "grid": { "start_mk": 30, "stop_mk": 200, "points": 18 },
        "seed": 5
    }"#;

    #[test]
    fn round_trip_is_identity() {
        let a = RunConfig::from_json(SAMPLE).unwrap();
        let b = RunConfig::from_json(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        let resolved = RunConfig::from_json(r#"{"preset": "R4-I"}"#).unwrap().resolve().unwrap().config;
        let again = RunConfig::from_json(&serde_json::to_string(&resolved).unwrap()).unwrap();
        assert_eq!(resolved, again);
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let err = RunConfig::from_json("{\n  \"grid\": { \"start\": 3 }\n}").unwrap_err().to_string();
        assert!(err.contains("unknown field `start`") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn empty_bath_list_rejected() {
        let cfg = RunConfig::from_json(r#"{"device": {"omega_ge_ghz": 6, "omega_ef_ghz": 5.8, "baths": []}}"#).unwrap();
        let err = cfg.resolve().err().unwrap().to_string();
        assert!(err.contains("device.baths"), "{err}");
    }

    #[test]
    fn bath_needs_exactly_one_rate() {
        let cfg = RunConfig::from_json(
            r#"{"device": {"omega_ge_ghz": 6, "omega_ef_ghz": 5.8, "baths": [{"gamma1_mhz": 1, "tau1_us": 1}]}}"#,
        )
        .unwrap();
        let err = cfg.resolve().err().unwrap().to_string();
        assert!(err.contains("device.baths[0]"), "{err}");
    }

    #[test]
    fn preset_and_device_conflict() {
        let mut cfg = RunConfig::from_json(SAMPLE).unwrap();
        cfg.preset = Some("R4-I".into());
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn lab_units_convert() {
        let r = RunConfig::from_json(SAMPLE).unwrap().resolve().unwrap();
        assert!((r.device.omega_ge / (2.0 * std::f64::consts::PI) - 6.649e9).abs() < 1e-3);
        assert!(matches!(r.device.baths[1].temperature, BathTemperature::Fixed(t) if (t - 0.4).abs() < 1e-15));
        assert!((r.device.baths[1].gamma1 - 2.0 * std::f64::consts::PI / 200e-6).abs() < 1e-9);
        assert!((r.sweep.protocol.pi_pulse_duration - 165e-9).abs() < 1e-20);
        assert_eq!(r.temperatures.len(), 18);
        assert!((r.temperatures[17] - 0.2).abs() < 1e-15);
    }
}
