//! Static qubit description: transition frequencies and bath couplings.

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_non_negative, require_positive, Result};
use crate::units::HBAR;

/// Temperature of a bath: either the controlled (swept) temperature or a fixed value in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathTemperature {
    Tracking,
    Fixed(f64),
}

impl BathTemperature {
    pub fn resolve(self, controlled: f64) -> f64 {
        match self {
            BathTemperature::Tracking => controlled,
            BathTemperature::Fixed(t) => t,
        }
    }
}

/// One bath coupled to the g-e transition with rate `gamma1` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathCoupling {
    pub temperature: BathTemperature,
    pub gamma1: f64,
}

/// How a bath's coupling rate enters the transition rates.
///
/// `Thermal`: `gamma1` is the zero-temperature coupling, rates are `gamma1 n` and
/// `gamma1 (n + 1)`. `Constant`: `gamma1` is the total rate `up + down`, split
/// by detailed balance, so the decay time does not depend on the bath temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseRateModel {
    #[default]
    Thermal,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub omega_ge: f64,
    pub omega_ef: f64,
    pub baths: Vec<BathCoupling>,
    /// Multiplier from the g-e coupling rate to the e-f coupling rate.
    pub ef_rate_factor: f64,
    pub base_rate_model: BaseRateModel,
}

impl DeviceParams {
    /// A device coupled to a single bath that follows the controlled temperature.
    pub fn single_bath(omega_ge: f64, omega_ef: f64, gamma1: f64, model: BaseRateModel) -> Result<Self> {
        let device = Self {
            omega_ge,
            omega_ef,
            baths: vec![BathCoupling {
                temperature: BathTemperature::Tracking,
                gamma1,
            }],
            ef_rate_factor: 2.0,
            base_rate_model: model,
        };
        device.validate()?;
        Ok(device)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("DeviceParams", "omega_ge", self.omega_ge)?;
        require_positive("DeviceParams", "omega_ef", self.omega_ef)?;
        require_non_negative("DeviceParams", "ef_rate_factor", self.ef_rate_factor)?;
        if self.baths.is_empty() {
            return Err(domain("DeviceParams", "at least one bath is required"));
        }
        for bath in &self.baths {
            require_non_negative("DeviceParams", "bath gamma1", bath.gamma1)?;
            if let BathTemperature::Fixed(t) = bath.temperature {
                require_positive("DeviceParams", "bath temperature", t)?;
            }
        }
        Ok(())
    }

    pub fn omega_gf(&self) -> f64 {
        self.omega_ge + self.omega_ef
    }

    /// `omega_ef - omega_ge`; negative for a transmon.
    pub fn anharmonicity(&self) -> f64 {
        self.omega_ef - self.omega_ge
    }

    /// Sum of the g-e coupling rates of all baths.
    pub fn gamma1_base(&self) -> f64 {
        self.baths.iter().map(|b| b.gamma1).sum()
    }

    pub fn level_energies(&self) -> [f64; 3] {
        [0.0, HBAR * self.omega_ge, HBAR * self.omega_gf()]
    }
}
