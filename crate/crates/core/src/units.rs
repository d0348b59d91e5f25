//! Physical constants (exact SI 2019 values) and lab-unit conversions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Planck constant, J s.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = H / (2.0 * PI);
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Conductance quantum e^2/h, S.
pub const G_K: f64 = E_CHARGE * E_CHARGE / H;

/// `hbar * omega / k_B` in kelvin.
pub fn frequency_to_kelvin(omega: f64) -> f64 {
    HBAR * omega / K_B
}

/// Angular frequency from a cyclic frequency in GHz.
pub fn ghz(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz * 1e9
}

/// Angular frequency from a cyclic frequency in MHz.
pub fn mhz(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

/// Cyclic frequency in GHz from an angular frequency.
pub fn to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

pub fn to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

pub fn millikelvin(t_mk: f64) -> f64 {
    t_mk * 1e-3
}

pub fn to_millikelvin(t: f64) -> f64 {
    t * 1e3
}

pub fn microseconds(t_us: f64) -> f64 {
    t_us * 1e-6
}

pub fn to_microseconds(t: f64) -> f64 {
    t * 1e6
}

pub fn nanoseconds(t_ns: f64) -> f64 {
    t_ns * 1e-9
}

/// Energy in joules from micro-electronvolts.
pub fn micro_ev(e_uev: f64) -> f64 {
    e_uev * 1e-6 * E_CHARGE
}

/// Energy in joules from an `E/h` value in MHz.
pub fn energy_from_mhz(e_over_h_mhz: f64) -> f64 {
    H * e_over_h_mhz * 1e6
}

/// Energy in joules from an `E/h` value in GHz.
pub fn energy_from_ghz(e_over_h_ghz: f64) -> f64 {
    H * e_over_h_ghz * 1e9
}

/// Relation between a rate `gamma` (rad/s) and its characteristic time.
///
/// The default follows `gamma = 2 pi / tau`; `Unit` uses `gamma = 1 / tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateConvention {
    #[default]
    TwoPi,
    Unit,
}

impl RateConvention {
    fn factor(self) -> f64 {
        match self {
            RateConvention::TwoPi => 2.0 * PI,
            RateConvention::Unit => 1.0,
        }
    }

    pub fn rate_from_time(self, tau: f64) -> f64 {
        self.factor() / tau
    }

    pub fn time_from_rate(self, gamma: f64) -> f64 {
        self.factor() / gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions_are_inverse() {
        for conv in [RateConvention::TwoPi, RateConvention::Unit] {
            let g = conv.rate_from_time(5.5e-6);
            assert!((conv.time_from_rate(g) - 5.5e-6).abs() < 1e-20);
        }
        assert!((RateConvention::TwoPi.rate_from_time(1.0) - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn conductance_quantum() {
        // e^2/h = 3.874045865e-5 S
        assert!((G_K - 3.874_045_865e-5).abs() < 1e-14);
    }

    #[test]
    fn lab_units() {
        assert!((to_ghz(ghz(6.649)) - 6.649).abs() < 1e-12);
        assert!((energy_from_mhz(232.0) / H - 232e6).abs() < 1e-3);
        assert!((micro_ev(180.0) / E_CHARGE - 180e-6).abs() < 1e-18);
    }
}
