//! Relaxation and dephasing induced by thermal quasiparticles in the junction.

use serde::{Deserialize, Serialize};

use crate::bessel::bessel_k0_scaled;
use crate::device::DeviceParams;
use crate::error::{domain, require_positive, Result};
use crate::units::{G_K, HBAR, K_B};

const TRANSMON_RATIO: f64 = 20.0;

/// Junction and charging parameters. Energies in joules, resistance in ohms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    pub gap: f64,
    pub charging_energy: f64,
    pub josephson_energy: f64,
    pub normal_resistance: f64,
    /// Subgap transparency factor `zeta^-1`, typically 1e3 to 1e5.
    pub subgap_transparency_inverse: f64,
}

impl JunctionParams {
    pub const DEFAULT_TRANSPARENCY_INVERSE: f64 = 1e4;

    pub fn new(
        gap: f64,
        charging_energy: f64,
        josephson_energy: f64,
        normal_resistance: f64,
        subgap_transparency_inverse: f64,
    ) -> Result<Self> {
        let j = Self {
            gap,
            charging_energy,
            josephson_energy,
            normal_resistance,
            subgap_transparency_inverse,
        };
        j.validate()?;
        Ok(j)
    }

    /// Derives `E_J` from the g-e transition via `hbar omega_ge = sqrt(8 E_J E_c) - E_c`.
    pub fn from_transition(
        omega_ge: f64,
        gap: f64,
        charging_energy: f64,
        normal_resistance: f64,
        subgap_transparency_inverse: f64,
    ) -> Result<Self> {
        require_positive("JunctionParams", "omega_ge", omega_ge)?;
        require_positive("JunctionParams", "charging_energy", charging_energy)?;
        let ej = josephson_energy_from_transition(omega_ge, charging_energy);
        Self::new(gap, charging_energy, ej, normal_resistance, subgap_transparency_inverse)
    }

    /// Checks positivity; warns (does not fail) outside the transmon regime.
    pub fn validate(&self) -> Result<()> {
        require_positive("JunctionParams", "gap", self.gap)?;
        require_positive("JunctionParams", "charging_energy", self.charging_energy)?;
        require_positive("JunctionParams", "josephson_energy", self.josephson_energy)?;
        require_positive("JunctionParams", "normal_resistance", self.normal_resistance)?;
        require_positive(
            "JunctionParams",
            "subgap_transparency_inverse",
            self.subgap_transparency_inverse,
        )?;
        let ratio = self.josephson_energy / self.charging_energy;
        if ratio < TRANSMON_RATIO {
            log::warn!("E_J/E_c = {ratio:.2} is below {TRANSMON_RATIO}; outside the transmon regime");
        }
        Ok(())
    }

    /// `g_T / 2 g_K` with `g_T = 1/R_n`.
    pub fn conductance_ratio(&self) -> f64 {
        1.0 / (self.normal_resistance * 2.0 * G_K)
    }

    /// Effective number of junction channels `N_e = zeta^-1 g_T / 2 g_K`.
    pub fn effective_channels(&self) -> f64 {
        self.subgap_transparency_inverse * self.conductance_ratio()
    }
}

pub fn josephson_energy_from_transition(omega_ge: f64, charging_energy: f64) -> f64 {
    let s = HBAR * omega_ge + charging_energy;
    s * s / (8.0 * charging_energy)
}

/// `omega_p = sqrt(8 E_J E_c) / hbar`.
pub fn plasma_frequency(junction: &JunctionParams) -> Result<f64> {
    require_positive("plasma_frequency", "josephson_energy", junction.josephson_energy)?;
    require_positive("plasma_frequency", "charging_energy", junction.charging_energy)?;
    Ok((8.0 * junction.josephson_energy * junction.charging_energy).sqrt() / HBAR)
}

/// Equilibrium quasiparticle density `sqrt(2 pi k_B T / gap) exp(-gap / k_B T)`.
pub fn xqp_equilibrium(temperature: f64, gap: f64) -> Result<f64> {
    require_positive("xqp_equilibrium", "temperature", temperature)?;
    require_positive("xqp_equilibrium", "gap", gap)?;
    let r = K_B * temperature / gap;
    Ok((2.0 * std::f64::consts::PI * r).sqrt() * (-1.0 / r).exp())
}

/// The two non-negative contributions to the quasiparticle relaxation rate:
/// the density term and the Bessel term.
pub fn gamma1_qp_terms(device: &DeviceParams, junction: &JunctionParams, temperature: f64) -> Result<(f64, f64)> {
    require_positive("gamma1_qp", "temperature", temperature)?;
    require_positive("gamma1_qp", "omega_ge", device.omega_ge)?;
    let wp = plasma_frequency(junction)?;
    let prefactor = wp * wp / (std::f64::consts::PI * device.omega_ge);
    let kt = K_B * temperature;
    let density = xqp_equilibrium(temperature, junction.gap)? * (2.0 * junction.gap / (HBAR * device.omega_ge)).sqrt();
    let y = HBAR * device.omega_ge / (2.0 * kt);
    // cosh(y) K0(y) = e^y K0(y) (1 + e^{-2y}) / 2, finite for any y
    let cosh_k0 = 0.5 * bessel_k0_scaled(y)? * (1.0 + (-2.0 * y).exp());
    let bessel = 4.0 * (-junction.gap / kt).exp() * cosh_k0;
    Ok((prefactor * density, prefactor * bessel))
}

/// Quasiparticle-induced relaxation rate of the g-e transition (rad/s).
pub fn gamma1_qp(device: &DeviceParams, junction: &JunctionParams, temperature: f64) -> Result<f64> {
    let (a, b) = gamma1_qp_terms(device, junction, temperature)?;
    Ok(a + b)
}

/// Pure dephasing from quasiparticle tunneling, `(E_c / pi hbar)(k_B T / gap) exp(-gap / k_B T)`.
pub fn gamma_phi_qp_tunneling(junction: &JunctionParams, temperature: f64) -> Result<f64> {
    require_positive("gamma_phi_qp_tunneling", "temperature", temperature)?;
    require_positive("gamma_phi_qp_tunneling", "gap", junction.gap)?;
    let kt = K_B * temperature;
    Ok(junction.charging_energy / (std::f64::consts::PI * HBAR) * (kt / junction.gap) * (-junction.gap / kt).exp())
}

/// Order-of-magnitude dephasing from Andreev bound state occupation,
/// `4 pi (omega_p^2 / omega_ge) sqrt(exp(-gap / k_B T) / N_e)`.
pub fn gamma_phi_andreev(device: &DeviceParams, junction: &JunctionParams, temperature: f64) -> Result<f64> {
    require_positive("gamma_phi_andreev", "temperature", temperature)?;
    require_positive("gamma_phi_andreev", "omega_ge", device.omega_ge)?;
    let n_e = junction.effective_channels();
    require_positive("gamma_phi_andreev", "N_e", n_e)?;
    let wp = plasma_frequency(junction)?;
    let x_andreev = (-junction.gap / (K_B * temperature)).exp();
    Ok(4.0 * std::f64::consts::PI * wp * wp / device.omega_ge * (x_andreev / n_e).sqrt())
}

/// Pure dephasing rate `gamma2 - gamma1 / 2`.
pub fn dephasing_from_decoherence(gamma2: f64, gamma1: f64) -> Result<f64> {
    let gphi = gamma2 - 0.5 * gamma1;
    if !gphi.is_finite() || gphi < 0.0 {
        return Err(domain(
            "dephasing_from_decoherence",
            format!("gamma2 = {gamma2} is below gamma1/2 = {}", 0.5 * gamma1),
        ));
    }
    Ok(gphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::BaseRateModel;
    use crate::units::{ghz, mhz, micro_ev, energy_from_mhz};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn r4() -> (DeviceParams, JunctionParams) {
        let device = DeviceParams::single_bath(ghz(6.649), ghz(6.417), mhz(0.19), BaseRateModel::Constant).unwrap();
        let junction = JunctionParams::from_transition(device.omega_ge, micro_ev(180.0), energy_from_mhz(232.0), 5e3, 1e4).unwrap();
        (device, junction)
    }

    fn k0_quadrature(x: f64) -> f64 {
        let h: f64 = 1.0 / 128.0;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp();
            sum += v;
            if v < 1e-30 * sum {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn plasma_frequency_examples() {
        let (device, junction) = r4();
        assert_relative_eq!(plasma_frequency(&junction).unwrap() / (2.0 * std::f64::consts::PI), 6.881e9, max_relative = 1e-12);
        assert_relative_eq!(plasma_frequency(&junction).unwrap(), device.omega_ge + junction.charging_energy / HBAR, max_relative = 1e-12);
        let e = HBAR / 8f64.sqrt();
        let unit = JunctionParams::new(1.0, e, e, 1.0, 1.0).unwrap();
        assert_relative_eq!(plasma_frequency(&unit).unwrap(), 1.0, max_relative = 1e-14);
        let doubled = JunctionParams { josephson_energy: 2.0 * e, ..unit };
        assert_relative_eq!(plasma_frequency(&doubled).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn xqp_examples() {
        // gap / k_B = 180 ueV / k_B = 2.0888133 K
        let gap = micro_ev(180.0);
        let d_over_k = 180e-6 * 1.602_176_634e-19 / 1.380_649e-23;
        assert_relative_eq!(d_over_k, 2.088_813_26, max_relative = 1e-8);
        let oracle = (2.0 * std::f64::consts::PI * 0.25 / d_over_k).sqrt() * (-d_over_k / 0.25).exp();
        assert_relative_eq!(xqp_equilibrium(0.25, gap).unwrap(), oracle, max_relative = 1e-12);
        assert_relative_eq!(xqp_equilibrium(0.25, gap).unwrap(), 2.04e-4, max_relative = 5e-3);
        assert_eq!(xqp_equilibrium(1e-3, gap).unwrap(), 0.0);
        assert_relative_eq!(
            xqp_equilibrium(d_over_k, gap).unwrap(),
            (2.0 * std::f64::consts::PI).sqrt() / std::f64::consts::E,
            max_relative = 1e-12
        );
        assert!(xqp_equilibrium(0.0, gap).is_err());
    }

    #[test]
    fn gamma1_qp_against_component_oracle() {
        let (device, junction) = r4();
        let h = 6.626_070_15e-34;
        let k = 1.380_649e-23;
        let d_over_k = 180e-6 * 1.602_176_634e-19 / k;
        let (fge, fp) = (6.649e9, 6.881e9);
        for t in [0.15, 0.25, 0.3] {
            let x = (2.0 * std::f64::consts::PI * t / d_over_k).sqrt() * (-d_over_k / t).exp();
            let y = h * fge / (2.0 * k * t);
            let gap_ratio = 2.0 * d_over_k * k / (h * fge);
            let wp2_over_w = 2.0 * std::f64::consts::PI * fp * fp / fge;
            let oracle = wp2_over_w / std::f64::consts::PI
                * (x * gap_ratio.sqrt() + 4.0 * (-d_over_k / t).exp() * y.cosh() * k0_quadrature(y));
            assert_relative_eq!(gamma1_qp(&device, &junction, t).unwrap(), oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn tau1_drops_below_half_microsecond_at_250mk() {
        let (device, junction) = r4();
        let tau = 2.0 * std::f64::consts::PI / gamma1_qp(&device, &junction, 0.25).unwrap();
        assert!(tau < 0.5e-6, "tau1_qp = {tau}");
        assert!(gamma1_qp(&device, &junction, 5e-3).unwrap() < 1e-150);
    }

    #[test]
    fn tunneling_dephasing() {
        let (_, junction) = r4();
        assert_eq!(gamma_phi_qp_tunneling(&junction, 1e-3).unwrap(), 0.0);
        let g = gamma_phi_qp_tunneling(&junction, 0.3).unwrap();
        // about 1% of a 1 us dephasing rate
        let relative = g / (2.0 * std::f64::consts::PI / 1e-6);
        assert!(relative > 0.005 && relative < 0.015, "{relative}");
        let doubled = JunctionParams { charging_energy: 2.0 * junction.charging_energy, ..junction };
        assert_relative_eq!(gamma_phi_qp_tunneling(&doubled, 0.3).unwrap(), 2.0 * g, max_relative = 1e-14);
    }

    #[test]
    fn andreev_dephasing() {
        let (device, junction) = r4();
        assert_eq!(gamma_phi_andreev(&device, &junction, 1e-3).unwrap(), 0.0);
        let lo = JunctionParams { normal_resistance: 5.5e3, ..junction }.conductance_ratio();
        let hi = JunctionParams { normal_resistance: 4.4e3, ..junction }.conductance_ratio();
        assert!(lo > 2.3 && lo < 2.4, "{lo}");
        assert!(hi > 2.9 && hi < 3.0, "{hi}");
        let g = gamma_phi_andreev(&device, &junction, 0.3).unwrap();
        let q = JunctionParams { subgap_transparency_inverse: 4e4, ..junction };
        assert_relative_eq!(gamma_phi_andreev(&device, &q, 0.3).unwrap(), 0.5 * g, max_relative = 1e-14);
    }

    #[test]
    fn dephasing_from_decoherence_examples() {
        assert_eq!(dephasing_from_decoherence(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(dephasing_from_decoherence(1.0, 1.0).unwrap(), 0.5);
        assert!(dephasing_from_decoherence(0.4, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn channels_increase_with_temperature(t in 0.01..0.99f64) {
            let (device, junction) = r4();
            let t2 = t * 1.01;
            let (a1, b1) = gamma1_qp_terms(&device, &junction, t).unwrap();
            let (a2, b2) = gamma1_qp_terms(&device, &junction, t2).unwrap();
            prop_assert!(a1 >= 0.0 && b1 >= 0.0);
            prop_assert!(a2 + b2 > a1 + b1 || a1 + b1 == 0.0);
            let g1 = gamma_phi_qp_tunneling(&junction, t).unwrap();
            prop_assert!(gamma_phi_qp_tunneling(&junction, t2).unwrap() > g1 || g1 == 0.0);
            let a1 = gamma_phi_andreev(&device, &junction, t).unwrap();
            prop_assert!(gamma_phi_andreev(&device, &junction, t2).unwrap() > a1);
        }
    }
}
