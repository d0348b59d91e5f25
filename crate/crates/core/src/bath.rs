//! Thermal baths: Bose-Einstein occupations, detailed-balance rates, the
//! multi-bath steady state and the effective temperatures derived from it.

use serde::{Deserialize, Serialize};

use crate::dynamics::PopulationVector;
use crate::error::{domain, require_non_negative, require_positive, Result};
use crate::units::{frequency_to_kelvin, K_B};

/// An ohmic bath at a fixed temperature with coupling rate `base_rate` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub temperature: f64,
    pub base_rate: f64,
}

impl BathSpec {
    pub fn new(temperature: f64, base_rate: f64) -> Result<Self> {
        require_positive("BathSpec", "temperature", temperature)?;
        require_non_negative("BathSpec", "base_rate", base_rate)?;
        Ok(Self {
            temperature,
            base_rate,
        })
    }
}

/// Steady state of a two-level transition coupled to one or more baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub pe_over_pg: f64,
    pub mean_photon_number: f64,
    pub total_gamma1: f64,
    pub effective_temperature: f64,
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)`.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    require_positive("bose_einstein", "omega", omega)?;
    require_positive("bose_einstein", "temperature", temperature)?;
    Ok(occupation(frequency_to_kelvin(omega) / temperature))
}

/// Occupation as a function of `x = hbar omega / k_B T`; saturates to 0 for large x.
pub(crate) fn occupation(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Upward and downward rates `(gamma n, gamma (n + 1))` induced by one bath.
pub fn bath_rates(bath: &BathSpec, omega: f64) -> Result<(f64, f64)> {
    require_non_negative("bath_rates", "base_rate", bath.base_rate)?;
    let n = bose_einstein(omega, bath.temperature)?;
    Ok((bath.base_rate * n, bath.base_rate * (n + 1.0)))
}

/// Splits a total transition rate `up + down` into a detailed-balance pair at
/// temperature `temperature`.
pub fn detailed_balance_split(total: f64, omega: f64, temperature: f64) -> Result<(f64, f64)> {
    require_non_negative("detailed_balance_split", "total", total)?;
    require_positive("detailed_balance_split", "omega", omega)?;
    require_positive("detailed_balance_split", "temperature", temperature)?;
    let boltz = (-frequency_to_kelvin(omega) / temperature).exp();
    let down = total / (1.0 + boltz);
    Ok((down * boltz, down))
}

/// Steady state of a transition coupled to several uncorrelated baths.
pub fn aggregate_baths(baths: &[BathSpec], omega: f64) -> Result<SteadyState> {
    if baths.is_empty() {
        return Err(domain("aggregate_baths", "empty bath list"));
    }
    let (mut up, mut down, mut coupling) = (0.0, 0.0, 0.0);
    for bath in baths {
        let (u, d) = bath_rates(bath, omega)?;
        up += u;
        down += d;
        coupling += bath.base_rate;
    }
    if coupling <= 0.0 {
        return Err(domain("aggregate_baths", "all bath rates are zero"));
    }
    let pe_over_pg = up / down;
    Ok(SteadyState {
        pe_over_pg,
        // sum(down - up) == sum(base_rate) exactly; use it to avoid cancellation
        mean_photon_number: up / coupling,
        total_gamma1: up + down,
        effective_temperature: teff_from_ratio(pe_over_pg, omega)?,
    })
}

/// Effective temperature of a population ratio `p_e / p_g`.
pub fn teff_from_ratio(ratio: f64, omega: f64) -> Result<f64> {
    require_positive("teff_from_ratio", "omega", omega)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(domain(
            "teff_from_ratio",
            format!("ratio must lie in (0, 1), got {ratio}"),
        ));
    }
    Ok(frequency_to_kelvin(omega) / -ratio.ln())
}

/// Boltzmann populations of three levels with energies sorted ascending.
pub fn boltzmann_populations(level_energies: [f64; 3], temperature: f64) -> Result<PopulationVector> {
    require_positive("boltzmann_populations", "temperature", temperature)?;
    if level_energies.windows(2).any(|w| w[1] < w[0]) || level_energies.iter().any(|e| !e.is_finite()) {
        return Err(domain(
            "boltzmann_populations",
            "energies must be finite and sorted ascending",
        ));
    }
    let kt = K_B * temperature;
    let w = level_energies.map(|e| (-(e - level_energies[0]) / kt).exp());
    let z: f64 = w.iter().sum();
    Ok(PopulationVector::from_array(w.map(|x| x / z)))
}

/// Thermal relaxation rate `gamma1_base * coth(hbar omega / 2 k_B T)`.
pub fn gamma1_vs_t(gamma1_base: f64, omega: f64, temperature: f64) -> Result<f64> {
    require_positive("gamma1_vs_t", "gamma1_base", gamma1_base)?;
    require_positive("gamma1_vs_t", "omega", omega)?;
    require_positive("gamma1_vs_t", "temperature", temperature)?;
    let half_x = 0.5 * frequency_to_kelvin(omega) / temperature;
    Ok(gamma1_base / half_x.tanh())
}

/// Occupation of the qubit under partial thermalization: `slope * n_mxc + n0`.
pub fn photon_mixing_relation(n_mxc: f64, slope: f64, n0: f64) -> Result<f64> {
    require_non_negative("photon_mixing_relation", "n_mxc", n_mxc)?;
    require_non_negative("photon_mixing_relation", "n0", n0)?;
    if !(0.0..=1.0).contains(&slope) {
        return Err(domain(
            "photon_mixing_relation",
            format!("slope must lie in [0, 1], got {slope}"),
        ));
    }
    Ok(slope * n_mxc + n0)
}

/// Temperature of a harmonic mode with mean occupation `n_mean`.
pub fn resonator_teff(n_mean: f64, omega_r: f64) -> Result<f64> {
    require_positive("resonator_teff", "n_mean", n_mean)?;
    require_positive("resonator_teff", "omega_r", omega_r)?;
    Ok(frequency_to_kelvin(omega_r) / (1.0 / n_mean).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ghz, HBAR};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const W_R4: f64 = 2.0 * std::f64::consts::PI * 6.649e9;

    #[test]
    fn bose_einstein_values() {
        assert_eq!(bose_einstein(W_R4, 1e-6).unwrap(), 0.0);
        // mpmath, 30 digits: 0.254398869806567787...
        assert_relative_eq!(
            bose_einstein(W_R4, 0.2).unwrap(),
            0.254_398_869_806_567_8,
            max_relative = 1e-12
        );
        let t = frequency_to_kelvin(W_R4) / std::f64::consts::LN_2;
        assert_relative_eq!(bose_einstein(W_R4, t).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn bose_einstein_rejects_bad_input() {
        assert!(bose_einstein(W_R4, 0.0).is_err());
        assert!(bose_einstein(-1.0, 0.1).is_err());
        assert!(bose_einstein(W_R4, f64::NAN).is_err());
    }

    #[test]
    fn bath_rate_values() {
        let (up, down) = bath_rates(&BathSpec::new(1e-6, 3.0).unwrap(), W_R4).unwrap();
        assert_eq!((up, down), (0.0, 3.0));
        let (up, down) = bath_rates(&BathSpec::new(0.2, 1.0).unwrap(), W_R4).unwrap();
        assert_relative_eq!(up, 0.254_398_869_806_567_8, max_relative = 1e-12);
        assert_relative_eq!(down, 1.254_398_869_806_567_8, max_relative = 1e-12);
        assert_relative_eq!(up / down, (-1.595_508_359_740_600_3_f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn aggregate_single_bath_is_equilibrium() {
        let bath = BathSpec::new(0.15, 2.0).unwrap();
        let s = aggregate_baths(&[bath], W_R4).unwrap();
        assert_relative_eq!(s.effective_temperature, 0.15, max_relative = 1e-12);
        assert_relative_eq!(s.mean_photon_number, bose_einstein(W_R4, 0.15).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(s.total_gamma1, gamma1_vs_t(2.0, W_R4, 0.15).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn aggregate_symmetric_pair_averages_occupation() {
        let baths = [BathSpec::new(0.05, 1.0).unwrap(), BathSpec::new(0.25, 1.0).unwrap()];
        let s = aggregate_baths(&baths, W_R4).unwrap();
        let expected = 0.5 * (bose_einstein(W_R4, 0.05).unwrap() + bose_einstein(W_R4, 0.25).unwrap());
        assert_relative_eq!(s.mean_photon_number, expected, max_relative = 1e-12);
    }

    #[test]
    fn aggregate_two_bath_values() {
        // mpmath: nbar = 0.2043131596810370, T_eff = 0.1798758360837430 K
        let baths = [BathSpec::new(0.1, 1.0).unwrap(), BathSpec::new(0.3, 0.5).unwrap()];
        let s = aggregate_baths(&baths, W_R4).unwrap();
        assert_relative_eq!(s.mean_photon_number, 0.204_313_159_681_037_0, max_relative = 1e-11);
        assert_relative_eq!(s.effective_temperature, 0.179_875_836_083_743_0, max_relative = 1e-11);
    }

    #[test]
    fn aggregate_errors() {
        assert!(aggregate_baths(&[], W_R4).is_err());
        assert!(aggregate_baths(&[BathSpec::new(0.1, 0.0).unwrap()], W_R4).is_err());
    }

    #[test]
    fn teff_values() {
        // saturation ratio 2.4% corresponds to ~85 mK
        let t = teff_from_ratio(0.024, W_R4).unwrap();
        assert!((t - 0.085).abs() < 0.002, "{t}");
        assert_relative_eq!(
            teff_from_ratio((-1.0f64).exp(), W_R4).unwrap(),
            HBAR * W_R4 / K_B,
            max_relative = 1e-14
        );
        let ratio = (-frequency_to_kelvin(W_R4) / 0.15).exp();
        assert_relative_eq!(teff_from_ratio(ratio, W_R4).unwrap(), 0.15, max_relative = 1e-12);
        assert!(teff_from_ratio(0.0, W_R4).is_err());
        assert!(teff_from_ratio(1.0, W_R4).is_err());
        assert!(teff_from_ratio(1.3, W_R4).is_err());
    }

    #[test]
    fn boltzmann_three_level_ratios() {
        let wge = ghz(6.65);
        let wgf = wge + ghz(6.65 - 0.23);
        let p = boltzmann_populations([0.0, HBAR * wge, HBAR * wgf], 0.3).unwrap();
        assert!((p.pe / p.pg - 0.35).abs() < 0.01);
        assert!((p.pf / p.pg - 0.12).abs() < 0.01);
    }

    #[test]
    fn boltzmann_limits() {
        let p = boltzmann_populations([0.0, 1e-23, 2e-23], 1e-6).unwrap();
        assert_eq!(p.to_array(), [1.0, 0.0, 0.0]);
        let p = boltzmann_populations([1e-24; 3], 0.1).unwrap();
        for x in p.to_array() {
            assert_relative_eq!(x, 1.0 / 3.0, max_relative = 1e-15);
        }
        assert!(boltzmann_populations([0.0, 1e-23, 2e-23], 0.0).is_err());
        assert!(boltzmann_populations([0.0, 2e-23, 1e-23], 0.1).is_err());
    }

    #[test]
    fn gamma1_vs_t_values() {
        let g0 = 2.0 * std::f64::consts::PI * 0.19e6;
        assert_relative_eq!(gamma1_vs_t(g0, W_R4, 1e-5).unwrap(), g0, max_relative = 1e-15);
        // mpmath coth evaluation: 1801210.599918174745...
        assert_relative_eq!(gamma1_vs_t(g0, W_R4, 0.2).unwrap(), 1_801_210.599_918_174_7, max_relative = 1e-12);
        // d gamma1 / d n = 2 gamma1_base
        let (t1, t2) = (0.12, 0.18);
        let slope = (gamma1_vs_t(g0, W_R4, t2).unwrap() - gamma1_vs_t(g0, W_R4, t1).unwrap())
            / (bose_einstein(W_R4, t2).unwrap() - bose_einstein(W_R4, t1).unwrap());
        assert_relative_eq!(slope, 2.0 * g0, max_relative = 1e-10);
    }

    #[test]
    fn photon_mixing_values() {
        assert_eq!(photon_mixing_relation(0.3, 1.0, 0.0).unwrap(), 0.3);
        assert_eq!(photon_mixing_relation(0.0, 0.97, 0.023).unwrap(), 0.023);
        let n = bose_einstein(W_R4, 0.2).unwrap();
        assert_relative_eq!(photon_mixing_relation(n, 0.97, 0.023).unwrap(), 0.97 * n + 0.023);
        assert!(photon_mixing_relation(0.1, 1.2, 0.0).is_err());
        assert!(photon_mixing_relation(0.1, 0.5, -0.1).is_err());
    }

    #[test]
    fn resonator_teff_values() {
        let wr = ghz(5.0);
        let n = bose_einstein(wr, 0.123).unwrap();
        assert_relative_eq!(resonator_teff(n, wr).unwrap(), 0.123, max_relative = 1e-12);
        // mpmath: h * 5 GHz / (k_B ln 2) = 0.346192209098307748 K
        assert_relative_eq!(resonator_teff(1.0, wr).unwrap(), 0.346_192_209_098_307_7, max_relative = 1e-12);
        for n in [150.0, 1e3, 1e5] {
            let t = resonator_teff(n, wr).unwrap();
            let asymptote = frequency_to_kelvin(wr) * n;
            assert!((t / asymptote - 1.0).abs() < 0.01);
        }
        assert!(resonator_teff(0.0, wr).is_err());
    }

    proptest! {
        #[test]
        fn detailed_balance(t in 0.005f64..5.0, f in 1.0f64..12.0, g in 0.0f64..1e7) {
            let w = ghz(f);
            let (up, down) = bath_rates(&BathSpec::new(t, g).unwrap(), w).unwrap();
            if g > 0.0 {
                let expected = (-frequency_to_kelvin(w) / t).exp();
                prop_assert!((up / down / expected - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn teff_round_trip(t in 0.01f64..10.0) {
            let ratio = (-frequency_to_kelvin(W_R4) / t).exp();
            let back = teff_from_ratio(ratio, W_R4).unwrap();
            prop_assert!((back / t - 1.0).abs() < 1e-9);
        }

        #[test]
        fn boltzmann_normalized_and_ordered(t in 0.001f64..10.0, e1 in 0.0f64..1e-22, e2 in 0.0f64..1e-22) {
            let p = boltzmann_populations([0.0, e1, e1 + e2], t).unwrap();
            prop_assert!((p.pg + p.pe + p.pf - 1.0).abs() < 1e-12);
            prop_assert!(p.pg >= p.pe && p.pe >= p.pf);
        }

        #[test]
        fn aggregate_teff_between_bath_temperatures(
            t1 in 0.01f64..1.0, t2 in 0.01f64..1.0, g1 in 0.01f64..10.0, g2 in 0.01f64..10.0
        ) {
            let baths = [BathSpec::new(t1, g1).unwrap(), BathSpec::new(t2, g2).unwrap()];
            let s = aggregate_baths(&baths, W_R4).unwrap();
            let (lo, hi) = (t1.min(t2), t1.max(t2));
            prop_assert!(s.effective_temperature >= lo * (1.0 - 1e-12));
            prop_assert!(s.effective_temperature <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn bose_einstein_monotone(t in 0.005f64..5.0) {
            prop_assert!(bose_einstein(W_R4, t * 1.01).unwrap() > bose_einstein(W_R4, t).unwrap());
        }
    }
}
