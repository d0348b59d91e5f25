//! Statistical error propagation for the ratio estimators and the quantum
//! Fisher information bounds.

use serde::{Deserialize, Serialize};

use crate::dynamics::PopulationVector;
use crate::error::{domain, require_non_negative, require_positive, Result};
use crate::protocol::PureStateResponses;
use crate::thermometry::RatioFamily;

/// Readout noise of the measured differences and the number of averaged shots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Single-shot standard deviations of the differences `a`, `b`, `c`.
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: f64,
    pub shots: u64,
}

impl NoiseModel {
    pub fn new(sigma_a: f64, sigma_b: f64, sigma_c: f64, shots: u64) -> Result<Self> {
        let n = Self {
            sigma_a,
            sigma_b,
            sigma_c,
            shots,
        };
        n.validate()?;
        Ok(n)
    }

    /// Identical independent per-outcome noise `sigma_v`: each difference gets `2 sigma_v^2`.
    pub fn from_voltage_sigma(sigma_v: f64, shots: u64) -> Result<Self> {
        require_non_negative("NoiseModel", "sigma_v", sigma_v)?;
        let s = std::f64::consts::SQRT_2 * sigma_v;
        Self::new(s, s, s, shots)
    }

    pub fn noiseless(shots: u64) -> Self {
        Self {
            sigma_a: 0.0,
            sigma_b: 0.0,
            sigma_c: 0.0,
            shots,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("NoiseModel", "sigma_a", self.sigma_a)?;
        require_non_negative("NoiseModel", "sigma_b", self.sigma_b)?;
        require_non_negative("NoiseModel", "sigma_c", self.sigma_c)?;
        if self.shots == 0 {
            return Err(domain("NoiseModel", "shots must be >= 1"));
        }
        Ok(())
    }
}

/// Index `i` (0 = g, 1 = e, 2 = f) of the response difference `dphi_i` shared by
/// the differences of a column: method 1 uses `dphi_f`, 2 uses `dphi_e`, 3 uses `dphi_g`.
pub fn column_difference_index(method: u8) -> Result<usize> {
    match method {
        1 => Ok(2),
        2 => Ok(1),
        3 => Ok(0),
        _ => Err(domain("column_difference_index", format!("method must be 1, 2 or 3, got {method}"))),
    }
}

/// `F(dphi_i) = (dphi_j^2 + dphi_k^2) / dphi_i^2` for each `i`.
pub fn f_function(delta_phi: [f64; 3]) -> Result<[f64; 3]> {
    if delta_phi.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(domain("f_function", "response differences must be finite and non-zero"));
    }
    let sq = delta_phi.map(|d| d * d);
    Ok(std::array::from_fn(|i| (sq[(i + 1) % 3] + sq[(i + 2) % 3]) / sq[i]))
}

// (dphi_i^2, dphi_j^2 + dphi_k^2) for the column
fn split_differences(phi: &PureStateResponses, method: u8) -> Result<(f64, f64)> {
    let i = column_difference_index(method)?;
    let sq = phi.differences().map(|d| d * d);
    Ok((sq[i], sq[(i + 1) % 3] + sq[(i + 2) % 3]))
}

/// Mean differences `(a, b, c) = ((p_e - p_f), (p_g - p_e), (p_g - p_f)) * dphi_i` of a column.
pub fn abc_means(p: &PopulationVector, phi: &PureStateResponses, method: u8) -> Result<[f64; 3]> {
    let d = phi.differences()[column_difference_index(method)?];
    Ok([(p.pe - p.pf) * d, (p.pg - p.pe) * d, (p.pg - p.pf) * d])
}

/// Single-shot variances `(da^2, db^2, dc^2)` of a column's differences: the
/// projection noise of the two outcomes in each difference plus `sigma^2`.
pub fn abc_variances(p: &PopulationVector, phi: &PureStateResponses, noise: &NoiseModel, method: u8) -> Result<[f64; 3]> {
    noise.validate()?;
    let (di, djk) = split_differences(phi, method)?;
    let PopulationVector { pg, pe, pf } = *p;
    Ok([
        2.0 * pe * pf * di + (pe + pf) * pg * djk + noise.sigma_a.powi(2),
        2.0 * pe * pg * di + (pe + pg) * pf * djk + noise.sigma_b.powi(2),
        2.0 * pg * pf * di + (pg + pf) * pe * djk + noise.sigma_c.powi(2),
    ])
}

/// Squared relative errors `((da/a)^2, (db/b)^2, (dc/c)^2)` of the shot-averaged differences.
pub fn abc_relative_errors_squared(
    p: &PopulationVector,
    phi: &PureStateResponses,
    noise: &NoiseModel,
    method: u8,
) -> Result<[f64; 3]> {
    let var = abc_variances(p, phi, noise, method)?;
    let (di, _) = split_differences(phi, method)?;
    if di == 0.0 {
        return Err(domain("abc_relative_errors", "response difference of the column is zero"));
    }
    let gaps = [(p.pe - p.pf, "p_e and p_f"), (p.pg - p.pe, "p_g and p_e"), (p.pg - p.pf, "p_g and p_f")];
    let mut out = [0.0; 3];
    for (k, (gap, pair)) in gaps.iter().enumerate() {
        if *gap == 0.0 {
            return Err(domain("abc_relative_errors", format!("populations {pair} coincide")));
        }
        out[k] = var[k] / (noise.shots as f64 * gap * gap * di);
    }
    Ok(out)
}

/// Relative errors `|da/a|, |db/b|, |dc/c|` of the shot-averaged differences.
pub fn abc_relative_errors(p: &PopulationVector, phi: &PureStateResponses, noise: &NoiseModel, method: u8) -> Result<[f64; 3]> {
    Ok(abc_relative_errors_squared(p, phi, noise, method)?.map(f64::sqrt))
}

/// Relative errors of `(A, B, C) = (b/c, a/b, a/c)` from those of `a`, `b`, `c`.
pub fn ratio_relative_errors(abc: [f64; 3]) -> [f64; 3] {
    let [a, b, c] = abc;
    [b.hypot(c), a.hypot(b), a.hypot(c)]
}

/// `|dC/C| = sqrt((dA/A)^2 + (dB/B)^2)`, valid because `C = A B`.
pub fn abc_error_composition(rel_a: f64, rel_b: f64) -> f64 {
    rel_a.hypot(rel_b)
}

/// Absolute error of `C = A B`: `dC^2 = (C/A)^2 dA^2 + (C/B)^2 dB^2`.
pub fn compose_absolute_error(a: f64, b: f64, delta_a: f64, delta_b: f64) -> f64 {
    let c = a * b;
    ((c / a * delta_a).powi(2) + (c / b * delta_b).powi(2)).sqrt()
}

/// Relative temperature error from the relative error of a ratio, `x = hbar omega_ge / k_B T`.
pub fn temp_error_from_ratio(family: RatioFamily, x: f64, ratio_rel_error: f64) -> Result<f64> {
    require_positive("temp_error_from_ratio", "x", x)?;
    require_non_negative("temp_error_from_ratio", "ratio_rel_error", ratio_rel_error)?;
    let coefficient = match family {
        RatioFamily::A => x.exp_m1() / x,
        // (e^x - 1) / (x e^x) = (1 - e^-x) / x
        RatioFamily::B => -(-x).exp_m1() / x,
        RatioFamily::C => 1.0 / x,
    };
    Ok(coefficient * ratio_rel_error)
}

/// Single-shot squared relative error bound of a two-level thermometer whose excited
/// level is `(degeneracy - 1)`-fold degenerate: `(N - 1 + e^x)^2 / ((N - 1) x^2 e^x)`.
pub fn qfi_bound_two_level(x: f64, degeneracy: u32) -> Result<f64> {
    require_positive("qfi_bound_two_level", "x", x)?;
    if degeneracy < 2 {
        return Err(domain("qfi_bound_two_level", "degeneracy must be >= 2"));
    }
    let m = (degeneracy - 1) as f64;
    // divide through by e^x to stay finite
    let s = m * (-0.5 * x).exp() + (0.5 * x).exp();
    Ok(s * s / (m * x * x))
}

/// Single-shot squared relative error of the three-level thermometer in the closed form
/// `(e^(x1+x2) + e^x1 + e^x2)^2 / ([x1^2 e^x2 + x2^2 e^x1 + (x1 + x2)^2] e^(x1+x2))`.
///
/// The last bracket term carries `(x1 + x2)^2` where the exact Cramer-Rao value
/// ([`qfi_bound_boltzmann`]) has `(x2 - x1)^2`; the two agree at low temperature
/// and this form is never above the exact one.
pub fn qfi_bound_three_level(x_ge: f64, x_gf: f64) -> Result<f64> {
    require_positive("qfi_bound_three_level", "x_ge", x_ge)?;
    if !x_gf.is_finite() || x_gf <= x_ge {
        return Err(domain("qfi_bound_three_level", "x_gf must exceed x_ge"));
    }
    // numerator and denominator scaled by e^-2(x_ge + x_gf)
    let a = (-x_ge).exp();
    let b = (-x_gf).exp();
    let num = (1.0 + a + b).powi(2);
    let den = x_ge * x_ge * a + x_gf * x_gf * b + (x_ge + x_gf).powi(2) * a * b;
    Ok(num / den)
}

/// Exact single-shot Cramer-Rao bound `1 / Var(E / k_B T)` for a Boltzmann state
/// with reduced level energies `xs` (ground first, `xs[0] = 0`).
pub fn qfi_bound_boltzmann(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 || xs.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(domain("qfi_bound_boltzmann", "need at least two finite non-negative levels"));
    }
    let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = xs.iter().map(|x| (-(x - x0)).exp()).collect();
    let z: f64 = w.iter().sum();
    let mean: f64 = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / z;
    let var: f64 = xs.iter().zip(&w).map(|(x, w)| (x - mean).powi(2) * w).sum::<f64>() / z;
    if var <= 0.0 {
        return Err(domain("qfi_bound_boltzmann", "energy variance vanishes"));
    }
    Ok(1.0 / var)
}

/// Noise-equivalent temperature `sqrt(dT^2 t_meas)` in K/sqrt(Hz).
pub fn net(delta_t: f64, t_meas: f64) -> Result<f64> {
    require_non_negative("net", "delta_t", delta_t)?;
    require_positive("net", "t_meas", t_meas)?;
    Ok((delta_t * delta_t * t_meas).sqrt())
}

/// Propagated errors of one column at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Absolute errors of the shot-averaged differences `a`, `b`, `c`.
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    /// Relative errors of `A`, `B`, `C`.
    pub relative: [f64; 3],
    /// Relative temperature errors of families A, B, C.
    pub temperature_relative: [f64; 3],
    /// NET of each family, K/sqrt(Hz).
    pub net: [f64; 3],
}

/// Full error budget of column `method` for populations `p` at temperature
/// `temperature`, with `t_meas` the wall-clock time of one averaged measurement.
pub fn error_report(
    p: &PopulationVector,
    phi: &PureStateResponses,
    noise: &NoiseModel,
    method: u8,
    omega_ge: f64,
    temperature: f64,
    t_meas: f64,
) -> Result<ErrorReport> {
    let var = abc_variances(p, phi, noise, method)?;
    let n = noise.shots as f64;
    let relative = ratio_relative_errors(abc_relative_errors(p, phi, noise, method)?);
    let x = crate::units::frequency_to_kelvin(omega_ge) / temperature;
    let families = [RatioFamily::A, RatioFamily::B, RatioFamily::C];
    let mut temperature_relative = [0.0; 3];
    let mut nets = [0.0; 3];
    for (k, family) in families.iter().enumerate() {
        temperature_relative[k] = temp_error_from_ratio(*family, x, relative[k])?;
        nets[k] = net(temperature_relative[k] * temperature, t_meas)?;
    }
    Ok(ErrorReport {
        delta_a: (var[0] / n).sqrt(),
        delta_b: (var[1] / n).sqrt(),
        delta_c: (var[2] / n).sqrt(),
        relative,
        temperature_relative,
        net: nets,
    })
}
