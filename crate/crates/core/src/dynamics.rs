//! Three-level population dynamics under sequential decay and excitation,
//! plus instantaneous pi-pulse maps.

use serde::{Deserialize, Serialize};

use crate::bath::detailed_balance_split;
use crate::device::{BaseRateModel, DeviceParams};
use crate::error::{domain, require_non_negative, require_positive, Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;
const DEGENERACY: f64 = 1e-9;

/// Diagonal of the three-level density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationVector {
    pub pg: f64,
    pub pe: f64,
    pub pf: f64,
}

impl PopulationVector {
    /// Validated constructor: each entry in [0, 1] and the sum equal to 1 within 1e-9.
    pub fn new(pg: f64, pe: f64, pf: f64) -> Result<Self> {
        let p = Self { pg, pe, pf };
        for v in p.to_array() {
            if !v.is_finite() || !(-SUM_TOLERANCE..=1.0 + SUM_TOLERANCE).contains(&v) {
                return Err(domain("PopulationVector", format!("entry {v} outside [0, 1]")));
            }
        }
        if (p.total() - 1.0).abs() > SUM_TOLERANCE {
            return Err(domain("PopulationVector", format!("entries sum to {}", p.total())));
        }
        Ok(p)
    }

    pub fn ground() -> Self {
        Self::from_array([1.0, 0.0, 0.0])
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            pg: a[0],
            pe: a[1],
            pf: a[2],
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.pg, self.pe, self.pf]
    }

    pub fn total(&self) -> f64 {
        self.pg + self.pe + self.pf
    }

    /// Mean of a per-level observable, `sum_i p_i v_i`.
    pub fn expectation(&self, values: [f64; 3]) -> f64 {
        self.pg * values[0] + self.pe * values[1] + self.pf * values[2]
    }
}

/// Transition rates (rad/s) of the g-e and e-f transitions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RateSet {
    pub ge_up: f64,
    pub ge_down: f64,
    pub ef_up: f64,
    pub ef_down: f64,
}

impl RateSet {
    pub fn new(ge_up: f64, ge_down: f64, ef_up: f64, ef_down: f64) -> Result<Self> {
        let r = Self {
            ge_up,
            ge_down,
            ef_up,
            ef_down,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("RateSet", "ge_up", self.ge_up)?;
        require_non_negative("RateSet", "ge_down", self.ge_down)?;
        require_non_negative("RateSet", "ef_up", self.ef_up)?;
        require_non_negative("RateSet", "ef_down", self.ef_down)
    }

    pub fn max_rate(&self) -> f64 {
        self.ge_up.max(self.ge_down).max(self.ef_up).max(self.ef_down)
    }

    pub fn sum(&self) -> f64 {
        self.ge_up + self.ge_down + self.ef_up + self.ef_down
    }

    /// Product of the two decay exponents, `alpha0 * alpha1`.
    fn exponent_product(&self) -> f64 {
        self.ge_down * self.ef_down + self.ge_up * self.ef_up + self.ge_up * self.ef_down
    }

    /// Right-hand side of the rate equations.
    pub fn derivative(&self, p: [f64; 3]) -> [f64; 3] {
        let [g, e, f] = p;
        let ge_flow = e * self.ge_down - g * self.ge_up;
        let ef_flow = f * self.ef_down - e * self.ef_up;
        [ge_flow, ef_flow - ge_flow, -ef_flow]
    }
}

/// Rates of `device` at controlled temperature `temperature`, with optional extra
/// relaxation `(ge, ef)` (total rates, split by detailed balance at `temperature`).
pub fn rate_set(device: &DeviceParams, temperature: f64, extra_relaxation: (f64, f64)) -> Result<RateSet> {
    device.validate()?;
    require_positive("rate_set", "temperature", temperature)?;
    let mut rates = RateSet::default();
    for bath in &device.baths {
        let t = bath.temperature.resolve(temperature);
        let ge = bath.gamma1;
        let ef = bath.gamma1 * device.ef_rate_factor;
        let ((gu, gd), (eu, ed)) = match device.base_rate_model {
            BaseRateModel::Thermal => {
                let spec_ge = crate::bath::BathSpec::new(t, ge)?;
                let spec_ef = crate::bath::BathSpec::new(t, ef)?;
                (
                    crate::bath::bath_rates(&spec_ge, device.omega_ge)?,
                    crate::bath::bath_rates(&spec_ef, device.omega_ef)?,
                )
            }
            BaseRateModel::Constant => (
                detailed_balance_split(ge, device.omega_ge, t)?,
                detailed_balance_split(ef, device.omega_ef, t)?,
            ),
        };
        rates.ge_up += gu;
        rates.ge_down += gd;
        rates.ef_up += eu;
        rates.ef_down += ed;
    }
    let (extra_ge, extra_ef) = extra_relaxation;
    let (gu, gd) = detailed_balance_split(extra_ge, device.omega_ge, temperature)?;
    let (eu, ed) = detailed_balance_split(extra_ef, device.omega_ef, temperature)?;
    rates.ge_up += gu;
    rates.ge_down += gd;
    rates.ef_up += eu;
    rates.ef_down += ed;
    Ok(rates)
}

/// Fixed point of the rate equations.
pub fn steady_state(rates: &RateSet) -> Result<PopulationVector> {
    rates.validate()?;
    if rates.ge_down <= 0.0 || rates.ef_down <= 0.0 {
        return Err(domain("steady_state", "down rates must be > 0"));
    }
    let e_rel = rates.ge_up / rates.ge_down;
    let f_rel = e_rel * rates.ef_up / rates.ef_down;
    let z = 1.0 + e_rel + f_rel;
    Ok(PopulationVector::from_array([1.0 / z, e_rel / z, f_rel / z]))
}

/// `p(t) = zeta e^(alpha0 t) + eta e^(alpha1 t) + xi`, components ordered (g, e, f).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionCoefficients {
    pub alpha0: f64,
    pub alpha1: f64,
    pub zeta: [f64; 3],
    pub eta: [f64; 3],
    pub xi: [f64; 3],
}

impl EvolutionCoefficients {
    pub fn at(&self, t: f64) -> PopulationVector {
        let e0 = (self.alpha0 * t).exp();
        let e1 = (self.alpha1 * t).exp();
        PopulationVector::from_array(std::array::from_fn(|i| {
            self.zeta[i] * e0 + self.eta[i] * e1 + self.xi[i]
        }))
    }

    /// Mean of `p(t)` over `[0, window]`.
    pub fn average(&self, window: f64) -> PopulationVector {
        let w0 = relative_expm1(self.alpha0 * window);
        let w1 = relative_expm1(self.alpha1 * window);
        PopulationVector::from_array(std::array::from_fn(|i| {
            self.zeta[i] * w0 + self.eta[i] * w1 + self.xi[i]
        }))
    }
}

// (e^z - 1) / z, equal to 1 at z = 0
fn relative_expm1(z: f64) -> f64 {
    if z.abs() < 1e-300 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// Decay exponents `(alpha0, alpha1)` with `alpha1 <= alpha0 <= 0`.
pub fn decay_exponents(rates: &RateSet) -> (f64, f64) {
    let s = rates.sum();
    let p = rates.exponent_product();
    let disc = (s * s - 4.0 * p).max(0.0);
    let alpha1 = -0.5 * (s + disc.sqrt());
    // Vieta, avoiding the cancellation in -s + sqrt(disc)
    let alpha0 = if alpha1 != 0.0 { p / alpha1 } else { 0.0 };
    (alpha0, alpha1)
}

/// Coefficients of the analytic solution starting from `p0`.
///
/// Returns [`Error::DegenerateExponents`] when `|alpha0 - alpha1| < 1e-9 |alpha0|`.
pub fn evolution_coefficients(p0: &PopulationVector, rates: &RateSet) -> Result<EvolutionCoefficients> {
    let xi = steady_state(rates)?.to_array();
    let (alpha0, alpha1) = decay_exponents(rates);
    let gap = alpha0 - alpha1;
    if gap.abs() < DEGENERACY * alpha0.abs() || gap == 0.0 {
        return Err(Error::DegenerateExponents { alpha0, alpha1 });
    }
    let p = p0.to_array();
    let d: [f64; 3] = std::array::from_fn(|i| p[i] - xi[i]);
    let ld = rates.derivative(d);
    let zeta = std::array::from_fn(|i| (ld[i] - alpha1 * d[i]) / gap);
    let eta = std::array::from_fn(|i| (alpha0 * d[i] - ld[i]) / gap);
    Ok(EvolutionCoefficients {
        alpha0,
        alpha1,
        zeta,
        eta,
        xi,
    })
}

/// Population after free evolution for time `t`.
///
/// Uses the closed form; frozen dynamics return `p0`, and degenerate exponents
/// fall back to fixed-step integration.
pub fn evolve_analytic(p0: &PopulationVector, rates: &RateSet, t: f64) -> Result<PopulationVector> {
    require_non_negative("evolve_analytic", "t", t)?;
    rates.validate()?;
    if t == 0.0 || rates.max_rate() == 0.0 {
        return Ok(*p0);
    }
    match evolution_coefficients(p0, rates) {
        Ok(c) => Ok(c.at(t)),
        Err(Error::DegenerateExponents { alpha0, alpha1 }) => {
            log::debug!("degenerate exponents {alpha0:e}, {alpha1:e}; integrating numerically");
            let dt = fallback_step(rates, t);
            evolve_numeric(p0, rates, t, dt)
        }
        Err(e) => Err(e),
    }
}

/// Mean population over `[0, window]` of free evolution from `p0`.
pub fn average_over(p0: &PopulationVector, rates: &RateSet, window: f64) -> Result<PopulationVector> {
    require_non_negative("average_over", "window", window)?;
    rates.validate()?;
    if window == 0.0 || rates.max_rate() == 0.0 {
        return Ok(*p0);
    }
    match evolution_coefficients(p0, rates) {
        Ok(c) => Ok(c.average(window)),
        Err(Error::DegenerateExponents { .. }) => {
            // composite Simpson over RK4 steps
            let mut n = (window / fallback_step(rates, window)).ceil() as usize;
            n += n % 2;
            let h = window / n as f64;
            let mut p = p0.to_array();
            let mut acc = p;
            for k in 1..=n {
                p = rk4_step(rates, p, h);
                let w = if k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                for i in 0..3 {
                    acc[i] += w * p[i];
                }
            }
            Ok(PopulationVector::from_array(acc.map(|a| a * h / (3.0 * window))))
        }
        Err(e) => Err(e),
    }
}

fn fallback_step(rates: &RateSet, t: f64) -> f64 {
    (0.01 / rates.max_rate()).min(t / 1000.0)
}

fn rk4_step(rates: &RateSet, p: [f64; 3], h: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], s: f64| -> [f64; 3] { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = rates.derivative(p);
    let k2 = rates.derivative(add(p, k1, 0.5 * h));
    let k3 = rates.derivative(add(p, k2, 0.5 * h));
    let k4 = rates.derivative(add(p, k3, h));
    std::array::from_fn(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Classical fourth-order Runge-Kutta integration with step at most `dt`.
///
/// The step is shortened so that an integer number of steps lands on `t`.
/// Requires `dt < 0.1 / max_rate`.
pub fn evolve_numeric(p0: &PopulationVector, rates: &RateSet, t: f64, dt: f64) -> Result<PopulationVector> {
    require_non_negative("evolve_numeric", "t", t)?;
    require_positive("evolve_numeric", "dt", dt)?;
    rates.validate()?;
    let max_rate = rates.max_rate();
    if max_rate > 0.0 && dt >= 0.1 / max_rate {
        return Err(Error::StepSize {
            dt,
            limit: 0.1 / max_rate,
        });
    }
    if t == 0.0 {
        return Ok(*p0);
    }
    let steps = (t / dt).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    let mut p = p0.to_array();
    for _ in 0..steps {
        p = rk4_step(rates, p, h);
    }
    Ok(PopulationVector::from_array(p))
}

/// Which pair of levels a pi-pulse swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Ge,
    Ef,
}

/// Instantaneous pi-pulse with efficiency `efficiency` (1 is a perfect swap, 0 does nothing).
pub fn apply_pulse(p: &PopulationVector, kind: PulseKind, efficiency: f64) -> Result<PopulationVector> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(domain(
            "apply_pulse",
            format!("efficiency must lie in [0, 1], got {efficiency}"),
        ));
    }
    let d = efficiency;
    let swap = |a: f64, b: f64| ((1.0 - d) * a + d * b, d * a + (1.0 - d) * b);
    Ok(match kind {
        PulseKind::Ge => {
            let (g, e) = swap(p.pg, p.pe);
            PopulationVector { pg: g, pe: e, pf: p.pf }
        }
        PulseKind::Ef => {
            let (e, f) = swap(p.pe, p.pf);
            PopulationVector { pg: p.pg, pe: e, pf: f }
        }
    })
}

/// Row-major pulse matrix acting on `(p_g, p_e, p_f)`.
pub fn pulse_matrix(kind: PulseKind, efficiency: f64) -> [[f64; 3]; 3] {
    let (s, k) = (efficiency, 1.0 - efficiency);
    match kind {
        PulseKind::Ge => [[k, s, 0.0], [s, k, 0.0], [0.0, 0.0, 1.0]],
        PulseKind::Ef => [[1.0, 0.0, 0.0], [0.0, k, s], [0.0, s, k]],
    }
}
