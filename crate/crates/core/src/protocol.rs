//! The six-sequence pi-pulse measurement: pulse sequences, simulated readout
//! outcomes and the inverse problem from outcomes back to populations.

use serde::{Deserialize, Serialize};

use crate::dynamics::{apply_pulse, average_over, evolve_analytic, PopulationVector, PulseKind, RateSet};
use crate::error::{domain, require_non_negative, Result};

/// Mean readout signal of each pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureStateResponses {
    pub phi_g: f64,
    pub phi_e: f64,
    pub phi_f: f64,
}

impl Default for PureStateResponses {
    fn default() -> Self {
        Self {
            phi_g: 0.0,
            phi_e: 1.0,
            phi_f: 2.0,
        }
    }
}

impl PureStateResponses {
    pub fn new(phi_g: f64, phi_e: f64, phi_f: f64) -> Self {
        Self { phi_g, phi_e, phi_f }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.phi_g, self.phi_e, self.phi_f]
    }

    /// `(dphi_g, dphi_e, dphi_f)` in cyclic order: `phi_e - phi_f`, `phi_f - phi_g`, `phi_g - phi_e`.
    pub fn differences(&self) -> [f64; 3] {
        [self.phi_e - self.phi_f, self.phi_f - self.phi_g, self.phi_g - self.phi_e]
    }

    /// Fails unless the three responses are pairwise distinct.
    pub fn require_distinguishable(&self) -> Result<()> {
        let scale = self.to_array().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if self.differences().iter().any(|d| !d.is_finite() || d.abs() <= 1e-12 * scale) {
            return Err(domain("PureStateResponses", "responses are not pairwise distinct"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceLabel {
    X0,
    X1,
    X2,
    Y0,
    Y1,
    Y2,
}

impl SequenceLabel {
    pub const ALL: [SequenceLabel; 6] = [
        SequenceLabel::X0,
        SequenceLabel::X1,
        SequenceLabel::X2,
        SequenceLabel::Y0,
        SequenceLabel::Y1,
        SequenceLabel::Y2,
    ];

    pub fn pulses(self) -> &'static [PulseKind] {
        use PulseKind::{Ef, Ge};
        match self {
            SequenceLabel::X0 => &[],
            SequenceLabel::X1 => &[Ge],
            SequenceLabel::X2 => &[Ge, Ef],
            SequenceLabel::Y0 => &[Ef],
            SequenceLabel::Y1 => &[Ef, Ge],
            SequenceLabel::Y2 => &[Ef, Ge, Ef],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SequenceLabel::X0 => "x0",
            SequenceLabel::X1 => "x1",
            SequenceLabel::X2 => "x2",
            SequenceLabel::Y0 => "y0",
            SequenceLabel::Y1 => "y1",
            SequenceLabel::Y2 => "y2",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Final level (0 = g, 1 = e, 2 = f) of each initial level under perfect pulses.
    pub fn destinations(self) -> [usize; 3] {
        let mut dest = [0, 1, 2];
        for pulse in self.pulses() {
            let (a, b) = match pulse {
                PulseKind::Ge => (0, 1),
                PulseKind::Ef => (1, 2),
            };
            for d in dest.iter_mut() {
                if *d == a {
                    *d = b;
                } else if *d == b {
                    *d = a;
                }
            }
        }
        dest
    }
}

/// Readouts `x0, x1, x2, y0, y1, y2` of the six sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSextuple {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
}

impl OutcomeSextuple {
    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            x0: a[0],
            x1: a[1],
            x2: a[2],
            y0: a[3],
            y1: a[4],
            y2: a[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.x0, self.x1, self.x2, self.y0, self.y1, self.y2]
    }

    pub fn get(&self, label: SequenceLabel) -> f64 {
        self.to_array()[label.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    /// Mean population over the readout window.
    #[default]
    TimeAveraged,
    /// Population right after the last pulse.
    InitialValue,
}

/// Where the pulse-duration free evolution is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayPlacement {
    /// Before every pulse except the first.
    #[default]
    BeforePulse,
    /// After every pulse, including the last.
    AfterPulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub pi_pulse_duration: f64,
    pub readout_duration: f64,
    pub efficiency_ge: f64,
    pub efficiency_ef: f64,
    pub readout_mode: ReadoutMode,
    pub delay_placement: DelayPlacement,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self::ideal()
    }
}

impl ProtocolConfig {
    /// Instantaneous perfect pulses and instantaneous readout.
    pub fn ideal() -> Self {
        Self {
            pi_pulse_duration: 0.0,
            readout_duration: 0.0,
            efficiency_ge: 1.0,
            efficiency_ef: 1.0,
            readout_mode: ReadoutMode::TimeAveraged,
            delay_placement: DelayPlacement::BeforePulse,
        }
    }

    /// Perfect pulses with finite pulse and readout durations.
    pub fn timed(pi_pulse_duration: f64, readout_duration: f64) -> Self {
        Self {
            pi_pulse_duration,
            readout_duration,
            ..Self::ideal()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("ProtocolConfig", "pi_pulse_duration", self.pi_pulse_duration)?;
        require_non_negative("ProtocolConfig", "readout_duration", self.readout_duration)?;
        for (name, d) in [("efficiency_ge", self.efficiency_ge), ("efficiency_ef", self.efficiency_ef)] {
            if !(0.0..=1.0).contains(&d) {
                return Err(domain("ProtocolConfig", format!("{name} must lie in [0, 1], got {d}")));
            }
        }
        Ok(())
    }

    fn efficiency(&self, kind: PulseKind) -> f64 {
        match kind {
            PulseKind::Ge => self.efficiency_ge,
            PulseKind::Ef => self.efficiency_ef,
        }
    }
}

/// Outcomes of perfect instantaneous sequences: each level's population is
/// read with the response of the level it is mapped to.
pub fn ideal_outcomes(p: &PopulationVector, phi: &PureStateResponses) -> OutcomeSextuple {
    let pa = p.to_array();
    let ph = phi.to_array();
    OutcomeSextuple::from_array(SequenceLabel::ALL.map(|label| {
        let dest = label.destinations();
        (0..3).map(|i| pa[i] * ph[dest[i]]).sum()
    }))
}

/// Population the readout of `label` effectively sees: the window average in
/// time-averaged mode, or the post-pulse population.
pub fn readout_distribution(
    label: SequenceLabel,
    p0: &PopulationVector,
    rates: &RateSet,
    cfg: &ProtocolConfig,
) -> Result<PopulationVector> {
    cfg.validate()?;
    let mut p = *p0;
    for (k, &pulse) in label.pulses().iter().enumerate() {
        if cfg.delay_placement == DelayPlacement::BeforePulse && k > 0 {
            p = evolve_analytic(&p, rates, cfg.pi_pulse_duration)?;
        }
        p = apply_pulse(&p, pulse, cfg.efficiency(pulse))?;
        if cfg.delay_placement == DelayPlacement::AfterPulse {
            p = evolve_analytic(&p, rates, cfg.pi_pulse_duration)?;
        }
    }
    match cfg.readout_mode {
        ReadoutMode::TimeAveraged => average_over(&p, rates, cfg.readout_duration),
        ReadoutMode::InitialValue => Ok(p),
    }
}

/// Effective readout populations of all six sequences, in canonical order.
pub fn readout_distributions(
    p0: &PopulationVector,
    rates: &RateSet,
    cfg: &ProtocolConfig,
) -> Result<[PopulationVector; 6]> {
    let mut out = [*p0; 6];
    for label in SequenceLabel::ALL {
        out[label.index()] = readout_distribution(label, p0, rates, cfg)?;
    }
    Ok(out)
}

pub fn simulate_outcome(
    label: SequenceLabel,
    p0: &PopulationVector,
    rates: &RateSet,
    phi: &PureStateResponses,
    cfg: &ProtocolConfig,
) -> Result<f64> {
    Ok(readout_distribution(label, p0, rates, cfg)?.expectation(phi.to_array()))
}

pub fn simulate_protocol(
    p0: &PopulationVector,
    rates: &RateSet,
    phi: &PureStateResponses,
    cfg: &ProtocolConfig,
) -> Result<OutcomeSextuple> {
    let d = readout_distributions(p0, rates, cfg)?;
    Ok(OutcomeSextuple::from_array(d.map(|p| p.expectation(phi.to_array()))))
}

/// Least-squares populations recovered from a sextuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationFit {
    /// Unconstrained to the simplex: entries sum to 1 but may leave [0, 1] for noisy input.
    pub populations: [f64; 3],
    /// Root-sum-square residual of the six equations, in readout units.
    pub residual: f64,
    /// Set when the residual exceeds `1e-6` of the response spread.
    pub inconsistent: bool,
}

/// Solves the six linear outcome equations together with `p_g + p_e + p_f = 1`.
pub fn populations_from_outcomes(o: &OutcomeSextuple, phi: &PureStateResponses) -> Result<PopulationFit> {
    phi.require_distinguishable()?;
    let ph = phi.to_array();
    let obs = o.to_array();
    if obs.iter().any(|v| !v.is_finite()) {
        return Err(domain("populations_from_outcomes", "non-finite outcome"));
    }
    // eliminate p_f = 1 - p_g - p_e; row k reads obs_k - r_f = p_g (r_g - r_f) + p_e (r_e - r_f)
    let mut rows = [[0.0; 3]; 6];
    for label in SequenceLabel::ALL {
        let dest = label.destinations();
        let r = dest.map(|d| ph[d]);
        rows[label.index()] = [r[0] - r[2], r[1] - r[2], obs[label.index()] - r[2]];
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for [u, v, y] in rows {
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u * y;
        b2 += v * y;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= 1e-12 * (a11 * a22).max(f64::MIN_POSITIVE) {
        return Err(domain("populations_from_outcomes", "rank-deficient design"));
    }
    let pg = (a22 * b1 - a12 * b2) / det;
    let pe = (a11 * b2 - a12 * b1) / det;
    let residual = rows
        .iter()
        .map(|[u, v, y]| (y - u * pg - v * pe).powi(2))
        .sum::<f64>()
        .sqrt();
    let spread = ph.iter().cloned().fold(f64::MIN, f64::max) - ph.iter().cloned().fold(f64::MAX, f64::min);
    let inconsistent = residual > 1e-6 * spread;
    if inconsistent {
        log::warn!("outcome residual {residual:e} suggests decay during readout");
    }
    Ok(PopulationFit {
        populations: [pg, pe, 1.0 - pg - pe],
        residual,
        inconsistent,
    })
}
