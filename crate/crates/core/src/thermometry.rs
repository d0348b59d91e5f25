//! The nine ratio estimators of the effective temperature, their closed forms
//! and their numerical inversion.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{domain, require_positive, Error, Result};
use crate::protocol::OutcomeSextuple;
use crate::units::frequency_to_kelvin;

/// Relative size (to the largest outcome) below which a denominator counts as zero.
pub const DEFAULT_DENOMINATOR_FLOOR: f64 = 1e-12;

const T_MIN: f64 = 1e-4;
const T_MAX: f64 = 10.0;
const BISECTION_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RatioFamily {
    A,
    B,
    C,
}

/// One of the nine estimators: a family and a method (column) 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioKind {
    pub family: RatioFamily,
    pub method: u8,
}

impl RatioKind {
    /// A1, A2, A3, B1, ..., C3.
    pub const ALL: [RatioKind; 9] = {
        use RatioFamily::*;
        [
            RatioKind { family: A, method: 1 },
            RatioKind { family: A, method: 2 },
            RatioKind { family: A, method: 3 },
            RatioKind { family: B, method: 1 },
            RatioKind { family: B, method: 2 },
            RatioKind { family: B, method: 3 },
            RatioKind { family: C, method: 1 },
            RatioKind { family: C, method: 2 },
            RatioKind { family: C, method: 3 },
        ]
    };

    pub fn new(family: RatioFamily, method: u8) -> Result<Self> {
        if !(1..=3).contains(&method) {
            return Err(domain("RatioKind", format!("method must be 1, 2 or 3, got {method}")));
        }
        Ok(Self { family, method })
    }

    pub fn name(&self) -> String {
        let f = match self.family {
            RatioFamily::A => 'A',
            RatioFamily::B => 'B',
            RatioFamily::C => 'C',
        };
        format!("{f}{}", self.method)
    }

    pub fn index(&self) -> usize {
        let f = match self.family {
            RatioFamily::A => 0,
            RatioFamily::B => 1,
            RatioFamily::C => 2,
        };
        3 * f + (self.method as usize - 1)
    }
}

/// Measured differences `(a, b, c)` of one column, so that `A = b/c`, `B = a/b`, `C = a/c`.
///
/// | method | a       | b       | c       |
/// |--------|---------|---------|---------|
/// | 1      | x2 - y2 | x0 - x1 | y0 - y1 |
/// | 2      | x1 - y1 | y0 - x2 | x0 - y2 |
/// | 3      | x0 - y0 | y1 - y2 | x1 - x2 |
pub fn column_differences(o: &OutcomeSextuple, method: u8) -> Result<(f64, f64, f64)> {
    match method {
        1 => Ok((o.x2 - o.y2, o.x0 - o.x1, o.y0 - o.y1)),
        2 => Ok((o.x1 - o.y1, o.y0 - o.x2, o.x0 - o.y2)),
        3 => Ok((o.x0 - o.y0, o.y1 - o.y2, o.x1 - o.x2)),
        _ => Err(domain("column_differences", format!("method must be 1, 2 or 3, got {method}"))),
    }
}

/// Ratio `kind` of a sextuple; fails when the denominator is below `floor` times
/// the largest outcome magnitude.
pub fn ratio_from_outcomes(kind: RatioKind, o: &OutcomeSextuple, floor: f64) -> Result<f64> {
    let (a, b, c) = column_differences(o, kind.method)?;
    let (num, den) = match kind.family {
        RatioFamily::A => (b, c),
        RatioFamily::B => (a, b),
        RatioFamily::C => (a, c),
    };
    let scale = o.to_array().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !num.is_finite() || !den.is_finite() {
        return Err(domain("ratio_from_outcomes", "non-finite outcomes"));
    }
    if den.abs() <= floor * scale || den == 0.0 {
        return Err(domain(
            "ratio_from_outcomes",
            format!("{} denominator {den:e} below floor", kind.name()),
        ));
    }
    Ok(num / den)
}

/// Thermal value of a family at temperature `temperature`.
pub fn ratio_closed_form(family: RatioFamily, temperature: f64, omega_ge: f64, omega_gf: f64) -> Result<f64> {
    require_positive("ratio_closed_form", "temperature", temperature)?;
    check_frequencies("ratio_closed_form", omega_ge, omega_gf)?;
    Ok(closed_form(family, temperature, omega_ge, omega_gf))
}

fn check_frequencies(op: &'static str, omega_ge: f64, omega_gf: f64) -> Result<()> {
    require_positive(op, "omega_ge", omega_ge)?;
    if !omega_gf.is_finite() || omega_gf <= omega_ge {
        return Err(domain(op, "omega_gf must exceed omega_ge"));
    }
    Ok(())
}

fn closed_form(family: RatioFamily, temperature: f64, omega_ge: f64, omega_gf: f64) -> f64 {
    let x_ge = frequency_to_kelvin(omega_ge) / temperature;
    let x_gf = frequency_to_kelvin(omega_gf) / temperature;
    // 1 - e^{-x} and e^{-x_ge} - e^{-x_gf} without cancellation
    let one_minus_a = -(-x_ge).exp_m1();
    let one_minus_b = -(-x_gf).exp_m1();
    let a_minus_b = -(-x_ge).exp() * (-(x_gf - x_ge)).exp_m1();
    match family {
        RatioFamily::A => one_minus_a / one_minus_b,
        RatioFamily::B => a_minus_b / one_minus_a,
        RatioFamily::C => a_minus_b / one_minus_b,
    }
}

/// Leading low-temperature behaviour: `A ~ 1 - exp(-x)`, `B ~ C ~ exp(-x)` with `x = hbar omega_ge / k_B T`.
pub fn low_t_approximation(family: RatioFamily, temperature: f64, omega_ge: f64) -> Result<f64> {
    require_positive("low_t_approximation", "temperature", temperature)?;
    require_positive("low_t_approximation", "omega_ge", omega_ge)?;
    let boltz = (-frequency_to_kelvin(omega_ge) / temperature).exp();
    Ok(match family {
        RatioFamily::A => 1.0 - boltz,
        RatioFamily::B | RatioFamily::C => boltz,
    })
}

/// Open interval of values a family takes for `0 < T < infinity`.
pub fn attainable_range(family: RatioFamily, omega_ge: f64, omega_gf: f64) -> (f64, f64) {
    let omega_ef = omega_gf - omega_ge;
    match family {
        RatioFamily::A => (omega_ge / omega_gf, 1.0),
        RatioFamily::B => (0.0, omega_ef / omega_ge),
        RatioFamily::C => (0.0, omega_ef / omega_gf),
    }
}

/// Temperature at which the closed form equals `value`, by bisection on [0.1 mK, 10 K].
pub fn invert_ratio(family: RatioFamily, value: f64, omega_ge: f64, omega_gf: f64) -> Result<f64> {
    check_frequencies("invert_ratio", omega_ge, omega_gf)?;
    let (lo, hi) = attainable_range(family, omega_ge, omega_gf);
    if !(value > lo && value < hi) {
        return Err(Error::OutOfRange { value, lo, hi });
    }
    // g(T) increases with T for every family
    let g = |t: f64| match family {
        RatioFamily::A => -closed_form(family, t, omega_ge, omega_gf),
        _ => closed_form(family, t, omega_ge, omega_gf),
    };
    let target = if family == RatioFamily::A { -value } else { value };
    let (mut t_lo, mut t_hi) = (T_MIN, T_MAX);
    let (g_lo, g_hi) = (g(t_lo), g(t_hi));
    if !(target >= g_lo && target <= g_hi) {
        let (a, b) = if family == RatioFamily::A { (-g_hi, -g_lo) } else { (g_lo, g_hi) };
        return Err(Error::OutOfRange { value, lo: a, hi: b });
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (t_lo + t_hi);
        if g(mid) < target {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
        if t_hi - t_lo <= f64::EPSILON * t_hi {
            break;
        }
    }
    Ok(0.5 * (t_lo + t_hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    /// Vanishing denominator or a ratio outside the attainable range.
    OutOfRange,
    /// Frequencies for which the closed forms are not monotone, or non-finite outcomes.
    NonMonotoneInput,
}

/// All nine estimators for one sextuple, indexed as [`RatioKind::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub ratios: [f64; 9],
    pub temperatures: [f64; 9],
    pub statuses: [EstimateStatus; 9],
}

impl EstimateReport {
    pub fn get(&self, kind: RatioKind) -> (f64, f64, EstimateStatus) {
        let i = kind.index();
        (self.ratios[i], self.temperatures[i], self.statuses[i])
    }

    pub fn ok_count(&self) -> usize {
        self.statuses.iter().filter(|s| **s == EstimateStatus::Ok).count()
    }

    /// `(kind, temperature)` of the estimators with status ok.
    pub fn ok_temperatures(&self) -> Vec<(RatioKind, f64)> {
        RatioKind::ALL
            .iter()
            .filter(|k| self.statuses[k.index()] == EstimateStatus::Ok)
            .map(|k| (*k, self.temperatures[k.index()]))
            .collect()
    }
}

pub fn full_report(o: &OutcomeSextuple, device: &DeviceParams) -> EstimateReport {
    report_for_frequencies(o, device.omega_ge, device.omega_gf(), DEFAULT_DENOMINATOR_FLOOR)
}

/// Evaluates and inverts all nine ratios; a failing estimator only sets its own status.
pub fn report_for_frequencies(o: &OutcomeSextuple, omega_ge: f64, omega_gf: f64, floor: f64) -> EstimateReport {
    let mut report = EstimateReport {
        ratios: [f64::NAN; 9],
        temperatures: [f64::NAN; 9],
        statuses: [EstimateStatus::NonMonotoneInput; 9],
    };
    let frequencies_ok = check_frequencies("full_report", omega_ge, omega_gf).is_ok();
    let finite = o.to_array().iter().all(|v| v.is_finite());
    for kind in RatioKind::ALL {
        let i = kind.index();
        if !frequencies_ok || !finite {
            continue;
        }
        match ratio_from_outcomes(kind, o, floor) {
            Ok(r) => {
                report.ratios[i] = r;
                match invert_ratio(kind.family, r, omega_ge, omega_gf) {
                    Ok(t) => {
                        report.temperatures[i] = t;
                        report.statuses[i] = EstimateStatus::Ok;
                    }
                    Err(_) => report.statuses[i] = EstimateStatus::OutOfRange,
                }
            }
            Err(_) => report.statuses[i] = EstimateStatus::OutOfRange,
        }
    }
    report
}
