//! Synthetic experiments: seeded shot noise, temperature sweeps, the pulse
//! efficiency error surface and the thermalization fits.
//!
//! Randomness comes from ChaCha8 keyed by a 64-bit master seed. Sweep point `i`
//! and sequence `s` draw from stream `(i << 3) | s`, so records do not depend on
//! how points are scheduled across threads. Gaussian noise uses the ziggurat
//! sampler of `rand_distr`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{bose_einstein, teff_from_ratio};
use crate::device::DeviceParams;
use crate::dynamics::{rate_set, steady_state, PopulationVector, RateSet};
use crate::error::{domain, require_non_negative, require_positive, Result};
use crate::error_analysis::{error_report, ErrorReport, NoiseModel};
use crate::fit::{weighted_linear_fit, FitResult};
use crate::protocol::{
    populations_from_outcomes, readout_distributions, simulate_protocol, OutcomeSextuple, PopulationFit,
    ProtocolConfig, PureStateResponses, SequenceLabel,
};
use crate::quasiparticle::{gamma1_qp, JunctionParams};
use crate::thermometry::{report_for_frequencies, EstimateReport, EstimateStatus, RatioFamily, RatioKind};
use crate::units::frequency_to_kelvin;

/// Default boundary between the thermal and the quasiparticle regime of the relaxation rate.
pub const QP_ONSET_CUTOFF: f64 = 0.170;

/// Per-sequence sample statistics of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOutcomes {
    pub means: OutcomeSextuple,
    /// Unbiased single-shot variances.
    pub variances: [f64; 6],
    /// Standard errors of those variances, from the sample fourth moment.
    pub variance_errors: [f64; 6],
    pub shots: u64,
}

impl McOutcomes {
    /// Standard errors of the means.
    pub fn mean_errors(&self) -> [f64; 6] {
        self.variances.map(|v| (v / self.shots as f64).sqrt())
    }
}

/// Readout distributions of the six sequences with perfect instantaneous pulses.
pub fn ideal_distributions(p: &PopulationVector) -> [PopulationVector; 6] {
    let pa = p.to_array();
    SequenceLabel::ALL.map(|label| {
        let dest = label.destinations();
        let mut q = [0.0; 3];
        for i in 0..3 {
            q[dest[i]] += pa[i];
        }
        PopulationVector::from_array(q)
    })
}

fn sample_sequence(dist: &PopulationVector, phi: [f64; 3], sigma_v: f64, shots: u64, mut rng: ChaCha8Rng) -> (f64, f64, f64) {
    let [pg, pe, _] = dist.to_array();
    let cut_g = pg;
    let cut_e = pg + pe;
    // moments about the expected mean keep the raw sums well conditioned
    let shift = dist.expectation(phi);
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..shots {
        let u: f64 = rng.random();
        let level = if u < cut_g {
            0
        } else if u < cut_e {
            1
        } else {
            2
        };
        let mut v = phi[level] - shift;
        if sigma_v > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            v += sigma_v * z;
        }
        let v2 = v * v;
        s1 += v;
        s2 += v2;
        s3 += v2 * v;
        s4 += v2 * v2;
    }
    let n = shots as f64;
    let m1 = s1 / n;
    let (r2, r3, r4) = (s2 / n, s3 / n, s4 / n);
    let c2 = r2 - m1 * m1;
    let c4 = r4 - 4.0 * m1 * r3 + 6.0 * m1 * m1 * r2 - 3.0 * m1.powi(4);
    let var = if shots > 1 { (c2 * n / (n - 1.0)).max(0.0) } else { 0.0 };
    let var_err = if shots > 3 {
        ((c4 - var * var * (n - 3.0) / (n - 1.0)).max(0.0) / n).sqrt()
    } else {
        f64::INFINITY
    };
    (shift + m1, var, var_err)
}

/// Projective shots of the six sequences: a level is drawn from each readout
/// distribution and read as its response plus Gaussian noise of width `sigma_v`.
pub fn mc_outcomes(
    dists: &[PopulationVector; 6],
    phi: &PureStateResponses,
    sigma_v: f64,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<McOutcomes> {
    require_non_negative("mc_outcomes", "sigma_v", sigma_v)?;
    if shots == 0 {
        return Err(domain("mc_outcomes", "shots must be >= 1"));
    }
    if stream >= 1 << 61 {
        return Err(domain("mc_outcomes", "stream index too large"));
    }
    let ph = phi.to_array();
    let stats: Vec<(f64, f64, f64)> = (0..6usize)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((stream << 3) | s as u64);
            sample_sequence(&dists[s], ph, sigma_v, shots, rng)
        })
        .collect();
    Ok(McOutcomes {
        means: OutcomeSextuple::from_array(std::array::from_fn(|s| stats[s].0)),
        variances: std::array::from_fn(|s| stats[s].1),
        variance_errors: std::array::from_fn(|s| stats[s].2),
        shots,
    })
}

/// Readout noise of a sweep. With `monte_carlo` off the outcomes are exact
/// expectations and `sigma_v`, `shots` only feed the error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepNoise {
    pub sigma_v: f64,
    pub shots: u64,
    pub monte_carlo: bool,
    /// Wall-clock time of one averaged measurement, for the NET.
    pub t_meas: f64,
}

impl Default for SweepNoise {
    fn default() -> Self {
        Self {
            sigma_v: 0.0,
            shots: 1,
            monte_carlo: false,
            t_meas: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub device: DeviceParams,
    /// Adds quasiparticle relaxation when present.
    pub junction: Option<JunctionParams>,
    pub protocol: ProtocolConfig,
    pub phi: PureStateResponses,
    pub noise: SweepNoise,
    pub denominator_floor: f64,
}

impl SweepConfig {
    pub fn new(device: DeviceParams, protocol: ProtocolConfig) -> Self {
        Self {
            device,
            junction: None,
            protocol,
            phi: PureStateResponses::default(),
            noise: SweepNoise::default(),
            denominator_floor: crate::thermometry::DEFAULT_DENOMINATOR_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        if let Some(j) = &self.junction {
            j.validate()?;
        }
        self.protocol.validate()?;
        self.phi.require_distinguishable()?;
        require_non_negative("SweepConfig", "sigma_v", self.noise.sigma_v)?;
        require_positive("SweepConfig", "t_meas", self.noise.t_meas)?;
        if self.noise.shots == 0 {
            return Err(domain("SweepConfig", "shots must be >= 1"));
        }
        Ok(())
    }

    /// Rates at controlled temperature `t`, including quasiparticle relaxation.
    pub fn rates(&self, t: f64) -> Result<RateSet> {
        let extra = match &self.junction {
            Some(j) => {
                let g = gamma1_qp(&self.device, j, t)?;
                (g, g * self.device.ef_rate_factor)
            }
            None => (0.0, 0.0),
        };
        rate_set(&self.device, t, extra)
    }
}

/// Everything computed at one sweep temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointData {
    pub rates: RateSet,
    /// Steady-state populations the protocol starts from.
    pub initial: PopulationVector,
    /// Effective temperature of the g-e populations of `initial`.
    pub effective_temperature: f64,
    /// Total g-e relaxation rate `up + down`.
    pub gamma1: f64,
    pub outcomes: OutcomeSextuple,
    pub outcome_variances: Option<[f64; 6]>,
    pub estimates: EstimateReport,
    /// Error budget of columns 1, 2, 3; `None` where a difference vanishes.
    pub errors: [Option<ErrorReport>; 3],
    pub populations: Option<PopulationFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub temperature: f64,
    pub seed: u64,
    pub stream: u64,
    pub data: Option<PointData>,
    pub failure: Option<String>,
}

fn simulate_point(cfg: &SweepConfig, t: f64, seed: u64, stream: u64) -> Result<PointData> {
    let rates = cfg.rates(t)?;
    let initial = steady_state(&rates)?;
    let effective_temperature = teff_from_ratio(initial.pe / initial.pg, cfg.device.omega_ge)?;
    let (outcomes, outcome_variances) = if cfg.noise.monte_carlo {
        let dists = readout_distributions(&initial, &rates, &cfg.protocol)?;
        let mc = mc_outcomes(&dists, &cfg.phi, cfg.noise.sigma_v, cfg.noise.shots, seed, stream)?;
        (mc.means, Some(mc.variances))
    } else {
        (simulate_protocol(&initial, &rates, &cfg.phi, &cfg.protocol)?, None)
    };
    let estimates = report_for_frequencies(
        &outcomes,
        cfg.device.omega_ge,
        cfg.device.omega_gf(),
        cfg.denominator_floor,
    );
    let noise = NoiseModel::from_voltage_sigma(cfg.noise.sigma_v, cfg.noise.shots)?;
    let errors = [1u8, 2, 3].map(|m| {
        error_report(
            &initial,
            &cfg.phi,
            &noise,
            m,
            cfg.device.omega_ge,
            effective_temperature,
            cfg.noise.t_meas,
        )
        .ok()
    });
    Ok(PointData {
        rates,
        initial,
        effective_temperature,
        gamma1: rates.ge_up + rates.ge_down,
        outcomes,
        outcome_variances,
        estimates,
        errors,
        populations: populations_from_outcomes(&outcomes, &cfg.phi).ok(),
    })
}

/// Runs every temperature of `temperatures` (kelvin) in parallel; records come
/// back in input order and a failing point only sets its own `failure`.
pub fn sweep(temperatures: &[f64], cfg: &SweepConfig, seed: u64) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    Ok(temperatures
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let stream = i as u64;
            let (data, failure) = match simulate_point(cfg, t, seed, stream) {
                Ok(d) => (Some(d), None),
                Err(e) => {
                    log::warn!("sweep point {i} at {t} K failed: {e}");
                    (None, Some(e.to_string()))
                }
            };
            SweepRecord {
                temperature: t,
                seed,
                stream,
                data,
                failure,
            }
        })
        .collect())
}

/// `(max - min) / t_set` over the estimators; infinite when any is flagged.
pub fn estimator_spread(report: &EstimateReport, t_set: f64) -> f64 {
    if report.ok_count() < 9 {
        return f64::INFINITY;
    }
    let ts = report.temperatures;
    let max = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    (max - min) / t_set
}

/// Largest `|T_alpha - t_set| / t_set` over the estimators; infinite when any is flagged.
pub fn max_relative_deviation(report: &EstimateReport, t_set: f64) -> f64 {
    if report.ok_count() < 9 {
        return f64::INFINITY;
    }
    report
        .temperatures
        .iter()
        .map(|t| ((t - t_set) / t_set).abs())
        .fold(0.0, f64::max)
}

/// Mean of `(T_alpha - T_ref_alpha) / T_ref_alpha` over estimators ok in both reports.
pub fn averaged_relative_error(report: &EstimateReport, reference: &EstimateReport) -> f64 {
    let mut sum = 0.0;
    let mut n = 0;
    for i in 0..9 {
        if report.statuses[i] == EstimateStatus::Ok && reference.statuses[i] == EstimateStatus::Ok {
            sum += (report.temperatures[i] - reference.temperatures[i]) / reference.temperatures[i];
            n += 1;
        }
    }
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Averaged relative error of the estimators against perfect pulses, for each
/// `(delta_ge, delta_ef)` of the grid. Rows follow `delta_ge`, columns `delta_ef`.
pub fn efficiency_error_surface(
    temperature: f64,
    delta_ge: &[f64],
    delta_ef: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    for d in delta_ge.iter().chain(delta_ef) {
        if !(0.0..=1.0).contains(d) {
            return Err(domain("efficiency_error_surface", format!("efficiency {d} outside [0, 1]")));
        }
    }
    let rates = cfg.rates(temperature)?;
    let p0 = steady_state(&rates)?;
    let report = |dge: f64, def: f64| -> Result<EstimateReport> {
        let mut proto = cfg.protocol;
        proto.efficiency_ge = dge;
        proto.efficiency_ef = def;
        let o = simulate_protocol(&p0, &rates, &cfg.phi, &proto)?;
        Ok(report_for_frequencies(
            &o,
            cfg.device.omega_ge,
            cfg.device.omega_gf(),
            cfg.denominator_floor,
        ))
    };
    let reference = report(1.0, 1.0)?;
    delta_ge
        .par_iter()
        .map(|&dge| {
            delta_ef
                .iter()
                .map(|&def| Ok(averaged_relative_error(&report(dge, def)?, &reference)))
                .collect()
        })
        .collect()
}

/// One measured point of a thermalization study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationPoint {
    /// Controlled (mixing-chamber) temperature.
    pub t_mxc: f64,
    pub gamma1: f64,
    pub gamma1_error: Option<f64>,
    pub t_eff: f64,
    pub t_eff_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationFits {
    /// `gamma1 = k n(T_eff) + b`.
    pub gamma1_vs_n: FitResult,
    /// `n(T_eff) = slope n(T_mxc) + offset`.
    pub n_eff_vs_n_mxc: FitResult,
}

/// Thermalization points from sweep records, with `T_eff` taken from estimator `kind`.
pub fn thermalization_points(records: &[SweepRecord], kind: RatioKind) -> Vec<ThermalizationPoint> {
    let family = match kind.family {
        RatioFamily::A => 0,
        RatioFamily::B => 1,
        RatioFamily::C => 2,
    };
    records
        .iter()
        .filter_map(|r| {
            let d = r.data.as_ref()?;
            let (_, t_eff, status) = d.estimates.get(kind);
            if status != EstimateStatus::Ok {
                return None;
            }
            let err = d.errors[kind.method as usize - 1]
                .map(|e| e.temperature_relative[family] * t_eff)
                .filter(|e| e.is_finite() && *e > 0.0);
            Some(ThermalizationPoint {
                t_mxc: r.temperature,
                gamma1: d.gamma1,
                gamma1_error: None,
                t_eff,
                t_eff_error: err,
            })
        })
        .collect()
}

fn fit_with_optional_sigmas(xs: &[f64], ys: &[f64], sigmas: Option<Vec<f64>>) -> Result<FitResult> {
    match sigmas {
        Some(s) => weighted_linear_fit(xs, ys, &s),
        None => Ok(weighted_linear_fit(xs, ys, &vec![1.0; xs.len()])?.scaled_by_residuals()),
    }
}

/// Both thermalization fits over the points with `t_mxc < cutoff`, using
/// occupations at `omega`. Points without errors are fitted with unit weights
/// and errors scaled by the residuals.
pub fn thermalization_analysis(points: &[ThermalizationPoint], omega: f64, cutoff: f64) -> Result<ThermalizationFits> {
    require_positive("thermalization_analysis", "omega", omega)?;
    let usable: Vec<&ThermalizationPoint> = points
        .iter()
        .filter(|p| p.t_mxc < cutoff && p.t_mxc > 0.0 && p.t_eff > 0.0 && p.gamma1.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(domain(
            "thermalization_analysis",
            format!("{} usable points below {cutoff} K, need at least 3", usable.len()),
        ));
    }
    let n_eff = usable
        .iter()
        .map(|p| bose_einstein(omega, p.t_eff))
        .collect::<Result<Vec<_>>>()?;
    let n_mxc = usable
        .iter()
        .map(|p| bose_einstein(omega, p.t_mxc))
        .collect::<Result<Vec<_>>>()?;
    let gammas: Vec<f64> = usable.iter().map(|p| p.gamma1).collect();

    let gamma_sigmas = usable.iter().map(|p| p.gamma1_error).collect::<Option<Vec<_>>>();
    let gamma1_vs_n = fit_with_optional_sigmas(&n_eff, &gammas, gamma_sigmas)?;

    let n_sigmas = usable
        .iter()
        .zip(&n_eff)
        .map(|(p, n)| {
            let x = frequency_to_kelvin(omega) / p.t_eff;
            p.t_eff_error.map(|e| n * (n + 1.0) * x / p.t_eff * e)
        })
        .collect::<Option<Vec<_>>>();
    let n_eff_vs_n_mxc = fit_with_optional_sigmas(&n_mxc, &n_eff, n_sigmas)?;
    Ok(ThermalizationFits {
        gamma1_vs_n,
        n_eff_vs_n_mxc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::BaseRateModel;
    use crate::error_analysis::abc_variances;
    use crate::protocol::ideal_outcomes;
    use crate::units::{ghz, mhz};
    use approx::assert_relative_eq;

    fn device() -> DeviceParams {
        DeviceParams::single_bath(ghz(6.649), ghz(6.417), mhz(0.19), BaseRateModel::Constant).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn ideal_distributions_reproduce_ideal_outcomes() {
        let p = PopulationVector::new(0.6, 0.3, 0.1).unwrap();
        let phi = PureStateResponses::new(0.2, 1.3, 1.9);
        let d = ideal_distributions(&p);
        let o = ideal_outcomes(&p, &phi).to_array();
        for s in 0..6 {
            assert_relative_eq!(d[s].expectation(phi.to_array()), o[s], max_relative = 1e-15);
        }
    }

    #[test]
    fn pure_state_has_no_variance() {
        let d = ideal_distributions(&PopulationVector::ground());
        let mc = mc_outcomes(&d, &PureStateResponses::default(), 0.0, 1000, 7, 0).unwrap();
        assert!(mc.variances.iter().all(|v| *v == 0.0));
        assert_eq!(mc.means, ideal_outcomes(&PopulationVector::ground(), &PureStateResponses::default()));
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let d = ideal_distributions(&PopulationVector::new(0.7, 0.2, 0.1).unwrap());
        let phi = PureStateResponses::default();
        let a = mc_outcomes(&d, &phi, 0.3, 5000, 42, 3).unwrap();
        let b = mc_outcomes(&d, &phi, 0.3, 5000, 42, 3).unwrap();
        let c = mc_outcomes(&d, &phi, 0.3, 5000, 43, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn variance_matches_analytic_budget() {
        let p = PopulationVector::new(0.7, 0.2, 0.1).unwrap();
        let phi = PureStateResponses::default();
        let sigma_v = 0.4;
        let mc = mc_outcomes(&ideal_distributions(&p), &phi, sigma_v, 1_000_000, 11, 0).unwrap();
        let noise = NoiseModel::from_voltage_sigma(sigma_v, 1).unwrap();
        let sequences = [
            [(SequenceLabel::X2, SequenceLabel::Y2), (SequenceLabel::X0, SequenceLabel::X1), (SequenceLabel::Y0, SequenceLabel::Y1)],
            [(SequenceLabel::X1, SequenceLabel::Y1), (SequenceLabel::Y0, SequenceLabel::X2), (SequenceLabel::X0, SequenceLabel::Y2)],
            [(SequenceLabel::X0, SequenceLabel::Y0), (SequenceLabel::Y1, SequenceLabel::Y2), (SequenceLabel::X1, SequenceLabel::X2)],
        ];
        for method in 1..=3u8 {
            let var = abc_variances(&p, &phi, &noise, method).unwrap();
            for (k, (u, v)) in sequences[method as usize - 1].iter().enumerate() {
                let sample = mc.variances[u.index()] + mc.variances[v.index()];
                let se = mc.variance_errors[u.index()].hypot(mc.variance_errors[v.index()]);
                assert!((sample - var[k]).abs() < 3.0 * se, "method {method} col {k}: {sample} vs {}", var[k]);
            }
        }
    }

    #[test]
    fn ideal_sweep_is_exact() {
        let cfg = SweepConfig::new(device(), ProtocolConfig::ideal());
        let ts = grid(0.02, 0.4, 25);
        let recs = sweep(&ts, &cfg, 1).unwrap();
        assert_eq!(recs.len(), ts.len());
        for (r, t) in recs.iter().zip(&ts) {
            assert_eq!(r.temperature, *t);
            let d = r.data.as_ref().unwrap();
            assert!(max_relative_deviation(&d.estimates, *t) < 1e-6, "T = {t}");
        }
    }

    #[test]
    fn sweep_is_reproducible_and_order_independent() {
        let mut cfg = SweepConfig::new(device(), ProtocolConfig::timed(165e-9, 2e-6));
        cfg.noise = SweepNoise {
            sigma_v: 0.2,
            shots: 2000,
            monte_carlo: true,
            t_meas: 1.0,
        };
        let ts = [0.05, 0.1, 0.15];
        let bits = |r: &[SweepRecord]| format!("{r:?}");
        let a = sweep(&ts, &cfg, 9).unwrap();
        let b = sweep(&ts, &cfg, 9).unwrap();
        assert_eq!(bits(&a), bits(&b));
        let single = sweep(&ts[..1], &cfg, 9).unwrap();
        assert_eq!(bits(&single), bits(&a[..1]));
        let other = sweep(&ts, &cfg, 10).unwrap();
        assert_ne!(bits(&other), bits(&a));
    }

    #[test]
    fn failing_point_is_flagged() {
        let cfg = SweepConfig::new(device(), ProtocolConfig::ideal());
        let recs = sweep(&[0.05, -1.0, 0.1], &cfg, 0).unwrap();
        assert!(recs[0].data.is_some() && recs[2].data.is_some());
        assert!(recs[1].data.is_none() && recs[1].failure.is_some());
    }

    #[test]
    fn surface_zero_at_perfect_pulses_and_monotone() {
        let cfg = SweepConfig::new(device(), ProtocolConfig::timed(165e-9, 2e-6));
        let ds = [1.0, 0.95, 0.9, 0.85, 0.8];
        let s = efficiency_error_surface(0.15, &ds, &ds, &cfg).unwrap();
        assert_eq!(s[0][0], 0.0);
        for j in 1..ds.len() {
            assert!(s[0][j].abs() > s[0][j - 1].abs());
            assert!(s[j][0].abs() > s[j - 1][0].abs());
        }
        // the two pulse errors pull in opposite directions and partly cancel
        assert!(s[0][4] < 0.0 && s[4][0] > 0.0);
        assert!(s[4][4].abs() < s[4][0].abs());
        assert!(efficiency_error_surface(0.15, &[1.1], &[1.0], &cfg).is_err());
    }

    fn synthetic(slope: f64, n0: f64, gamma0: f64, omega: f64) -> Vec<ThermalizationPoint> {
        grid(0.05, 0.16, 12)
            .into_iter()
            .map(|t| {
                let n_mxc = bose_einstein(omega, t).unwrap();
                let n_eff = slope * n_mxc + n0;
                let t_eff = frequency_to_kelvin(omega) / (1.0 / n_eff).ln_1p();
                let g = gamma0 * (2.0 * n_eff + 1.0);
                ThermalizationPoint {
                    t_mxc: t,
                    gamma1: g,
                    gamma1_error: Some(0.02 * g),
                    t_eff,
                    t_eff_error: Some(0.01 * t_eff),
                }
            })
            .collect()
    }

    #[test]
    fn perfect_thermalization() {
        let omega = ghz(6.649);
        let fits = thermalization_analysis(&synthetic(1.0, 0.0, mhz(0.19), omega), omega, QP_ONSET_CUTOFF).unwrap();
        let f = fits.n_eff_vs_n_mxc;
        assert!((f.slope - 1.0).abs() <= f.slope_error.max(1e-9));
        assert!(f.offset.abs() <= f.offset_error.max(1e-9));
        let g = fits.gamma1_vs_n;
        assert_relative_eq!(g.slope / g.offset, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn offset_recovered() {
        let omega = ghz(6.649);
        let fits = thermalization_analysis(&synthetic(0.97, 0.023, mhz(0.19), omega), omega, QP_ONSET_CUTOFF).unwrap();
        assert_relative_eq!(fits.n_eff_vs_n_mxc.offset, 0.023, max_relative = 1e-9);
        assert_relative_eq!(fits.n_eff_vs_n_mxc.slope, 0.97, max_relative = 1e-9);
    }

    #[test]
    fn constant_gamma_gives_flat_fit() {
        let omega = ghz(6.649);
        let mut pts = synthetic(1.0, 0.02, mhz(0.19), omega);
        for p in &mut pts {
            p.gamma1 = mhz(0.19);
            p.gamma1_error = Some(0.02 * mhz(0.19));
        }
        let fits = thermalization_analysis(&pts, omega, QP_ONSET_CUTOFF).unwrap();
        assert!(fits.gamma1_vs_n.slope.abs() < 1e-6 * mhz(0.19));
    }

    #[test]
    fn cutoff_excludes_points() {
        let omega = ghz(6.649);
        let pts = synthetic(1.0, 0.0, mhz(0.19), omega);
        assert!(thermalization_analysis(&pts, omega, 0.06).is_err());
    }

    #[test]
    fn sweep_feeds_thermalization() {
        let cfg = SweepConfig::new(device(), ProtocolConfig::ideal());
        let recs = sweep(&grid(0.05, 0.2, 10), &cfg, 0).unwrap();
        let pts = thermalization_points(&recs, RatioKind::ALL[1]);
        assert_eq!(pts.len(), 10);
        let fits = thermalization_analysis(&pts, cfg.device.omega_ge, QP_ONSET_CUTOFF).unwrap();
        assert!((fits.n_eff_vs_n_mxc.slope - 1.0).abs() < 1e-6);
    }
}
