//! The four subcommands. Each returns a table; `main` writes it.

use std::path::Path;

use qthermo::dynamics::rate_set;
use qthermo::error_analysis::{net, qfi_bound_boltzmann, qfi_bound_three_level, qfi_bound_two_level};
use qthermo::experiment::{estimator_spread, sweep, thermalization_analysis, ThermalizationPoint};
use qthermo::quasiparticle::{gamma1_qp, gamma_phi_andreev, gamma_phi_qp_tunneling};
use qthermo::thermometry::{EstimateStatus, RatioKind};
use qthermo::units::{frequency_to_kelvin, mhz, millikelvin, to_mhz, to_microseconds, to_millikelvin, RateConvention};

use crate::config::{family_index, Resolved};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

fn header(table: &mut Table, command: &str, r: &Resolved, seed: u64) {
    table.meta("command", command);
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("seed", seed.to_string());
    let config = serde_json::to_string(&r.config).expect("config always serializes");
    table.meta("config", config);
}

fn status_name(s: EstimateStatus) -> &'static str {
    match s {
        EstimateStatus::Ok => "ok",
        EstimateStatus::OutOfRange => "out_of_range",
        EstimateStatus::NonMonotoneInput => "non_monotone_input",
    }
}

/// Quasiparticle and base relaxation and dephasing over the grid.
pub fn rates(r: &Resolved, seed: u64) -> CliResult<Table> {
    let junction = r
        .junction
        .ok_or_else(|| CliError::Config("device.junction: the rates command needs junction parameters".into()))?;
    let mut t = Table::new(&[
        "T_mK",
        "gamma1_qp",
        "tau1_qp_us",
        "tau1_total_us",
        "gamma_phi_tunneling",
        "gamma_phi_andreev",
        "gamma1_base",
    ]);
    header(&mut t, "rates", r, seed);
    t.meta("units", "rates gamma/2pi in MHz, times in us (tau = 2pi/gamma)");
    let conv = RateConvention::TwoPi;
    for &temp in &r.temperatures {
        let qp = gamma1_qp(&r.device, &junction, temp)?;
        let base = rate_set(&r.device, temp, (0.0, 0.0))?;
        let base = base.ge_up + base.ge_down;
        t.push(vec![
            to_millikelvin(temp).into(),
            to_mhz(qp).into(),
            to_microseconds(conv.time_from_rate(qp)).into(),
            to_microseconds(conv.time_from_rate(qp + base)).into(),
            to_mhz(gamma_phi_qp_tunneling(&junction, temp)?).into(),
            to_mhz(gamma_phi_andreev(&r.device, &junction, temp)?).into(),
            to_mhz(base).into(),
        ]);
    }
    Ok(t)
}

pub fn sweep_columns() -> Vec<String> {
    let mut cols: Vec<String> = [
        "T_mK", "seed", "stream", "status", "failure", "T_qubit_mK", "gamma1", "pg", "pe", "pf", "x0", "x1", "x2", "y0",
        "y1", "y2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for k in RatioKind::ALL {
        let n = k.name();
        cols.push(format!("{n}_ratio"));
        cols.push(format!("T_{n}_mK"));
        cols.push(format!("dT_{n}_mK"));
        cols.push(format!("status_{n}"));
    }
    cols.extend(["spread", "fit_pg", "fit_pe", "fit_pf", "fit_inconsistent"].map(String::from));
    cols
}

/// One row per temperature with outcomes, all nine estimates and their error bars.
pub fn sweep_table(r: &Resolved, seed: u64) -> CliResult<Table> {
    let records = sweep(&r.temperatures, &r.sweep, seed)?;
    let cols = sweep_columns();
    let mut t = Table::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
    header(&mut t, "sweep", r, seed);
    t.meta("units", "temperatures in mK, gamma1 = gamma/2pi in MHz, spread = (max - min)/T over the nine estimates");
    let nan = f64::NAN;
    for rec in &records {
        let mut row: Vec<Cell> = vec![
            to_millikelvin(rec.temperature).into(),
            rec.seed.into(),
            rec.stream.into(),
        ];
        match &rec.data {
            None => {
                row.push("failed".into());
                row.push(rec.failure.clone().unwrap_or_default().into());
                while row.len() < cols.len() {
                    row.push(nan.into());
                }
                for k in RatioKind::ALL {
                    let i = cols.iter().position(|c| *c == format!("status_{}", k.name())).unwrap();
                    row[i] = "failed".into();
                }
            }
            Some(d) => {
                row.push("ok".into());
                row.push("".into());
                row.push(to_millikelvin(d.effective_temperature).into());
                row.push(to_mhz(d.gamma1).into());
                row.extend(d.initial.to_array().map(Cell::from));
                row.extend(d.outcomes.to_array().map(Cell::from));
                for k in RatioKind::ALL {
                    let (ratio, temp, status) = d.estimates.get(k);
                    let dt = match (status, d.errors[k.method as usize - 1]) {
                        (EstimateStatus::Ok, Some(e)) => e.temperature_relative[family_index(k.family)] * temp,
                        _ => nan,
                    };
                    row.push(ratio.into());
                    row.push(to_millikelvin(temp).into());
                    row.push(to_millikelvin(dt).into());
                    row.push(status_name(status).into());
                }
                row.push(estimator_spread(&d.estimates, rec.temperature).into());
                match &d.populations {
                    Some(f) => {
                        row.extend(f.populations.map(Cell::from));
                        row.push(if f.inconsistent { "true" } else { "false" }.into());
                    }
                    None => {
                        row.extend([nan, nan, nan].map(Cell::from));
                        row.push("".into());
                    }
                }
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// Fisher-information error floors and the NET of the two-level bound.
pub fn fisher(r: &Resolved, seed: u64) -> CliResult<Table> {
    let f = &r.config.fisher;
    let deg_col = format!("rel_error_N{}", f.degeneracy);
    let mut t = Table::new(&[
        "T_mK",
        "rel_error_2lvl",
        "rel_error_3lvl",
        "rel_error_3lvl_exact",
        &deg_col,
        "NET",
    ]);
    header(&mut t, "fisher", r, seed);
    t.meta(
        "units",
        "relative errors for the configured shot count, NET of the two-level bound in mK/sqrt(Hz)",
    );
    let shots = f.shots as f64;
    let k_ge = frequency_to_kelvin(r.device.omega_ge);
    let k_gf = frequency_to_kelvin(r.device.omega_gf());
    for &temp in &r.temperatures {
        let (x_ge, x_gf) = (k_ge / temp, k_gf / temp);
        let rel = |per_shot: f64| (per_shot / shots).sqrt();
        let two = rel(qfi_bound_two_level(x_ge, 2)?);
        t.push(vec![
            to_millikelvin(temp).into(),
            two.into(),
            rel(qfi_bound_three_level(x_ge, x_gf)?).into(),
            rel(qfi_bound_boltzmann(&[0.0, x_ge, x_gf])?).into(),
            rel(qfi_bound_two_level(x_ge, f.degeneracy)?).into(),
            to_millikelvin(net(two * temp, f.t_meas_s)?).into(),
        ]);
    }
    Ok(t)
}

fn numeric(table: &Table, row: usize, col: usize) -> CliResult<f64> {
    let line = table.header.len() + 2 + row;
    table.rows[row][col]
        .as_f64()
        .ok_or_else(|| CliError::Input(format!("line {line}: column `{}` is not a number", table.columns[col])))
}

/// Thermalization fits over a sweep file or an external CSV with columns
/// `T_mK`, `gamma1` (MHz) and `T_eff_mK` (optional `gamma1_err`, `T_eff_err_mK`).
pub fn fit(input: &Path, r: &Resolved, seed: u64) -> CliResult<Table> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let data = Table::from_csv(&text)?;
    let kind = r.config.fit.kind()?;
    let need = |name: &str| {
        data.column(name)
            .ok_or_else(|| CliError::Input(format!("{}: missing column `{name}`", input.display())))
    };
    let t_col = need("T_mK")?;
    let g_col = need("gamma1")?;
    let (teff_col, teff_err_col) = match data.column("T_eff_mK") {
        Some(c) => (c, data.column("T_eff_err_mK")),
        None => {
            let n = kind.name();
            (need(&format!("T_{n}_mK"))?, data.column(&format!("dT_{n}_mK")))
        }
    };
    let g_err_col = data.column("gamma1_err");
    let positive_err = |v: f64| if v.is_finite() && v > 0.0 { Some(v) } else { None };
    let mut points = Vec::new();
    for i in 0..data.rows.len() {
        let t_mxc = numeric(&data, i, t_col)?;
        let gamma = numeric(&data, i, g_col)?;
        let t_eff = numeric(&data, i, teff_col)?;
        if ![t_mxc, gamma, t_eff].iter().all(|v| v.is_finite()) {
            log::info!("skipping row {} with a non-finite value", i + 1);
            continue;
        }
        let gamma1_error = match g_err_col {
            Some(c) => positive_err(numeric(&data, i, c)?).map(mhz),
            None => None,
        };
        let t_eff_error = match teff_err_col {
            Some(c) => positive_err(numeric(&data, i, c)?).map(millikelvin),
            None => None,
        };
        points.push(ThermalizationPoint {
            t_mxc: millikelvin(t_mxc),
            gamma1: mhz(gamma),
            gamma1_error,
            t_eff: millikelvin(t_eff),
            t_eff_error,
        });
    }
    let fits = thermalization_analysis(&points, r.device.omega_ge, millikelvin(r.config.fit.cutoff_mk))?;
    let mut t = Table::new(&["fit", "slope", "offset", "slope_error", "offset_error", "chi2", "points"]);
    header(&mut t, "fit", r, seed);
    t.meta("input", input.display().to_string());
    t.meta(
        "units",
        "gamma1_vs_n: slope in MHz/photon and offset in MHz (gamma/2pi); n_eff_vs_n_mxc dimensionless",
    );
    let g = fits.gamma1_vs_n;
    t.meta("k_over_b", format!("{:.16e}", g.slope / g.offset));
    t.push(vec![
        "gamma1_vs_n".into(),
        to_mhz(g.slope).into(),
        to_mhz(g.offset).into(),
        to_mhz(g.slope_error).into(),
        to_mhz(g.offset_error).into(),
        g.chi2.into(),
        (g.points as u64).into(),
    ]);
    let n = fits.n_eff_vs_n_mxc;
    t.push(vec![
        "n_eff_vs_n_mxc".into(),
        n.slope.into(),
        n.offset.into(),
        n.slope_error.into(),
        n.offset_error.into(),
        n.chi2.into(),
        (n.points as u64).into(),
    ]);
    Ok(t)
}
