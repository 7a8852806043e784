use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qlim_core::gravity::{
    classify_regime, combined_spectrum, geodesic_deviation_mc, gravitational_distance_spectrum, Regime,
};
use qlim_core::measurement::{optimize_strategy_tuned, sql_bound, uql_bound, ProbeTuning};
use qlim_core::response::{
    check_fdt_with, mech_susceptibility, mirror_susceptibility, vacuum_motional_susceptibility,
    vacuum_spectrum_from_response,
};
use qlim_core::synth::{bin_frequency, synthesize};
use qlim_core::{Error, FdtOptions, FrequencyGrid, PhysicalConstants, Sidedness, Spectrum};
use serde_json::json;

use crate::config::{FdtModel, RunConfig, SpectrumSource, UnitScale, Validator};
use crate::error::CliError;

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn scale_value(
    scale: UnitScale,
    constants: &PhysicalConstants<f64>,
    mass: Option<f64>,
) -> Result<f64, CliError> {
    match scale {
        UnitScale::Planck => Ok(constants.planck_length().powi(2)),
        UnitScale::Si => Ok(1.0),
        UnitScale::Compton => {
            let m = mass.ok_or_else(|| {
                CliError::Validation(vec![crate::error::Issue::new(
                    "output.unit_scale",
                    "compton scale needs a mirror mass",
                )])
            })?;
            Ok(constants.compton_wavelength(m).map_err(validation("mirror.mass"))?.powi(2))
        }
    }
}

fn scale_name(scale: UnitScale) -> &'static str {
    match scale {
        UnitScale::Planck => "planck_length_sq",
        UnitScale::Compton => "compton_wavelength_sq",
        UnitScale::Si => "si",
    }
}

fn scale_comment(scale: UnitScale, value: f64) -> String {
    format!("# unit_scale = {} ({} m^2)\n", scale_name(scale), num(value))
}

fn validation(field: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::Validation(vec![crate::error::Issue::new(field, e.to_string())])
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Companion JSON path: `<out>.json`.
pub fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::Microscopic => "Microscopic",
        Regime::Macroscopic => "Macroscopic",
    }
}

pub fn budget(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut v = Validator::default();
    let constants = cfg.constants(&mut v);
    let mirror = cfg.mirror(&mut v);
    let grid = cfg.grid(&mut v);
    let beta = cfg.fixed_beta(&mut v);
    v.finish()?;
    let (p, grid, beta) = (mirror.unwrap(), grid.unwrap(), beta.unwrap());
    let alpha = cfg.alpha();

    let chi = mirror_susceptibility(&p, &grid, &constants).map_err(validation("mirror"))?;
    let hbar = constants.hbar();
    let sql = sql_bound(&chi, p.mass(), hbar).map_err(validation("mirror"))?;
    let uql = uql_bound(&chi, p.mass(), hbar).map_err(validation("mirror"))?;
    let combined = combined_spectrum(&p, alpha, beta, &grid, &constants).map_err(validation("mirror"))?;

    let scale = cfg.output.unit_scale.unwrap_or(UnitScale::Planck);
    let s = scale_value(scale, &constants, Some(p.mass()))?;
    let label = regime_label(combined.regime.regime);
    let mut text = scale_comment(scale, s);
    text.push_str("omega_rad_s,C_sql,C_uql,C_vac_rp,C_grav,C_total,regime\n");
    for i in 0..grid.len() {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            num(grid.omegas()[i]),
            num(sql.spectrum.values()[i] / s),
            num(uql.spectrum.values()[i] / s),
            num(combined.radiation_pressure.values()[i] / s),
            num(combined.gravitational.values()[i] / s),
            num(combined.total.values()[i] / s),
            label
        );
    }
    write(out, &text)
}

pub fn optimize(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut v = Validator::default();
    let constants = cfg.constants(&mut v);
    let mirror = cfg.mirror(&mut v);
    let grid = cfg.grid(&mut v);
    let r_max = cfg.optimizer.r_max;
    if !(r_max >= 0.0) || !r_max.is_finite() {
        v.push("optimizer.r_max", format!("must be finite and >= 0, got {r_max}"));
    }
    if let Some(k0) = cfg.probe.k0 {
        v.positive("probe.k0", k0);
    }
    v.finish()?;
    let (p, grid) = (mirror.unwrap(), grid.unwrap());
    let hbar = constants.hbar();

    let chi = mirror_susceptibility(&p, &grid, &constants).map_err(validation("mirror"))?;
    let tuning = cfg.probe.k0.map_or(ProbeTuning::Balanced, ProbeTuning::Fixed);
    let strategy = optimize_strategy_tuned(&chi, hbar, tuning, r_max).map_err(validation("probe"))?;
    let sql = sql_bound(&chi, p.mass(), hbar).map_err(validation("mirror"))?;
    let uql = uql_bound(&chi, p.mass(), hbar).map_err(validation("mirror"))?;

    let scale = cfg.output.unit_scale.unwrap_or(UnitScale::Compton);
    let s = scale_value(scale, &constants, Some(p.mass()))?;
    let mut text = scale_comment(scale, s);
    text.push_str("omega_rad_s,S_pp,S_ii,S_pi,achieved,sql,uql\n");
    let mut failures = Vec::new();
    for (i, pt) in strategy.points.iter().enumerate() {
        let q = pt.quadratures.expect("finite cap always yields a covariance");
        let (a, lo, hi) = (pt.achieved, uql.spectrum.values()[i], sql.spectrum.values()[i]);
        // det is formed from entries up to e^{2r}; judge it at that precision
        let det_tol = 1e-12 * (q.s_pp * q.s_ii).max(1.0);
        if a < lo * (1.0 - 1e-9) || q.det() < 1.0 - det_tol {
            failures.push(i);
        }
        if matches!(tuning, ProbeTuning::Balanced) && a > hi * (1.0 + 1e-12) {
            failures.push(i);
        }
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            num(grid.omegas()[i]),
            num(q.s_pp),
            num(q.s_ii),
            num(q.s_pi),
            num(a / s),
            num(hi / s),
            num(lo / s)
        );
    }
    write(out, &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "optimizer output outside [uql, sql] or det < 1 at rows {failures:?}"
        )))
    }
}

pub fn fdt(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut v = Validator::default();
    let constants = cfg.constants(&mut v);
    let mirror = cfg.mirror(&mut v);
    let grid = cfg.grid(&mut v);
    v.positive("fdt.tol", cfg.fdt.tol);
    v.positive("fdt.kk_tol", cfg.fdt.kk_tol);
    if let (Some(f), Some(g)) = (cfg.fdt.fault, &grid) {
        if f.index >= g.len() {
            v.push("fdt.fault.index", format!("{} is outside a grid of {} points", f.index, g.len()));
        }
        if !(f.factor >= 0.0) || !f.factor.is_finite() {
            v.push("fdt.fault.factor", "must be finite and >= 0");
        }
    }
    v.finish()?;
    let (p, grid) = (mirror.unwrap(), grid.unwrap());
    let hbar = constants.hbar();

    let chi = match cfg.fdt.model {
        FdtModel::Mechanical => mech_susceptibility(&p, &grid),
        FdtModel::VacuumMotional => vacuum_motional_susceptibility(cfg.alpha(), &grid, &constants),
        FdtModel::Dressed => mirror_susceptibility(&p, &grid, &constants),
    }
    .map_err(validation("fdt.model"))?;
    let mut spectrum = vacuum_spectrum_from_response(&chi, hbar).map_err(validation("fdt.model"))?;
    if let Some(f) = cfg.fdt.fault {
        let mut values = spectrum.values().to_vec();
        values[f.index] *= f.factor;
        spectrum = Spectrum::new(grid.clone(), values, spectrum.sidedness()).map_err(validation("fdt.fault"))?;
    }
    let opts = FdtOptions {
        tol: cfg.fdt.tol,
        kk_tol: cfg.fdt.kk_tol,
        run_kk: cfg.fdt.kk,
        ..FdtOptions::default()
    };
    let report = check_fdt_with(&spectrum, &chi, hbar, &opts).map_err(validation("fdt"))?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write(out, &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "fluctuation-dissipation check failed (commutator {:e}, zero-temperature {:e})",
            report.max_residual_commutator, report.max_residual_zero_temp
        )))
    }
}

pub fn gw_mc(cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let mut v = Validator::default();
    let constants = cfg.constants(&mut v);
    let mc = cfg.mc_config(seed, &mut v);
    v.finish()?;

    let result = geodesic_deviation_mc(&mc, &constants).map_err(|e| match e {
        Error::StatisticalPower { .. } => CliError::Numerical(e.to_string()),
        other => validation("gravity")(other),
    })?;

    let scale = cfg.output.unit_scale.unwrap_or(UnitScale::Planck);
    let s = scale_value(scale, &constants, cfg.mirror.as_ref().map(|m| m.mass))?;
    let mut text = scale_comment(scale, s);
    text.push_str("omega_rad_s,C_qq\n");
    for (w, c) in result.spectrum.grid().iter().zip(result.spectrum.values()) {
        let _ = writeln!(text, "{},{}", num(w), num(c / s));
    }
    write(out, &text)?;

    let fit = result.fit.map(|f| {
        json!({
            "beta_hat": f.beta_hat,
            "beta_se": f.beta_se,
            "beta_ci95": f.beta_ci95,
            "slope_hat": f.slope_hat,
            "slope_se": f.slope_se,
            "intercept": f.intercept,
        })
    });
    let meta = json!({
        "fit": fit,
        "degenerate": result.degenerate,
        "beta_reference": result.beta_reference,
        "realizations": result.realizations,
        "modes": mc.modes,
        "band_rad_s": [mc.band.0, mc.band.1],
        "path_length_m": mc.path_length,
        "direction": mc.direction,
        "probing": mc.probing,
        "seed": mc.seed,
        "samples": result.samples,
        "dt_s": result.dt,
        "unit_scale": scale_name(scale),
    });
    write(&sidecar(out), &(serde_json::to_string_pretty(&meta).expect("json") + "\n"))?;
    if result.degenerate {
        Err(CliError::Numerical("null field: the spectrum is zero and no fit was made".into()))
    } else {
        Ok(())
    }
}

pub fn synth(cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let mut v = Validator::default();
    let constants = cfg.constants(&mut v);
    let Some(sc) = &cfg.synth else {
        v.push("synth", "section is required by this command");
        return v.finish();
    };
    v.positive("synth.duration", sc.duration);
    v.positive("synth.dt", sc.dt);
    let n = (sc.duration / sc.dt).round();
    if sc.duration > 0.0 && sc.dt > 0.0 && n < 4.0 {
        v.push("synth", "duration must cover at least 4 samples");
    }
    let needs = match &sc.spectrum {
        SpectrumSource::Gravitational => (cfg.fixed_beta(&mut v), None),
        SpectrumSource::Combined => (cfg.fixed_beta(&mut v), cfg.mirror(&mut v)),
        SpectrumSource::Table { .. } => (None, None),
    };
    v.finish()?;

    let n = n as usize;
    let band = || FrequencyGrid::log_spaced(bin_frequency(1, n, sc.dt), bin_frequency(n / 2, n, sc.dt), 256);
    let (target, provenance) = match &sc.spectrum {
        SpectrumSource::Gravitational => {
            let g = band().map_err(validation("synth"))?;
            let s = gravitational_distance_spectrum(needs.0.unwrap(), constants.planck_length(), &g)
                .map_err(validation("gravity.beta"))?;
            (s.symmetrize(), "gravitational")
        }
        SpectrumSource::Combined => {
            let g = band().map_err(validation("synth"))?;
            let p = needs.1.unwrap();
            let s = combined_spectrum(&p, cfg.alpha(), needs.0.unwrap(), &g, &constants)
                .map_err(validation("mirror"))?;
            (s.total.symmetrize(), "combined")
        }
        SpectrumSource::Table { omegas, values } => {
            let g = FrequencyGrid::new(omegas.clone()).map_err(validation("synth.spectrum.omegas"))?;
            let s = Spectrum::new(g, values.clone(), Sidedness::Symmetrized)
                .map_err(validation("synth.spectrum.values"))?;
            (s, "table")
        }
    };
    let seed = seed.unwrap_or(sc.seed);
    let ts = synthesize(&target, sc.duration, sc.dt, seed).map_err(validation("synth"))?;

    let mut text = String::from("t_s,q_m\n");
    for (i, x) in ts.samples().iter().enumerate() {
        let _ = writeln!(text, "{},{}", num(i as f64 * ts.dt()), num(*x));
    }
    write(out, &text)?;
    let meta = json!({
        "dt_s": ts.dt(),
        "samples": ts.len(),
        "seed": seed,
        "spectrum": provenance,
        "sidedness": "symmetrized",
        "band_rad_s": [target.grid().min(), target.grid().max()],
        "regime": cfg.mirror.as_ref().and_then(|m| classify_regime(m.mass, &constants).ok()).map(|r| regime_label(r.regime)),
    });
    write(&sidecar(out), &(serde_json::to_string_pretty(&meta).expect("json") + "\n"))
}
