use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{plane_wave_riemann, WaveVector, NULL_TOL};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::spectrum::{Sidedness, Spectrum};
use crate::synth::{log_log_fit, periodogram_with, TimeSeries, WelchOptions};

use super::noise::one_way_beta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probing {
    OneWay,
    RoundTrip,
}

impl Probing {
    /// Multiplier on the path integral.
    pub fn factor(self) -> f64 {
        match self {
            Probing::OneWay => 1.0,
            Probing::RoundTrip => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub realizations: usize,
    /// (frequency, direction) draws per realization, two polarizations each.
    pub modes: usize,
    /// Angular frequency band (rad/s).
    pub band: (f64, f64),
    pub path_length: f64,
    /// Spatial probe direction; normalized internally.
    pub direction: [f64; 3],
    pub probing: Probing,
    pub seed: u64,
    /// Log-spaced bins used for the averaged spectrum and the fit.
    pub fit_bins: usize,
    /// Frequency resolution as a fraction of the lower band edge: Δω = ω_min/resolution.
    pub resolution: usize,
    /// Multiplies every mode amplitude; 0 gives a null field.
    pub amplitude_scale: f64,
    /// Maximum accepted 95% interval width relative to beta_hat.
    pub target_rel_ci: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            realizations: 400,
            modes: 64,
            band: (1.0e10, 1.0e12),
            path_length: 3.0,
            direction: [0.0, 0.0, 1.0],
            probing: Probing::OneWay,
            seed: 0,
            fit_bins: 12,
            resolution: 32,
            amplitude_scale: 1.0,
            target_rel_ci: None,
        }
    }
}

/// One transverse-traceless plane wave of a realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwMode {
    pub k: WaveVector<f64>,
    /// Lower-index polarization h_{μν}, unit Frobenius norm over the spatial block / √2.
    pub polarization: [[f64; 4]; 4],
    /// |Z| in units of l_p.
    pub amplitude: f64,
    pub phase: f64,
    /// DFT bin carrying the mode.
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwRealization {
    pub modes: Vec<GwMode>,
    pub seed: u64,
    pub stream: u64,
    pub band: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McFit {
    /// Fixed-slope estimate of β.
    pub beta_hat: f64,
    pub beta_se: f64,
    pub beta_ci95: [f64; 2],
    /// Free log-log slope.
    pub slope_hat: f64,
    pub slope_se: f64,
    /// Free-fit intercept, ln(C/l_p²) at ω = 1 rad/s.
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    /// Ensemble average on the fit bins, one-sided, unit scale l_p².
    pub spectrum: Spectrum<f64>,
    pub fit: Option<McFit>,
    pub degenerate: bool,
    pub realizations: usize,
    pub samples: usize,
    pub dt: f64,
    /// Band average of the closed-form geometric factor for this geometry.
    pub beta_reference: f64,
    pub per_realization_beta: Vec<f64>,
}

/// ∫₀^l e^{iκσ} dσ.
pub fn path_factor(kappa: f64, l: f64) -> Complex64 {
    let z = kappa * l;
    if z.abs() < 1e-4 {
        Complex64::new(l * (1.0 - z * z / 6.0), l * z / 2.0)
    } else {
        (Complex64::new(0.0, z).exp() - 1.0) / Complex64::new(0.0, kappa)
    }
}

struct Layout {
    n: usize,
    dt: f64,
    dw: f64,
    k_lo: usize,
    k_hi: usize,
    /// Cumulative draw probabilities over k_lo..=k_hi.
    cdf: Vec<f64>,
    /// Draw probability of each bin.
    q: Vec<f64>,
}

impl Layout {
    fn new(cfg: &McConfig) -> Result<Self> {
        let (lo, hi) = cfg.band;
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(Error::Domain(format!("invalid band ({lo}, {hi})")));
        }
        if cfg.resolution < 1 || cfg.fit_bins < 2 || cfg.modes < 1 {
            return Err(Error::Config("resolution, modes and fit_bins must be positive (fit_bins >= 2)".into()));
        }
        let dw = lo / cfg.resolution as f64;
        let k_lo = cfg.resolution;
        let k_hi = (hi / dw * (1.0 + 1e-12)).floor() as usize;
        let n = (2 * k_hi + 2).next_power_of_two();
        let dt = 2.0 * PI / (n as f64 * dw);
        let w: Vec<f64> = (k_lo..=k_hi).map(|k| 1.0 / k as f64).collect();
        let total: f64 = w.iter().sum();
        let q: Vec<f64> = w.iter().map(|x| x / total).collect();
        let mut acc = 0.0;
        let cdf = q.iter().map(|x| {
            acc += x;
            acc
        }).collect();
        Ok(Self { n, dt, dw, k_lo, k_hi, cdf, q })
    }

    fn draw_bin(&self, u: f64) -> usize {
        let i = self.cdf.partition_point(|&c| c < u).min(self.q.len() - 1);
        self.k_lo + i
    }
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain("direction must be a non-zero finite vector".into()));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Plus and cross polarizations transverse to n̂.
fn tt_basis(n: [f64; 3]) -> [[[f64; 4]; 4]; 2] {
    let helper = if n[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let p = unit(cross(n, helper)).expect("n is a unit vector");
    let q = cross(n, p);
    let mut plus = [[0.0; 4]; 4];
    let mut cross_pol = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            plus[i + 1][j + 1] = p[i] * p[j] - q[i] * q[j];
            cross_pol[i + 1][j + 1] = p[i] * q[j] + q[i] * p[j];
        }
    }
    [plus, cross_pol]
}

fn draw_with(cfg: &McConfig, layout: &Layout, c: f64, index: u64) -> GwRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let mut modes = Vec::with_capacity(2 * cfg.modes);
    for _ in 0..cfg.modes {
        let bin = layout.draw_bin(rng.gen::<f64>());
        let omega = bin as f64 * layout.dw;
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).max(0.0).sqrt();
        let n = [r * phi.cos(), r * phi.sin(), z];
        let k = WaveVector::new([omega / c, omega / c * n[0], omega / c * n[1], omega / c * n[2]]);
        let q = layout.q[bin - layout.k_lo];
        let s = cfg.amplitude_scale
            * (2.0 * omega * layout.dw / (PI * c * c * cfg.modes as f64 * q)).sqrt();
        for pol in tt_basis(n) {
            let g1: f64 = StandardNormal.sample(&mut rng);
            let g2: f64 = StandardNormal.sample(&mut rng);
            let amp = Complex64::new(s * g1, s * g2);
            modes.push(GwMode {
                k,
                polarization: pol,
                amplitude: amp.norm(),
                phase: amp.arg(),
                bin,
            });
        }
    }
    GwRealization {
        modes,
        seed: cfg.seed,
        stream: index,
        band: cfg.band,
    }
}

/// Mode ensemble of realization `index`, reproducible from (seed, index).
pub fn draw_realization(
    cfg: &McConfig,
    constants: &PhysicalConstants<f64>,
    index: u64,
) -> Result<GwRealization> {
    let layout = Layout::new(cfg)?;
    Ok(draw_with(cfg, &layout, constants.c(), index))
}

/// Distance fluctuation δq(t) in units of l_p, sampled on the layout grid.
fn distance_series(real: &GwRealization, cfg: &McConfig, layout: &Layout, c: f64, u: [f64; 3]) -> Vec<f64> {
    let u4 = [1.0, u[0], u[1], u[2]];
    let mut spec = vec![Complex64::new(0.0, 0.0); layout.n];
    for m in &real.modes {
        debug_assert!(m.k.is_null(NULL_TOL));
        let kl = m.k.lower();
        let mut xi = 0.0;
        for mu in 0..4 {
            for rho in 0..4 {
                xi += plane_wave_riemann(&kl, &m.polarization, [0, mu, 0, rho]) * u4[mu] * u4[rho];
            }
        }
        let kappa: f64 = (0..4).map(|i| kl[i] * u4[i]).sum();
        let omega = m.k.k[0] * c;
        let z = Complex64::from_polar(m.amplitude, m.phase);
        let d = z * xi * path_factor(kappa, cfg.path_length) * cfg.probing.factor() * (-c * c / (omega * omega));
        spec[m.bin] += 0.5 * d;
        spec[layout.n - m.bin] += 0.5 * d.conj();
    }
    FftPlanner::new().plan_fft_forward(layout.n).process(&mut spec);
    spec.into_iter().map(|z| z.re).collect()
}

struct Binning {
    /// fit bin of each in-band DFT bin (k_lo..=k_hi)
    of: Vec<usize>,
    counts: Vec<usize>,
    omegas: Vec<f64>,
}

impl Binning {
    fn new(layout: &Layout, nb: usize) -> Result<Self> {
        let lo = layout.k_lo as f64 * layout.dw;
        let span = (layout.k_hi as f64 / layout.k_lo as f64).ln();
        let mut of = Vec::new();
        let mut counts = vec![0; nb];
        let mut log_sum = vec![0.0; nb];
        for k in layout.k_lo..=layout.k_hi {
            let w = k as f64 * layout.dw;
            let b = (((w / lo).ln() / span) * nb as f64).floor().min((nb - 1) as f64) as usize;
            of.push(b);
            counts[b] += 1;
            log_sum[b] += w.ln();
        }
        if counts.contains(&0) {
            return Err(Error::Config(format!(
                "{nb} fit bins leave empty bins; raise resolution or lower fit_bins"
            )));
        }
        let omegas = log_sum.iter().zip(&counts).map(|(s, &c)| (s / c as f64).exp()).collect();
        Ok(Self { of, counts, omegas })
    }
}

/// Per-realization bin means of C (l_p² units) and of C·ω.
fn realization_bins(
    cfg: &McConfig,
    layout: &Layout,
    binning: &Binning,
    c: f64,
    u: [f64; 3],
    index: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let real = draw_with(cfg, layout, c, index);
    let x = distance_series(&real, cfg, layout, c, u);
    let ts = TimeSeries::new(x, layout.dt)?;
    let p = periodogram_with(&ts, &WelchOptions::raw())?;
    let sym = p.spectrum.values();
    let nb = binning.counts.len();
    let mut c_mean = vec![0.0; nb];
    let mut cw_mean = vec![0.0; nb];
    for (i, k) in (layout.k_lo..=layout.k_hi).enumerate() {
        // periodogram index k-1 holds DFT bin k; one-sided = 2 × symmetrized
        let one_sided = 2.0 * sym[k - 1];
        let b = binning.of[i];
        c_mean[b] += one_sided;
        cw_mean[b] += one_sided * k as f64 * layout.dw;
    }
    for b in 0..nb {
        c_mean[b] /= binning.counts[b] as f64;
        cw_mean[b] /= binning.counts[b] as f64;
    }
    Ok((c_mean, cw_mean))
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, var.sqrt())
}

/// Monte-Carlo estimate of the distance-noise spectrum produced by an
/// isotropic background of transverse-traceless plane waves acting on a
/// probe ray along `cfg.direction`.
pub fn geodesic_deviation_mc(cfg: &McConfig, constants: &PhysicalConstants<f64>) -> Result<McResult> {
    if cfg.realizations < 2 {
        return Err(Error::StatisticalPower {
            requested: cfg.realizations,
            required: 2,
        });
    }
    if !(cfg.path_length > 0.0) || !cfg.path_length.is_finite() {
        return Err(Error::Domain(format!("path length must be > 0, got {}", cfg.path_length)));
    }
    if !(cfg.amplitude_scale >= 0.0) || !cfg.amplitude_scale.is_finite() {
        return Err(Error::Domain(format!("amplitude scale must be >= 0, got {}", cfg.amplitude_scale)));
    }
    let u = unit(cfg.direction)?;
    let c = constants.c();
    let layout = Layout::new(cfg)?;
    let binning = Binning::new(&layout, cfg.fit_bins)?;
    let nb = cfg.fit_bins;

    let per: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|i| realization_bins(cfg, &layout, &binning, c, u, i))
        .collect::<Result<_>>()?;

    let mut avg = vec![0.0; nb];
    for (cm, _) in &per {
        for (a, v) in avg.iter_mut().zip(cm) {
            *a += v;
        }
    }
    let inv = 1.0 / cfg.realizations as f64;
    avg.iter_mut().for_each(|a| *a *= inv);

    let pf = cfg.probing.factor();
    let mut beta_reference = 0.0;
    for (i, k) in (layout.k_lo..=layout.k_hi).enumerate() {
        let x = k as f64 * layout.dw * cfg.path_length / c;
        beta_reference += pf * pf * one_way_beta(x) / binning.counts[binning.of[i]] as f64;
    }
    beta_reference /= nb as f64;

    let betas: Vec<f64> = per.iter().map(|(_, cw)| cw.iter().sum::<f64>() / nb as f64).collect();

    let lp2 = constants.planck_length().powi(2);
    let grid = FrequencyGrid::new(binning.omegas.clone())?;
    let spectrum = Spectrum::new(grid, avg.iter().map(|v| v * lp2).collect(), Sidedness::OneSidedVacuum)?
        .with_unit_scale(lp2)?;

    let degenerate = avg.iter().all(|&v| v == 0.0);
    let fit = if degenerate {
        None
    } else {
        let (slope_hat, intercept) = log_log_fit(&binning.omegas, &avg)
            .ok_or_else(|| Error::Domain("log-log fit needs two positive bins".into()))?;
        let (beta_hat, beta_sd) = mean_sd(&betas);
        let beta_se = beta_sd / (cfg.realizations as f64).sqrt();
        let slope_se = batch_slope_se(&per, &binning.omegas);
        Some(McFit {
            beta_hat,
            beta_se,
            beta_ci95: [beta_hat - 1.96 * beta_se, beta_hat + 1.96 * beta_se],
            slope_hat,
            slope_se,
            intercept,
        })
    };

    if let (Some(target), Some(f)) = (cfg.target_rel_ci, fit) {
        let rel = 2.0 * 1.96 * f.beta_se / f.beta_hat;
        if rel > target {
            let required = (cfg.realizations as f64 * (rel / target).powi(2)).ceil() as usize;
            return Err(Error::StatisticalPower {
                requested: cfg.realizations,
                required,
            });
        }
    }

    Ok(McResult {
        spectrum,
        fit,
        degenerate,
        realizations: cfg.realizations,
        samples: layout.n,
        dt: layout.dt,
        beta_reference,
        per_realization_beta: betas,
    })
}

/// Standard error of the free slope from contiguous batches of realizations.
fn batch_slope_se(per: &[(Vec<f64>, Vec<f64>)], omegas: &[f64]) -> f64 {
    let batches = per.len().min(10);
    if batches < 2 {
        return f64::NAN;
    }
    let size = per.len() / batches;
    let slopes: Vec<f64> = (0..batches)
        .filter_map(|b| {
            let chunk = &per[b * size..(b + 1) * size];
            let mut avg = vec![0.0; omegas.len()];
            for (cm, _) in chunk {
                for (a, v) in avg.iter_mut().zip(cm) {
                    *a += v;
                }
            }
            log_log_fit(omegas, &avg).map(|(s, _)| s)
        })
        .collect();
    if slopes.len() < 2 {
        return f64::NAN;
    }
    let (_, sd) = mean_sd(&slopes);
    sd / (slopes.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> McConfig {
        McConfig {
            realizations: 40,
            band: (1.0e10, 1.0e12),
            resolution: 16,
            ..McConfig::default()
        }
    }

    #[test]
    fn path_factor_matches_quadrature() {
        for &(kappa, l) in &[(3.0, 2.0), (1e-7, 1.0), (250.0, 0.3)] {
            let n = 200_000;
            let h = l / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=n {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * Complex64::new(0.0, kappa * i as f64 * h).exp();
            }
            acc *= h;
            assert!((acc - path_factor(kappa, l)).norm() < 1e-8 * l, "{kappa}");
        }
    }

    #[test]
    fn modes_are_null_and_transverse_traceless() {
        let cfg = small();
        let r = draw_realization(&cfg, &PhysicalConstants::<f64>::codata(), 3).unwrap();
        assert_eq!(r.modes.len(), 2 * cfg.modes);
        for m in &r.modes {
            assert!(m.k.is_null(NULL_TOL));
            let h = &m.polarization;
            let tr: f64 = (1..4).map(|i| h[i][i]).sum();
            assert!(tr.abs() < 1e-12);
            for j in 1..4 {
                let t: f64 = (1..4).map(|i| m.k.k[i] * h[i][j]).sum();
                assert!(t.abs() < 1e-12 * m.k.k[0]);
                assert_eq!(h[0][j], 0.0);
            }
            let w = m.bin as f64 * cfg.band.0 / cfg.resolution as f64;
            assert!(w >= cfg.band.0 * (1.0 - 1e-12) && w <= cfg.band.1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn streams_are_independent_of_order() {
        let cfg = small();
        let c = PhysicalConstants::<f64>::codata();
        let a = draw_realization(&cfg, &c, 5).unwrap();
        let _ = draw_realization(&cfg, &c, 4).unwrap();
        assert_eq!(a, draw_realization(&cfg, &c, 5).unwrap());
        assert_ne!(a, draw_realization(&cfg, &c, 6).unwrap());
    }

    #[test]
    fn null_field_is_degenerate() {
        let cfg = McConfig {
            amplitude_scale: 0.0,
            ..small()
        };
        let r = geodesic_deviation_mc(&cfg, &PhysicalConstants::<f64>::codata()).unwrap();
        assert!(r.degenerate);
        assert!(r.fit.is_none());
        assert!(r.spectrum.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_few_realizations() {
        let cfg = McConfig {
            realizations: 1,
            ..small()
        };
        assert!(matches!(
            geodesic_deviation_mc(&cfg, &PhysicalConstants::<f64>::codata()),
            Err(Error::StatisticalPower { required: 2, .. })
        ));
        let cfg = McConfig {
            target_rel_ci: Some(1e-4),
            ..small()
        };
        match geodesic_deviation_mc(&cfg, &PhysicalConstants::<f64>::codata()) {
            Err(Error::StatisticalPower { requested, required }) => {
                assert_eq!(requested, 40);
                assert!(required > 40);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_run_tracks_reference() {
        let r = geodesic_deviation_mc(&small(), &PhysicalConstants::<f64>::codata()).unwrap();
        let f = r.fit.unwrap();
        assert!(r.spectrum.values().iter().all(|&v| v >= 0.0));
        assert!((f.beta_hat - r.beta_reference).abs() < 5.0 * f.beta_se, "{f:?} {}", r.beta_reference);
        assert!((f.slope_hat + 1.0).abs() < 0.3, "{f:?}");
    }
}
