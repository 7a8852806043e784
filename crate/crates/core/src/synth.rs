//! Gaussian surrogate time series from a spectrum, and Welch periodograms to
//! estimate spectra back.
//!
//! Spectra here are symmetrized densities in the crate's Fourier convention:
//! variance = ∫ dω/2π C_sym[ω] over (−π/dt, π/dt).

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::spectrum::{Sidedness, Spectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    samples: Vec<f64>,
    dt: f64,
    seed: Option<u64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be finite and > 0, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::TooShort {
                len: samples.len(),
                segments: 1,
            });
        }
        Ok(Self {
            samples,
            dt,
            seed: None,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (self.samples.len() - 1) as f64
    }
}

/// Angular frequency of DFT bin `k` for `n` samples at spacing `dt`.
pub fn bin_frequency(k: usize, n: usize, dt: f64) -> f64 {
    2.0 * PI * k as f64 / (n as f64 * dt)
}

/// Draw a stationary Gaussian series whose expected periodogram is `s`.
///
/// Each positive DFT bin gets independent Gaussian cosine and sine
/// amplitudes with variance 2·C_sym(ω_k)·Δω/2π; the DC bin is zero. Bins are
/// drawn in ascending order from a ChaCha8 stream seeded by `seed`.
pub fn synthesize(s: &Spectrum<f64>, duration: f64, dt: f64, seed: u64) -> Result<TimeSeries> {
    if s.sidedness() != Sidedness::Symmetrized {
        return Err(Error::Domain(format!(
            "synthesis needs a symmetrized spectrum, got {:?}",
            s.sidedness()
        )));
    }
    if !(dt > 0.0) || !(duration > 0.0) {
        return Err(Error::Domain(format!(
            "duration and dt must be > 0 (got {duration}, {dt})"
        )));
    }
    let n = (duration / dt).round() as usize;
    if n < 2 {
        return Err(Error::TooShort { len: n, segments: 1 });
    }

    let (lo, hi) = (s.grid().min(), s.grid().max());
    let mut targets = Vec::with_capacity(n / 2);
    let mut missing = Vec::new();
    for k in 1..=n / 2 {
        let mut w = bin_frequency(k, n, dt);
        // absorb rounding at the band edges
        if w < lo && (lo - w) <= 1e-9 * lo {
            w = lo;
        }
        if w > hi && (w - hi) <= 1e-9 * hi {
            w = hi;
        }
        match s.interpolate(w) {
            Some(v) => targets.push(v),
            None => {
                missing.push(k);
                targets.push(0.0);
            }
        }
    }
    if let Some(&k) = missing.first() {
        return Err(Error::Coverage {
            first_missing: bin_frequency(k, n, dt),
            missing,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_bin = 1.0 / (n as f64 * dt);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (idx, &c) in targets.iter().enumerate() {
        let k = idx + 1;
        let g1: f64 = StandardNormal.sample(&mut rng);
        let g2: f64 = StandardNormal.sample(&mut rng);
        if 2 * k == n {
            // Nyquist: one real degree of freedom
            spec[k] = Complex64::new((c * per_bin).sqrt() * g1, 0.0);
        } else {
            let sigma = (2.0 * c * per_bin).sqrt();
            let x = Complex64::new(0.5 * sigma * g1, 0.5 * sigma * g2);
            spec[k] += x;
            spec[n - k] += x.conj();
        }
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);
    let samples = spec.iter().map(|z| z.re).collect();
    Ok(TimeSeries {
        samples,
        dt,
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    fn weights(self, len: usize) -> Vec<f64> {
        match self {
            // periodic Hann
            Window::Hann => (0..len)
                .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / len as f64).cos()))
                .collect(),
            Window::Rectangular => vec![1.0; len],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchOptions {
    pub segments: usize,
    pub window: Window,
    /// Fractional overlap of consecutive segments, in [0, 1).
    pub overlap: f64,
}

impl WelchOptions {
    pub fn hann(segments: usize) -> Self {
        Self {
            segments,
            window: Window::Hann,
            overlap: 0.5,
        }
    }

    /// One unwindowed segment over the whole series.
    pub fn raw() -> Self {
        Self {
            segments: 1,
            window: Window::Rectangular,
            overlap: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodogramMeta {
    pub window: Window,
    pub overlap: f64,
    pub segments: usize,
    pub segment_len: usize,
    /// Segment means were subtracted before the transform.
    pub dc_removed: bool,
    /// Mean of the squared segment means.
    pub dc_power: f64,
    /// Standard error of each bin relative to its expectation.
    pub relative_standard_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub spectrum: Spectrum<f64>,
    pub meta: PeriodogramMeta,
}

/// Welch periodogram with Hann windows and 50% overlap.
pub fn periodogram(ts: &TimeSeries, n_segments: usize) -> Result<Periodogram> {
    periodogram_with(ts, &WelchOptions::hann(n_segments))
}

pub fn periodogram_with(ts: &TimeSeries, opts: &WelchOptions) -> Result<Periodogram> {
    let n = ts.len();
    let k_seg = opts.segments;
    if k_seg == 0 || n < 2 * k_seg {
        return Err(Error::TooShort {
            len: n,
            segments: k_seg,
        });
    }
    if !(0.0..1.0).contains(&opts.overlap) {
        return Err(Error::Domain(format!("overlap must be in [0, 1), got {}", opts.overlap)));
    }
    // n = len + (K − 1)·step with step = (1 − overlap)·len
    let len = if k_seg == 1 {
        n
    } else {
        (n as f64 / (1.0 + (k_seg - 1) as f64 * (1.0 - opts.overlap))).floor() as usize
    };
    let step = if k_seg == 1 {
        0
    } else {
        (((1.0 - opts.overlap) * len as f64).floor() as usize).max(1)
    };
    if len < 4 || (k_seg - 1) * step + len > n {
        return Err(Error::TooShort {
            len: n,
            segments: k_seg,
        });
    }

    let w = opts.window.weights(len);
    let w_sq: f64 = w.iter().map(|x| x * x).sum();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let half = len / 2;
    let mut acc = vec![0.0; half];
    let mut dc_power = 0.0;
    let mut dc_removed = false;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for s in 0..k_seg {
        let seg = &ts.samples[s * step..s * step + len];
        let mean = seg.iter().sum::<f64>() / len as f64;
        if mean != 0.0 {
            dc_removed = true;
        }
        dc_power += mean * mean;
        for (b, (&x, &wi)) in buf.iter_mut().zip(seg.iter().zip(&w)) {
            *b = Complex64::new((x - mean) * wi, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += ts.dt * buf[k + 1].norm_sqr() / w_sq;
        }
    }
    let inv = 1.0 / k_seg as f64;
    let values: Vec<f64> = acc.iter().map(|a| a * inv).collect();
    let omegas = (1..=half).map(|k| bin_frequency(k, len, ts.dt)).collect();
    let grid = FrequencyGrid::new(omegas)?;

    // variance inflation from correlated overlapping segments
    let rho = if k_seg > 1 && step < len {
        let cross: f64 = (0..len - step).map(|i| w[i] * w[i + step]).sum();
        (cross / w_sq).powi(2)
    } else {
        0.0
    };
    let kf = k_seg as f64;
    let var_factor = (1.0 + 2.0 * (1.0 - 1.0 / kf) * rho) / kf;

    Ok(Periodogram {
        spectrum: Spectrum::new(grid, values, Sidedness::Symmetrized)?,
        meta: PeriodogramMeta {
            window: opts.window,
            overlap: opts.overlap,
            segments: k_seg,
            segment_len: len,
            dc_removed,
            dc_power: dc_power * inv,
            relative_standard_error: var_factor.sqrt(),
        },
    })
}

/// Ordinary least-squares slope and intercept of log y against log x,
/// skipping non-positive entries.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(c: f64, lo: f64, hi: f64) -> Spectrum<f64> {
        let g = FrequencyGrid::log_spaced(lo, hi, 64).unwrap();
        Spectrum::new(g, vec![c; 64], Sidedness::Symmetrized).unwrap()
    }

    #[test]
    fn zero_spectrum_gives_zero_series() {
        let s = flat(0.0, 0.1, 10.0);
        let ts = synthesize(&s, 2.0 * PI / 0.1, PI / 10.0, 3).unwrap();
        assert!(ts.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn deterministic_in_seed() {
        let s = flat(1.0, 0.1, 10.0);
        let (d, dt) = (2.0 * PI / 0.1, PI / 10.0);
        let a = synthesize(&s, d, dt, 11).unwrap();
        let b = synthesize(&s, d, dt, 11).unwrap();
        let c = synthesize(&s, d, dt, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
        assert_eq!(a.seed(), Some(11));
    }

    #[test]
    fn coverage_error_lists_missing_bins() {
        let s = flat(1.0, 1.0, 10.0);
        // bins start at 2π/duration = 0.1 < 1.0
        match synthesize(&s, 2.0 * PI / 0.1, PI / 10.0, 0) {
            Err(Error::Coverage { missing, first_missing }) => {
                assert_eq!(missing[0], 1);
                assert_eq!(missing.len(), 9);
                assert!((first_missing - 0.1).abs() < 1e-12);
            }
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_one_sided_input() {
        let g = FrequencyGrid::log_spaced(0.1, 10.0, 8).unwrap();
        let s = Spectrum::new(g, vec![1.0; 8], Sidedness::OneSidedVacuum).unwrap();
        assert!(synthesize(&s, 2.0 * PI / 0.1, PI / 10.0, 0).is_err());
        assert!(synthesize(&s.symmetrize(), 2.0 * PI / 0.1, PI / 10.0, 0).is_ok());
    }

    #[test]
    fn white_noise_variance_matches_parseval() {
        let n = 1usize << 16;
        let dt = 1e-3;
        let c = 2.5e-4;
        let s = flat(c, bin_frequency(1, n, dt), PI / dt);
        let ts = synthesize(&s, n as f64 * dt, dt, 99).unwrap();
        // ∫ dω/2π C over (−π/dt, π/dt) = C/dt
        let expected = c / dt;
        assert!((ts.variance() / expected - 1.0).abs() < 0.05, "{}", ts.variance() / expected);
        let sigma = expected.sqrt();
        assert!(ts.mean().abs() < 5.0 * sigma / (n as f64).sqrt());
    }

    #[test]
    fn sinusoid_integrated_power() {
        let n = 4096;
        let dt = 0.01;
        let k = 256; // bin centre of a 1024-sample segment: 64 · 4
        let amp = 3.0;
        let w = bin_frequency(k, n, dt);
        let samples = (0..n).map(|i| amp * (w * i as f64 * dt).cos()).collect();
        let ts = TimeSeries::new(samples, dt).unwrap();
        let p = periodogram(&ts, 7).unwrap();
        let dw = p.spectrum.grid().omegas()[0];
        // one-sided integral: 2 Σ C_sym Δω/2π
        let power: f64 = 2.0 * p.spectrum.values().iter().sum::<f64>() * dw / (2.0 * PI);
        assert!((power / (amp * amp / 2.0) - 1.0).abs() < 0.01, "{power}");
        let peak = p
            .spectrum
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((p.spectrum.grid().omegas()[peak] / w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series_flags_dc() {
        let ts = TimeSeries::new(vec![4.2; 512], 1.0).unwrap();
        let p = periodogram(&ts, 4).unwrap();
        assert!(p.meta.dc_removed);
        assert!((p.meta.dc_power - 4.2 * 4.2).abs() < 1e-9);
        assert!(p.spectrum.values().iter().all(|&v| v < 1e-20));
    }

    #[test]
    fn too_short_series() {
        let ts = TimeSeries::new(vec![1.0; 10], 1.0).unwrap();
        assert!(matches!(periodogram(&ts, 6), Err(Error::TooShort { .. })));
        assert!(TimeSeries::new(vec![1.0], 1.0).is_err());
    }

    #[test]
    fn raw_periodogram_recovers_bin_aligned_tone() {
        let n = 256;
        let dt = 0.5;
        let w = bin_frequency(10, n, dt);
        let samples = (0..n).map(|i| (w * i as f64 * dt).sin()).collect();
        let ts = TimeSeries::new(samples, dt).unwrap();
        let p = periodogram_with(&ts, &WelchOptions::raw()).unwrap();
        let v = p.spectrum.values();
        // all power in bin 10 (index 9); C_sym = dt N |a|²/4
        assert!((v[9] - dt * n as f64 / 4.0).abs() < 1e-9);
        assert!(v.iter().enumerate().all(|(i, &x)| i == 9 || x < 1e-20));
    }

    #[test]
    fn log_log_fit_recovers_power_law() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.5)).collect();
        let (s, b) = log_log_fit(&x, &y).unwrap();
        assert!((s + 1.5).abs() < 1e-12);
        assert!((b.exp() - 3.0).abs() < 1e-12);
        assert!(log_log_fit(&[1.0], &[1.0]).is_none());
    }
}
