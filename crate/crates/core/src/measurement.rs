//! Probe-field added noise, the standard and ultimate quantum limits, and the
//! per-frequency choice of squeezed probe quadratures.
//!
//! Quadrature covariances are normalized so the coherent state is
//! (S_φφ, S_II, S_φI) = (1, 1, 0) and the Heisenberg floor reads
//! S_φφ·S_II − S_φI² ≥ 1. With A = 1/(2K0) and B = 2ℏK0·χ_qq the added noise is
//!
//! C = A²S_φφ + |B|²S_II + 2A·Re(B)·S_φI = tr(S·M),
//! M = [[A², A·Re B], [A·Re B, |B|²]],
//!
//! so minimizing over det-saturating S with eigenvalues (t, 1/t) gives
//! t·μ₂ + μ₁/t for the eigenvalues μ₁ ≥ μ₂ of M. The unconstrained optimum
//! t = √(μ₁/μ₂) reaches 2√det M = 2A|Im B| = 2ℏ|Im χ_qq|; the coherent state
//! optimized over K0 reaches 2A|B| = 2ℏ|χ_qq|.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::response::ComplexResponse;
use crate::scalar::Scalar;
use crate::spectrum::{Sidedness, Spectrum};

/// φ = 2K0·q.
pub fn phase_estimator<T: Scalar>(displacement: T, k0: T) -> T {
    T::lit(2.0) * k0 * displacement
}

/// q = φ/(2K0).
pub fn displacement_from_phase<T: Scalar>(phase: T, k0: T) -> T {
    phase / (T::lit(2.0) * k0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams<T = f64> {
    k0: T,
    hbar: T,
}

impl<T: Scalar> ProbeParams<T> {
    pub fn new(k0: T, hbar: T) -> Result<Self> {
        if !(k0 > T::zero()) || !k0.is_finite() {
            return Err(Error::Domain(format!("K0 must be finite and > 0, got {k0}")));
        }
        if !(hbar > T::zero()) {
            return Err(Error::Domain(format!("hbar must be > 0, got {hbar}")));
        }
        Ok(Self { k0, hbar })
    }

    pub fn k0(&self) -> T {
        self.k0
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Phase-noise coefficient A = 1/(2K0).
    pub fn phase_coefficient(&self) -> T {
        T::one() / (T::lit(2.0) * self.k0)
    }

    /// Back-action coefficient B = 2ℏK0·χ_qq.
    pub fn backaction_coefficient(&self, chi: Complex<T>) -> Complex<T> {
        chi * (T::lit(2.0) * self.hbar * self.k0)
    }

    /// Radiation-pressure force F = 2ℏK0·I for photon flux I.
    pub fn radiation_force(&self, intensity: T) -> T {
        T::lit(2.0) * self.hbar * self.k0 * intensity
    }
}

/// K0 that balances phase and back-action noise, A = |B|, at one frequency.
pub fn balanced_k0<T: Scalar>(chi: Complex<T>, hbar: T) -> Result<T> {
    let modulus = chi.norm();
    if !(modulus > T::zero()) || !modulus.is_finite() {
        return Err(Error::Domain(format!("|chi| must be finite and > 0, got {modulus}")));
    }
    Ok(T::one() / (T::lit(4.0) * hbar * modulus).sqrt())
}

/// One frequency's normalized phase/intensity covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratures<T = f64> {
    pub s_pp: T,
    pub s_ii: T,
    pub s_pi: T,
}

impl<T: Scalar> Quadratures<T> {
    pub fn coherent() -> Self {
        Self {
            s_pp: T::one(),
            s_ii: T::one(),
            s_pi: T::zero(),
        }
    }

    pub fn det(&self) -> T {
        self.s_pp * self.s_ii - self.s_pi * self.s_pi
    }

    /// (λ_max, λ_min).
    pub fn eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mean = half * (self.s_pp + self.s_ii);
        let diff = half * (self.s_pp - self.s_ii);
        let rad = (diff * diff + self.s_pi * self.s_pi).sqrt();
        let hi = mean + rad;
        (hi, self.det() / hi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_pp > T::zero()) || !(self.s_ii > T::zero()) {
            return Err(Error::Domain(format!(
                "S_pp and S_ii must be > 0 (got {}, {})",
                self.s_pp, self.s_ii
            )));
        }
        let det = self.det();
        let slack = T::lit(64.0) * T::epsilon() * (self.s_pp * self.s_ii);
        if det < T::one() - slack {
            return Err(Error::Domain(format!("determinant {det} below the Heisenberg floor 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCovariance<T = f64> {
    grid: FrequencyGrid<T>,
    entries: Vec<Quadratures<T>>,
}

impl<T: Scalar> QuadratureCovariance<T> {
    pub fn new(grid: FrequencyGrid<T>, entries: Vec<Quadratures<T>>) -> Result<Self> {
        if entries.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} covariance entries for {} grid points",
                entries.len(),
                grid.len()
            )));
        }
        for q in &entries {
            q.validate()?;
        }
        Ok(Self { grid, entries })
    }

    pub fn coherent(grid: FrequencyGrid<T>) -> Self {
        let entries = vec![Quadratures::coherent(); grid.len()];
        Self { grid, entries }
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn entries(&self) -> &[Quadratures<T>] {
        &self.entries
    }
}

/// A²S_φφ + |B|²S_II + 2A·Re(B)·S_φI.
pub fn added_noise<T: Scalar>(a: T, b: Complex<T>, q: &Quadratures<T>) -> T {
    a * a * q.s_pp + b.norm_sqr() * q.s_ii + T::lit(2.0) * a * b.re * q.s_pi
}

/// Spectrum of the probe-added position noise q_n = δφ/(2K0) + χ_qq·2ℏK0·δI.
pub fn added_noise_spectrum<T: Scalar>(
    chi_qq: &ComplexResponse<T>,
    probe: &ProbeParams<T>,
    cov: &QuadratureCovariance<T>,
) -> Result<Spectrum<T>> {
    chi_qq.grid().ensure_same(cov.grid(), "added noise")?;
    let a = probe.phase_coefficient();
    let values = chi_qq
        .values()
        .iter()
        .zip(cov.entries())
        .map(|(&chi, q)| added_noise(a, probe.backaction_coefficient(chi), q).max(T::zero()))
        .collect();
    Spectrum::new(chi_qq.grid().clone(), values, Sidedness::Symmetrized)
}

/// A lower bound on the added noise, with its spectral energy density
/// (1/2)mω²C alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBound<T = f64> {
    pub spectrum: Spectrum<T>,
    pub energy_density: Vec<T>,
}

fn bound_from<T: Scalar>(
    chi_qq: &ComplexResponse<T>,
    mass: T,
    hbar: T,
    f: impl Fn(Complex<T>) -> T,
) -> Result<NoiseBound<T>> {
    if !(mass > T::zero()) {
        return Err(Error::Domain(format!("mass must be > 0, got {mass}")));
    }
    let two_hbar = T::lit(2.0) * hbar;
    let values: Vec<T> = chi_qq.values().iter().map(|&z| two_hbar * f(z)).collect();
    let half_m = T::lit(0.5) * mass;
    let energy_density = chi_qq
        .grid()
        .iter()
        .zip(&values)
        .map(|(w, &c)| half_m * w * w * c)
        .collect();
    Ok(NoiseBound {
        spectrum: Spectrum::new(chi_qq.grid().clone(), values, Sidedness::Symmetrized)?,
        energy_density,
    })
}

/// Standard quantum limit C_SQL = 2ℏ|χ_qq|.
pub fn sql_bound<T: Scalar>(chi_qq: &ComplexResponse<T>, mass: T, hbar: T) -> Result<NoiseBound<T>> {
    bound_from(chi_qq, mass, hbar, |z| z.norm())
}

/// Ultimate quantum limit C_UQL = 2ℏ|Im χ_qq|.
pub fn uql_bound<T: Scalar>(chi_qq: &ComplexResponse<T>, mass: T, hbar: T) -> Result<NoiseBound<T>> {
    bound_from(chi_qq, mass, hbar, |z| z.im.abs())
}

/// Δq²_SQL = ℏτ/m.
pub fn sql_variance<T: Scalar>(mass: T, tau: T, hbar: T) -> Result<T> {
    if !(mass > T::zero()) || !(tau > T::zero()) {
        return Err(Error::Domain(format!("mass and tau must be > 0 (got {mass}, {tau})")));
    }
    Ok(hbar * tau / mass)
}

/// τ = Δω/ω² for detection bandwidth Δω at frequency ω.
pub fn measurement_time<T: Scalar>(bandwidth: T, omega: T) -> Result<T> {
    if !(bandwidth > T::zero()) || !(omega > T::zero()) {
        return Err(Error::Domain(format!(
            "bandwidth and omega must be > 0 (got {bandwidth}, {omega})"
        )));
    }
    Ok(bandwidth / (omega * omega))
}

/// Optimal probe covariance at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptimum<T = f64> {
    /// `None` only when the infimum is not attained (Im B = 0 with no cap).
    pub quadratures: Option<Quadratures<T>>,
    pub achieved: T,
    /// Larger covariance eigenvalue; the eigenvalue ratio is its square.
    pub squeeze_factor: T,
    /// The squeezing cap, not the interior optimum, set the result.
    pub capped: bool,
    /// Im B = 0: no correlated strategy beats the cap.
    pub degenerate: bool,
}

/// Minimize the added noise over det ≥ 1 covariances whose eigenvalue ratio
/// is at most e^{2 r_max}.
pub fn optimize_quadratures<T: Scalar>(a: T, b: Complex<T>, r_max: T) -> Result<QuadratureOptimum<T>> {
    if !(r_max >= T::zero()) {
        return Err(Error::Domain(format!("r_max must be >= 0, got {r_max}")));
    }
    if !(a > T::zero()) || !a.is_finite() || !b.re.is_finite() || !b.im.is_finite() {
        return Err(Error::Domain("noise coefficients must be finite with A > 0".into()));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (m11, m12, m22) = (a * a, a * b.re, b.norm_sqr());
    let det_m = (a * b.im) * (a * b.im);
    let half_tr = half * (m11 + m22);
    let diff = half * (m11 - m22);
    let mu1 = half_tr + (diff * diff + m12 * m12).sqrt();
    let mu2 = if mu1 > T::zero() { det_m / mu1 } else { T::zero() };
    let degenerate = b.im == T::zero();
    let cap = r_max.exp();

    if r_max == T::zero() {
        let q = Quadratures::coherent();
        return Ok(QuadratureOptimum {
            quadratures: Some(q),
            achieved: m11 + m22,
            squeeze_factor: T::one(),
            capped: mu1 > mu2,
            degenerate,
        });
    }

    let t_star = if degenerate { T::infinity() } else { (mu1 / mu2).sqrt() };
    if !degenerate && t_star <= cap {
        // interior optimum in closed form
        let im = b.im.abs();
        let q = Quadratures {
            s_pp: m22 / (a * im),
            s_ii: a / im,
            s_pi: -b.re / im,
        };
        return Ok(QuadratureOptimum {
            quadratures: Some(q),
            achieved: two * a * im,
            squeeze_factor: t_star,
            capped: false,
            degenerate: false,
        });
    }
    if !cap.is_finite() {
        return Ok(QuadratureOptimum {
            quadratures: None,
            achieved: T::zero(),
            squeeze_factor: T::infinity(),
            capped: false,
            degenerate: true,
        });
    }

    // Squeeze the direction of M's small eigenvalue by the full cap.
    let t = cap;
    let v1 = (m12, mu2 - m11);
    let v2 = (mu2 - m22, m12);
    let n1 = v1.0 * v1.0 + v1.1 * v1.1;
    let n2 = v2.0 * v2.0 + v2.1 * v2.1;
    let (ex, ey) = if n1 >= n2 { v1 } else { v2 };
    let norm = (ex * ex + ey * ey).sqrt();
    let (ex, ey) = if norm > T::zero() {
        (ex / norm, ey / norm)
    } else {
        (T::zero(), T::one())
    };
    // e2 = (ex, ey) gets eigenvalue t, its normal gets 1/t
    let inv_t = T::one() / t;
    let q = Quadratures {
        s_pp: t * ex * ex + inv_t * ey * ey,
        s_ii: t * ey * ey + inv_t * ex * ex,
        s_pi: (t - inv_t) * ex * ey,
    };
    Ok(QuadratureOptimum {
        quadratures: Some(q),
        achieved: t * mu2 + mu1 * inv_t,
        squeeze_factor: t,
        capped: true,
        degenerate,
    })
}

/// How K0 is chosen per frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeTuning<T = f64> {
    Fixed(T),
    /// A = |B| at every frequency, the coherent-state optimum.
    Balanced,
}

/// Per-frequency optimal probe covariances and the noise they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<T = f64> {
    pub r_max: T,
    pub k0: Vec<T>,
    pub points: Vec<QuadratureOptimum<T>>,
    pub achieved: Spectrum<T>,
    pub degenerate: Vec<usize>,
}

impl<T: Scalar> Strategy<T> {
    pub fn grid(&self) -> &FrequencyGrid<T> {
        self.achieved.grid()
    }
}

pub fn optimize_strategy<T: Scalar>(
    chi_qq: &ComplexResponse<T>,
    probe: &ProbeParams<T>,
    r_max: T,
) -> Result<Strategy<T>> {
    optimize_strategy_tuned(chi_qq, probe.hbar(), ProbeTuning::Fixed(probe.k0()), r_max)
}

pub fn optimize_strategy_tuned<T: Scalar>(
    chi_qq: &ComplexResponse<T>,
    hbar: T,
    tuning: ProbeTuning<T>,
    r_max: T,
) -> Result<Strategy<T>> {
    let per_point: Vec<Result<(T, QuadratureOptimum<T>)>> = chi_qq
        .values()
        .par_iter()
        .map(|&chi| {
            let k0 = match tuning {
                ProbeTuning::Fixed(k0) => k0,
                ProbeTuning::Balanced => balanced_k0(chi, hbar)?,
            };
            let probe = ProbeParams::new(k0, hbar)?;
            let opt = optimize_quadratures(
                probe.phase_coefficient(),
                probe.backaction_coefficient(chi),
                r_max,
            )?;
            Ok((k0, opt))
        })
        .collect();
    let mut k0 = Vec::with_capacity(per_point.len());
    let mut points = Vec::with_capacity(per_point.len());
    for r in per_point {
        let (k, p) = r?;
        k0.push(k);
        points.push(p);
    }
    let degenerate = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.degenerate)
        .map(|(i, _)| i)
        .collect();
    let achieved = Spectrum::new(
        chi_qq.grid().clone(),
        points.iter().map(|p| p.achieved).collect(),
        Sidedness::Symmetrized,
    )?;
    Ok(Strategy {
        r_max,
        k0,
        points,
        achieved,
        degenerate,
    })
}
