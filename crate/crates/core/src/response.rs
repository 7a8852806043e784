//! Linear-response susceptibilities and the fluctuation–dissipation checks
//! that tie them to vacuum spectra.
//!
//! Fourier convention: f(t) = ∫ dω/2π e^{−iωt} f[ω]. Causal responses are
//! analytic in the upper half-plane, so poles sit at Im ω < 0. Only ω > 0 is
//! stored; χ[−ω] = χ[ω]*.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::mirror::{Damping, MirrorParams};
use crate::scalar::Scalar;
use crate::spectrum::{Sidedness, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    MechanicalBound,
    VacuumMotional,
    Dressed,
    Custom,
}

/// Closed-form description of a response, kept alongside the samples so it
/// can be re-evaluated off-grid (the dispersion check needs this).
#[derive(Debug, Clone, PartialEq)]
pub enum ResponseModel<T = f64> {
    /// 1 / (m(ω0² − ω² − iγω))
    Mechanical { mass: T, omega0: T, gamma: T },
    /// iαℏω³/c²
    VacuumMotional { alpha: T, hbar: T, c: T },
    /// 1 / (m(ω0² − ω²) − χ_FF[ω])
    Dressed {
        mass: T,
        omega0: T,
        force: Box<ResponseModel<T>>,
    },
    /// Samples only.
    Custom,
}

impl<T: Scalar> ResponseModel<T> {
    pub fn tag(&self) -> ModelTag {
        match self {
            Self::Mechanical { .. } => ModelTag::MechanicalBound,
            Self::VacuumMotional { .. } => ModelTag::VacuumMotional,
            Self::Dressed { .. } => ModelTag::Dressed,
            Self::Custom => ModelTag::Custom,
        }
    }

    /// Evaluate at a real frequency. `None` for sample-only models; a zero
    /// denominator yields an infinite value.
    pub fn eval(&self, omega: T) -> Option<Complex<T>> {
        match self {
            Self::Mechanical {
                mass,
                omega0,
                gamma,
            } => {
                let den = Complex::new(*mass * (*omega0 * *omega0 - omega * omega), -*mass * *gamma * omega);
                Some(invert(den).unwrap_or(Complex::new(T::infinity(), T::zero())))
            }
            Self::VacuumMotional { alpha, hbar, c } => Some(Complex::new(
                T::zero(),
                *alpha * *hbar * omega * omega * omega / (*c * *c),
            )),
            Self::Dressed {
                mass,
                omega0,
                force,
            } => {
                let f = force.eval(omega)?;
                let den = Complex::new(*mass * (*omega0 * *omega0 - omega * omega), T::zero()) - f;
                Some(invert(den).unwrap_or(Complex::new(T::infinity(), T::zero())))
            }
            Self::Custom => None,
        }
    }
}

fn invert<T: Scalar>(z: Complex<T>) -> Option<Complex<T>> {
    if z.re == T::zero() && z.im == T::zero() {
        None
    } else {
        Some(z.inv())
    }
}

/// A susceptibility sampled on a positive frequency grid.
///
/// Points where the closed form has an undamped pole are flagged in
/// [`singular_points`](Self::singular_points) and stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse<T = f64> {
    grid: FrequencyGrid<T>,
    values: Vec<Complex<T>>,
    model: ResponseModel<T>,
    singular: Vec<usize>,
}

impl<T: Scalar> ComplexResponse<T> {
    /// Wrap arbitrary samples as a custom response.
    pub fn from_samples(grid: FrequencyGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("response samples must be finite".into()));
        }
        Ok(Self {
            grid,
            values,
            model: ResponseModel::Custom,
            singular: Vec::new(),
        })
    }

    fn from_model(grid: &FrequencyGrid<T>, model: ResponseModel<T>) -> Self {
        let mut singular = Vec::new();
        let values = grid
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let z = model.eval(w).expect("analytic model");
                if z.re.is_finite() && z.im.is_finite() {
                    z
                } else {
                    singular.push(i);
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
            model,
            singular,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn model(&self) -> &ResponseModel<T> {
        &self.model
    }

    pub fn tag(&self) -> ModelTag {
        self.model.tag()
    }

    /// Indices where the response diverges (undamped resonance).
    pub fn singular_points(&self) -> &[usize] {
        &self.singular
    }

    pub fn is_singular(&self, i: usize) -> bool {
        self.singular.binary_search(&i).is_ok()
    }

    /// χ[−ω_i] = χ[ω_i]*.
    pub fn at_negative(&self, i: usize) -> Complex<T> {
        self.values[i].conj()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// χ_qq[ω] = 1/(m(ω0² − ω² − iγω)) for a mirror with fixed friction.
pub fn mech_susceptibility<T: Scalar>(
    p: &MirrorParams<T>,
    grid: &FrequencyGrid<T>,
) -> Result<ComplexResponse<T>> {
    let gamma = p.fixed_gamma().ok_or_else(|| {
        Error::Config(
            "mirror damping is vacuum-derived; use dressed_susceptibility with a motional response"
                .into(),
        )
    })?;
    Ok(ComplexResponse::from_model(
        grid,
        ResponseModel::Mechanical {
            mass: p.mass(),
            omega0: p.omega0(),
            gamma,
        },
    ))
}

/// χ_FF[ω] = iαℏω³/c², the motional force of vacuum radiation pressure.
pub fn vacuum_motional_susceptibility<T: Scalar>(
    alpha: T,
    grid: &FrequencyGrid<T>,
    constants: &PhysicalConstants<T>,
) -> Result<ComplexResponse<T>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
    }
    Ok(ComplexResponse::from_model(
        grid,
        ResponseModel::VacuumMotional {
            alpha,
            hbar: constants.hbar(),
            c: constants.c(),
        },
    ))
}

/// γ/ω = αℏω/(mc²) for the vacuum-induced friction.
pub fn gamma_over_omega<T: Scalar>(alpha: T, mass: T, omega: T, constants: &PhysicalConstants<T>) -> T {
    alpha * constants.hbar() * omega / (mass * constants.c() * constants.c())
}

/// χ_qq[ω] = 1/(m(ω0² − ω²) − χ_FF[ω]). Only the mass and ω0 of `p` are used.
pub fn dressed_susceptibility<T: Scalar>(
    p: &MirrorParams<T>,
    chi_ff: &ComplexResponse<T>,
) -> Result<ComplexResponse<T>> {
    let (m, w0) = (p.mass(), p.omega0());
    match &chi_ff.model {
        ResponseModel::Custom => {
            let mut singular = Vec::new();
            let values = chi_ff
                .grid
                .iter()
                .zip(&chi_ff.values)
                .enumerate()
                .map(|(i, (w, &f))| {
                    let den = Complex::new(m * (w0 * w0 - w * w), T::zero()) - f;
                    invert(den).unwrap_or_else(|| {
                        singular.push(i);
                        Complex::new(T::zero(), T::zero())
                    })
                })
                .collect();
            Ok(ComplexResponse {
                grid: chi_ff.grid.clone(),
                values,
                model: ResponseModel::Custom,
                singular,
            })
        }
        force => Ok(ComplexResponse::from_model(
            &chi_ff.grid,
            ResponseModel::Dressed {
                mass: m,
                omega0: w0,
                force: Box::new(force.clone()),
            },
        )),
    }
}

/// Mechanical response of `p`, dressing it with the vacuum motional force when
/// its damping is vacuum-derived.
pub fn mirror_susceptibility<T: Scalar>(
    p: &MirrorParams<T>,
    grid: &FrequencyGrid<T>,
    constants: &PhysicalConstants<T>,
) -> Result<ComplexResponse<T>> {
    match p.damping() {
        Damping::Fixed(_) => mech_susceptibility(p, grid),
        Damping::Vacuum { alpha } => {
            let chi_ff = vacuum_motional_susceptibility(alpha, grid, constants)?;
            dressed_susceptibility(p, &chi_ff)
        }
    }
}

/// Poles of the fixed-friction mechanical response, roots of ω² + iγω − ω0² = 0.
pub fn mech_poles<T: Scalar>(omega0: T, gamma: T) -> [Complex<T>; 2] {
    let half = T::lit(0.5);
    let disc = Complex::new(T::lit(4.0) * omega0 * omega0 - gamma * gamma, T::zero()).sqrt();
    let centre = Complex::new(T::zero(), -gamma);
    [(centre + disc) * half, (centre - disc) * half]
}

/// Zero-temperature spectrum C[ω] = 2ℏθ(ω) Im χ[ω].
pub fn vacuum_spectrum_from_response<T: Scalar>(chi: &ComplexResponse<T>, hbar: T) -> Result<Spectrum<T>> {
    let two_hbar = T::lit(2.0) * hbar;
    let mut values = Vec::with_capacity(chi.len());
    for (w, z) in chi.grid.iter().zip(&chi.values) {
        if z.im < T::zero() {
            return Err(Error::NegativeDissipation {
                omega: w.as_f64(),
                im: z.im.as_f64(),
            });
        }
        values.push(two_hbar * z.im);
    }
    Spectrum::new(chi.grid.clone(), values, Sidedness::OneSidedVacuum)
}

/// Vacuum position noise of a (nearly) free mirror dressed by vacuum
/// radiation pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumPositionNoise<T = f64> {
    /// 2ℏ Im χ_qq of the dressed mirror.
    pub exact: Spectrum<T>,
    /// Leading order in γ/ω: `prefactor`·λ_c²·θ(ω)/ω.
    pub leading_order: Spectrum<T>,
    /// Numeric prefactor of the leading-order law, 2α.
    pub prefactor: T,
    pub compton_wavelength: T,
    /// Largest γ/ω = αℏω/(mc²) on the grid.
    pub max_gamma_over_omega: T,
    /// Set when ω0 is not negligible against the lowest grid frequency.
    pub regime_warning: bool,
}

/// Position noise (1/2)mω²C_qq ≃ ℏθ(ω)γ/ω of a mirror in vacuum.
///
/// With γ/ω = αℏω/(mc²) the leading-order form is C_qq ≃ 2αλ_c²θ(ω)/ω; the
/// relative gap to the exact form is (γ/ω)² for a free mirror.
pub fn vacuum_position_spectrum<T: Scalar>(
    p: &MirrorParams<T>,
    alpha: T,
    grid: &FrequencyGrid<T>,
    constants: &PhysicalConstants<T>,
) -> Result<VacuumPositionNoise<T>> {
    let chi_ff = vacuum_motional_susceptibility(alpha, grid, constants)?;
    let chi = dressed_susceptibility(p, &chi_ff)?;
    let lambda_c = constants.compton_wavelength(p.mass())?;
    let scale = lambda_c * lambda_c;
    let exact = vacuum_spectrum_from_response(&chi, constants.hbar())?.with_unit_scale(scale)?;
    let prefactor = T::lit(2.0) * alpha;
    let leading = grid.iter().map(|w| prefactor * scale / w).collect();
    let leading_order =
        Spectrum::new(grid.clone(), leading, Sidedness::OneSidedVacuum)?.with_unit_scale(scale)?;
    Ok(VacuumPositionNoise {
        exact,
        leading_order,
        prefactor,
        compton_wavelength: lambda_c,
        max_gamma_over_omega: gamma_over_omega(alpha, p.mass(), grid.max(), constants),
        regime_warning: p.omega0() > T::lit(1e-3) * grid.min(),
    })
}

/// Outcome of [`check_fdt`]. Residuals are relative and pointwise maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdtReport {
    pub tol: f64,
    pub max_residual_commutator: f64,
    pub worst_commutator_index: usize,
    pub max_residual_zero_temp: f64,
    pub worst_zero_temp_index: usize,
    /// `None` when the response has no closed form or is not square-integrable
    /// along the real axis (see `kk_note`).
    pub kk_residual: Option<f64>,
    pub kk_tol: f64,
    pub kk_note: Option<String>,
    pub passed_commutator: bool,
    pub passed_zero_temp: bool,
    pub passed_kk: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdtOptions {
    pub tol: f64,
    pub kk_tol: f64,
    /// Auxiliary-grid density for the dispersion integral.
    pub kk_points_per_decade: usize,
    pub run_kk: bool,
}

impl Default for FdtOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            kk_tol: 1e-3,
            kk_points_per_decade: 4000,
            run_kk: true,
        }
    }
}

/// Check 2ℏ Im χ = C[ω] − C[−ω], the zero-temperature form C = 2ℏθ(ω) Im χ,
/// and causality of χ through a numerical dispersion relation.
pub fn check_fdt<T: Scalar>(
    c: &Spectrum<T>,
    chi: &ComplexResponse<T>,
    hbar: T,
    tol: f64,
) -> Result<FdtReport> {
    check_fdt_with(
        c,
        chi,
        hbar,
        &FdtOptions {
            tol,
            ..FdtOptions::default()
        },
    )
}

pub fn check_fdt_with<T: Scalar>(
    c: &Spectrum<T>,
    chi: &ComplexResponse<T>,
    hbar: T,
    opts: &FdtOptions,
) -> Result<FdtReport> {
    c.grid().ensure_same(chi.grid(), "fdt check")?;
    let two_hbar = 2.0 * hbar.as_f64();
    let mut comm = (0.0f64, 0usize);
    let mut zero_t = (0.0f64, 0usize);
    for i in 0..c.len() {
        let dissipation = two_hbar * chi.values[i].im.as_f64();
        let pos = c.values()[i].as_f64();
        let neg = c.at_negative(i).as_f64();
        let norm = pos.abs().max(dissipation.abs());
        if norm == 0.0 {
            continue;
        }
        let r_comm = ((pos - neg) - dissipation).abs() / norm;
        let r_zero = (pos - dissipation).abs() / norm;
        if r_comm > comm.0 {
            comm = (r_comm, i);
        }
        if r_zero > zero_t.0 {
            zero_t = (r_zero, i);
        }
    }

    let (kk_residual, kk_note) = if opts.run_kk {
        match dispersion_residual(chi, opts.kk_points_per_decade) {
            Ok(r) => (Some(r), None),
            Err(why) => (None, Some(why)),
        }
    } else {
        (None, Some("dispersion check disabled".into()))
    };
    let passed_commutator = comm.0 < opts.tol;
    let passed_zero_temp = zero_t.0 < opts.tol;
    let passed_kk = kk_residual.map(|r| r < opts.kk_tol);
    Ok(FdtReport {
        tol: opts.tol,
        max_residual_commutator: comm.0,
        worst_commutator_index: comm.1,
        max_residual_zero_temp: zero_t.0,
        worst_zero_temp_index: zero_t.1,
        kk_residual,
        kk_tol: opts.kk_tol,
        kk_note,
        passed_commutator,
        passed_zero_temp,
        passed_kk,
        passed: passed_commutator && passed_zero_temp && passed_kk.unwrap_or(true),
    })
}

/// Re χ rebuilt from Im χ by the principal-value dispersion integral
///
/// Re χ(ω) = (2/π) P∫₀^∞ ω' Im χ(ω') / (ω'² − ω²) dω'
///
/// on a log grid from 1e-3·ω_min to 1e3·ω_max. The pole is subtracted and its
/// principal value added back in closed form.
pub fn reconstruct_real_part<T: Scalar>(
    model: &ResponseModel<T>,
    grid: &FrequencyGrid<T>,
    points_per_decade: usize,
) -> Option<Vec<f64>> {
    let im = |w: f64| model.eval(T::lit(w)).map(|z| z.im.as_f64());
    im(grid.min().as_f64())?;
    let lo = 1e-3 * grid.min().as_f64();
    let hi = 1e3 * grid.max().as_f64();
    let decades = (hi / lo).log10();
    // Simpson needs an even number of intervals
    let mut n = ((decades * points_per_decade as f64).ceil() as usize).max(2);
    n += n % 2;
    let (s0, s1) = (lo.ln(), hi.ln());
    let h = (s1 - s0) / n as f64;
    let aux: Vec<(f64, f64)> = (0..=n)
        .map(|j| {
            let w = (s0 + h * j as f64).exp();
            (w, im(w).unwrap_or(0.0))
        })
        .collect();

    let out = grid
        .omegas()
        .par_iter()
        .map(|&w| {
            let w = w.as_f64();
            let wi = w * im(w).unwrap_or(0.0);
            let integrand = |wp: f64, imp: f64| -> f64 {
                let den = wp * wp - w * w;
                if (wp - w).abs() <= 1e-9 * w {
                    let d = 1e-6 * w;
                    let (a, b) = (w - d, w + d);
                    let fa = (a * im(a).unwrap_or(0.0) - wi) / (a * a - w * w);
                    let fb = (b * im(b).unwrap_or(0.0) - wi) / (b * b - w * w);
                    0.5 * (fa + fb)
                } else {
                    (wp * imp - wi) / den
                }
            };
            let mut acc = 0.0;
            for (j, &(wp, imp)) in aux.iter().enumerate() {
                let weight = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                // dω' = ω' ds
                acc += weight * integrand(wp, imp) * wp;
            }
            let smooth = acc * h / 3.0;
            let pv = ((hi - w) * (w + lo) / ((hi + w) * (w - lo))).ln() / (2.0 * w);
            std::f64::consts::FRAC_2_PI * (smooth + wi * pv)
        })
        .collect();
    Some(out)
}

/// max |Re χ_rebuilt − Re χ| / max |χ| over the grid.
///
/// Errors carry the reason the check does not apply to this response.
pub fn dispersion_residual<T: Scalar>(chi: &ComplexResponse<T>, points_per_decade: usize) -> std::result::Result<f64, String> {
    let log_step = std::f64::consts::LN_10 / points_per_decade as f64;
    match chi.model() {
        ResponseModel::Mechanical { omega0, gamma, .. } => {
            if *omega0 == T::zero() {
                return Err("free mirror: pole on the real axis at omega = 0".into());
            }
            if gamma.as_f64() < 20.0 * log_step * omega0.as_f64() {
                return Err(format!(
                    "linewidth gamma/omega0 = {:.3e} not resolved by {points_per_decade} points/decade",
                    gamma.as_f64() / omega0.as_f64()
                ));
            }
        }
        ResponseModel::VacuumMotional { .. } => {
            return Err("motional susceptibility grows as omega^3; dispersion integral diverges".into())
        }
        ResponseModel::Dressed { .. } => {
            return Err("dressed response linewidth is below any quadrature resolution".into())
        }
        ResponseModel::Custom => return Err("no closed form to evaluate off-grid".into()),
    }
    let re = reconstruct_real_part(chi.model(), chi.grid(), points_per_decade)
        .ok_or_else(|| "model cannot be evaluated".to_string())?;
    let scale = chi
        .values()
        .iter()
        .map(|z| z.norm().as_f64())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err("response vanishes on the grid".into());
    }
    let worst = re
        .iter()
        .zip(chi.values())
        .map(|(r, z)| (r - z.re.as_f64()).abs())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}
