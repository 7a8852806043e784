use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::mirror::MirrorParams;
use crate::scalar::Scalar;
use crate::spectrum::{Sidedness, Spectrum};

/// C_qq[ω] = β l_p²/ω, one-sided, reported in units of l_p².
pub fn gravitational_distance_spectrum<T: Scalar>(
    beta: T,
    planck_length: T,
    grid: &FrequencyGrid<T>,
) -> Result<Spectrum<T>> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
    }
    let lp2 = planck_length * planck_length;
    let values = grid.iter().map(|w| beta * lp2 / w).collect();
    Spectrum::new(grid.clone(), values, Sidedness::OneSidedVacuum)?.with_unit_scale(lp2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Microscopic,
    Macroscopic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport<T = f64> {
    pub regime: Regime,
    /// m equals m_p to within rounding; labelled Macroscopic.
    pub boundary: bool,
    pub mass: T,
    pub planck_mass: T,
    /// λ_c², the prefactor of the radiation-pressure form.
    pub compton_sq: T,
    /// l_p², the prefactor of the metric form.
    pub planck_sq: T,
    /// (λ_c/l_p)² = (m_p/m)².
    pub ratio: T,
}

pub fn classify_regime<T: Scalar>(mass: T, constants: &PhysicalConstants<T>) -> Result<RegimeReport<T>> {
    let lc = constants.compton_wavelength(mass)?;
    let lp = constants.planck_length();
    let ratio = (lc / lp) * (lc / lp);
    let boundary = (ratio - T::one()).abs() <= T::lit(8.0) * T::epsilon();
    let regime = if boundary || ratio < T::one() {
        Regime::Macroscopic
    } else {
        Regime::Microscopic
    };
    Ok(RegimeReport {
        regime,
        boundary,
        mass,
        planck_mass: constants.planck_mass(),
        compton_sq: lc * lc,
        planck_sq: lp * lp,
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedSpectrum<T = f64> {
    pub total: Spectrum<T>,
    /// α λ_c²/ω.
    pub radiation_pressure: Spectrum<T>,
    /// β l_p²/ω.
    pub gravitational: Spectrum<T>,
    pub regime: RegimeReport<T>,
}

/// Sum of the radiation-pressure form αλ_c²/ω and the metric form βl_p²/ω.
pub fn combined_spectrum<T: Scalar>(
    p: &MirrorParams<T>,
    alpha: T,
    beta: T,
    grid: &FrequencyGrid<T>,
    constants: &PhysicalConstants<T>,
) -> Result<CombinedSpectrum<T>> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
    }
    let regime = classify_regime(p.mass(), constants)?;
    let lc2 = regime.compton_sq;
    let rp_values = grid.iter().map(|w| alpha * lc2 / w).collect();
    let radiation_pressure =
        Spectrum::new(grid.clone(), rp_values, Sidedness::OneSidedVacuum)?.with_unit_scale(lc2)?;
    let gravitational = gravitational_distance_spectrum(beta, constants.planck_length(), grid)?;
    let total = radiation_pressure
        .try_add(&gravitational)?
        .with_unit_scale(regime.planck_sq)?;
    Ok(CombinedSpectrum {
        total,
        radiation_pressure,
        gravitational,
        regime,
    })
}

/// Geometric factor of one-way probing over a path of optical length x = ωl/c,
/// for an isotropic background: 2∫(1+μ)² sin²(x(1−μ)/2) dμ over [−1, 1].
///
/// Tends to 8/3 for x → ∞.
pub fn one_way_beta(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // series of the closed form below
        let x2 = x * x;
        return 8.0 * x2 / 15.0 - 16.0 * x2 * x2 / 315.0;
    }
    8.0 / 3.0 - 4.0 / (x * x) + 2.0 * (2.0 * x).sin() / (x * x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirror::Damping;

    #[test]
    fn distance_spectrum_closed_form() {
        let c = PhysicalConstants::<f64>::codata();
        let g = FrequencyGrid::<f64>::log_spaced(1.0, 1e3, 31).unwrap();
        let s = gravitational_distance_spectrum(1.0, c.planck_length(), &g).unwrap();
        assert_eq!(s.sidedness(), Sidedness::OneSidedVacuum);
        assert!((s.scaled_values()[0] - 1.0).abs() < 1e-15);
        assert!((s.values()[0] / 2.6e-70 - 1.0).abs() < 0.01);
        for (w, v) in g.iter().zip(s.scaled_values()) {
            assert!((v * w - 1.0).abs() < 1e-14);
        }
        assert!(gravitational_distance_spectrum(0.0, 1.0, &g).is_err());
    }

    #[test]
    fn regimes() {
        let c = PhysicalConstants::<f64>::codata();
        assert_eq!(classify_regime(1e-3, &c).unwrap().regime, Regime::Macroscopic);
        let r = classify_regime(1e-12, &c).unwrap();
        assert_eq!(r.regime, Regime::Microscopic);
        let mp = c.planck_mass();
        assert!((r.ratio / ((mp / 1e-12) * (mp / 1e-12)) - 1.0).abs() < 1e-12);
        assert!((r.ratio / 4.8e8 - 1.0).abs() < 0.02);
        let b = classify_regime(mp, &c).unwrap();
        assert!(b.boundary);
        assert_eq!(b.regime, Regime::Macroscopic);
    }

    #[test]
    fn addends_equal_at_planck_mass() {
        let c = PhysicalConstants::<f64>::codata();
        let g = FrequencyGrid::<f64>::log_spaced(1.0, 1e4, 17).unwrap();
        let p = MirrorParams::new(c.planck_mass(), 0.0, Damping::Vacuum { alpha: 1.0 }).unwrap();
        let s = combined_spectrum(&p, 0.7, 0.7, &g, &c).unwrap();
        for (a, b) in s.radiation_pressure.values().iter().zip(s.gravitational.values()) {
            assert!((a / b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_limits() {
        assert!((one_way_beta(1.0) - 0.4852).abs() < 1e-3);
        assert!((one_way_beta(10.0) - 2.6285).abs() < 1e-3);
        assert!((one_way_beta(1e4) - 8.0 / 3.0).abs() < 1e-7);
        // series and closed form agree at the switch
        let x: f64 = 1e-2;
        let closed = 8.0 / 3.0 - 4.0 / (x * x) + 2.0 * (2.0 * x).sin() / (x * x * x);
        assert!((one_way_beta(x * 0.999) - closed).abs() < 1e-6);
    }
}
