//! Physical constants and the Planck scales derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// CODATA 2018 reduced Planck constant (J·s).
pub const CODATA_HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s), exact.
pub const CODATA_C: f64 = 299_792_458.0;
/// CODATA 2018 Newtonian constant of gravitation (m³·kg⁻¹·s⁻²).
pub const CODATA_G: f64 = 6.674_30e-11;

/// ℏ, c and G, with the Planck length and mass derived from them at
/// construction time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T = f64> {
    hbar: T,
    c: T,
    g: T,
    planck_length: T,
    planck_mass: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn new(hbar: T, c: T, g: T) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("c", c), ("G", g)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        let planck_length = (hbar * g / (c * c * c)).sqrt();
        let planck_mass = (hbar * c / g).sqrt();
        Ok(Self {
            hbar,
            c,
            g,
            planck_length,
            planck_mass,
        })
    }

    pub fn codata() -> Self {
        Self::new(T::lit(CODATA_HBAR), T::lit(CODATA_C), T::lit(CODATA_G))
            .expect("CODATA constants are positive")
    }

    /// ℏ = c = G = 1, convenient for tests with round numbers.
    pub fn unit() -> Self {
        Self::new(T::one(), T::one(), T::one()).expect("unit constants are positive")
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn g(&self) -> T {
        self.g
    }

    /// l_p = sqrt(ℏG/c³).
    pub fn planck_length(&self) -> T {
        self.planck_length
    }

    /// m_p = sqrt(ℏc/G).
    pub fn planck_mass(&self) -> T {
        self.planck_mass
    }

    /// Reduced Compton wavelength ℏ/(mc).
    pub fn compton_wavelength(&self, mass: T) -> Result<T> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::Domain(format!("mass must be finite and > 0, got {mass}")));
        }
        Ok(self.hbar / (mass * self.c))
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata()
    }
}

/// Free-function form of [`PhysicalConstants::compton_wavelength`].
pub fn compton_wavelength<T: Scalar>(mass: T, constants: &PhysicalConstants<T>) -> Result<T> {
    constants.compton_wavelength(mass)
}
