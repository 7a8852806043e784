use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Source of the mirror's friction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping<T = f64> {
    /// Frequency-independent γ (rad/s).
    Fixed(T),
    /// γ(ω) = αℏω²/(mc²) supplied by the vacuum motional force.
    Vacuum { alpha: T },
}

/// A mirror of mass `mass` bound at `omega0` (0 for a free mirror).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorParams<T = f64> {
    mass: T,
    omega0: T,
    damping: Damping<T>,
}

impl<T: Scalar> MirrorParams<T> {
    pub fn new(mass: T, omega0: T, damping: Damping<T>) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::Domain(format!("mass must be finite and > 0, got {mass}")));
        }
        if !(omega0 >= T::zero()) || !omega0.is_finite() {
            return Err(Error::Domain(format!("omega0 must be finite and >= 0, got {omega0}")));
        }
        match damping {
            Damping::Fixed(g) if !(g >= T::zero()) || !g.is_finite() => {
                return Err(Error::Domain(format!("gamma must be finite and >= 0, got {g}")));
            }
            Damping::Vacuum { alpha } if !(alpha > T::zero()) || !alpha.is_finite() => {
                return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
            }
            _ => {}
        }
        Ok(Self {
            mass,
            omega0,
            damping,
        })
    }

    pub fn free(mass: T, gamma: T) -> Result<Self> {
        Self::new(mass, T::zero(), Damping::Fixed(gamma))
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    pub fn damping(&self) -> Damping<T> {
        self.damping
    }

    /// γ when fixed; `None` in vacuum-coupled mode.
    pub fn fixed_gamma(&self) -> Option<T> {
        match self.damping {
            Damping::Fixed(g) => Some(g),
            Damping::Vacuum { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MirrorParams::new(0.0, 0.0, Damping::Fixed(0.0)).is_err());
        assert!(MirrorParams::new(1.0, -1.0, Damping::Fixed(0.0)).is_err());
        assert!(MirrorParams::new(1.0, 0.0, Damping::Fixed(-0.1)).is_err());
        assert!(MirrorParams::new(1.0, 0.0, Damping::Vacuum { alpha: 0.0 }).is_err());
        let p = MirrorParams::new(1.0, 2.0, Damping::Vacuum { alpha: 1.0 }).unwrap();
        assert_eq!(p.fixed_gamma(), None);
        assert_eq!(MirrorParams::free(1.0, 0.5).unwrap().fixed_gamma(), Some(0.5));
    }
}
