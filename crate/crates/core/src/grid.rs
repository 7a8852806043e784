use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Strictly increasing, strictly positive angular frequencies (rad/s).
///
/// ω = 0 is never representable: the vacuum spectra diverge as 1/ω there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>", bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct FrequencyGrid<T = f64> {
    omegas: Vec<T>,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(omegas: Vec<T>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        for (i, &w) in omegas.iter().enumerate() {
            if !w.is_finite() || w <= T::zero() {
                return Err(Error::InvalidGrid(format!(
                    "omega[{i}] = {w} is not a finite positive frequency"
                )));
            }
            if i > 0 && w <= omegas[i - 1] {
                return Err(Error::InvalidGrid(format!(
                    "omega[{i}] = {w} does not exceed omega[{}] = {}",
                    i - 1,
                    omegas[i - 1]
                )));
            }
        }
        Ok(Self { omegas })
    }

    /// `points` log-spaced frequencies from `min` to `max` inclusive.
    pub fn log_spaced(min: T, max: T, points: usize) -> Result<Self> {
        Self::check_bounds(min, max, points)?;
        if points == 1 {
            return Self::new(vec![min]);
        }
        let (lmin, lmax) = (min.ln(), max.ln());
        let step = (lmax - lmin) / T::lit((points - 1) as f64);
        let mut omegas: Vec<T> = (0..points)
            .map(|i| (lmin + step * T::lit(i as f64)).exp())
            .collect();
        omegas[0] = min;
        omegas[points - 1] = max;
        Self::new(omegas)
    }

    pub fn linear(min: T, max: T, points: usize) -> Result<Self> {
        Self::check_bounds(min, max, points)?;
        if points == 1 {
            return Self::new(vec![min]);
        }
        let step = (max - min) / T::lit((points - 1) as f64);
        let mut omegas: Vec<T> = (0..points).map(|i| min + step * T::lit(i as f64)).collect();
        omegas[points - 1] = max;
        Self::new(omegas)
    }

    fn check_bounds(min: T, max: T, points: usize) -> Result<()> {
        if points == 0 {
            return Err(Error::InvalidGrid("points must be at least 1".into()));
        }
        if !(min > T::zero()) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!("bounds must be finite and > 0 ({min}, {max})")));
        }
        if points > 1 && max <= min {
            return Err(Error::InvalidGrid(format!("omega_max {max} must exceed omega_min {min}")));
        }
        Ok(())
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn min(&self) -> T {
        self.omegas[0]
    }

    pub fn max(&self) -> T {
        self.omegas[self.omegas.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.omegas.iter().copied()
    }

    pub(crate) fn ensure_same(&self, other: &Self, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {} vs {} points",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for FrequencyGrid<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T> From<FrequencyGrid<T>> for Vec<T> {
    fn from(g: FrequencyGrid<T>) -> Self {
        g.omegas
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_negative_and_unsorted() {
        assert!(FrequencyGrid::new(vec![0.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![-1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![2.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::<f64>::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = FrequencyGrid::<f64>::log_spaced(1e-2, 1e3, 51).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g.min(), 1e-2);
        assert_eq!(g.max(), 1e3);
        let r0 = g.omegas()[1] / g.omegas()[0];
        let r1 = g.omegas()[40] / g.omegas()[39];
        assert!((r0 - r1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_specs() {
        assert!(FrequencyGrid::<f64>::log_spaced(1.0, 10.0, 0).is_err());
        assert!(FrequencyGrid::<f64>::linear(0.0, 10.0, 5).is_err());
        assert!(FrequencyGrid::<f64>::linear(10.0, 1.0, 5).is_err());
        assert_eq!(FrequencyGrid::<f64>::linear(3.0, 3.0, 1).unwrap().len(), 1);
    }
}
