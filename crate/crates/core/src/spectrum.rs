//! Sampled spectral densities.
//!
//! Only ω > 0 is stored. What the value at −ω is depends on [`Sidedness`]:
//! a one-sided vacuum spectrum vanishes there (the θ(ω) factor), while
//! two-sided and symmetrized spectra stored on a positive grid are taken to be
//! even in ω.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sidedness {
    TwoSided,
    OneSidedVacuum,
    Symmetrized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct Spectrum<T = f64> {
    grid: FrequencyGrid<T>,
    values: Vec<T>,
    sidedness: Sidedness,
    unit_scale: Option<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(grid: FrequencyGrid<T>, values: Vec<T>, sidedness: Sidedness) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= T::zero()) || !v.is_finite())
        {
            return Err(Error::Domain(format!(
                "spectral density must be finite and >= 0; value[{i}] = {v}"
            )));
        }
        Ok(Self {
            grid,
            values,
            sidedness,
            unit_scale: None,
        })
    }

    pub fn zeros(grid: FrequencyGrid<T>, sidedness: Sidedness) -> Self {
        let values = vec![T::zero(); grid.len()];
        Self {
            grid,
            values,
            sidedness,
            unit_scale: None,
        }
    }

    /// Attach a reference area (m²) used when reporting dimensionless ratios.
    pub fn with_unit_scale(mut self, scale: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::Domain(format!("unit scale must be finite and > 0, got {scale}")));
        }
        self.unit_scale = Some(scale);
        Ok(self)
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn unit_scale(&self) -> Option<T> {
        self.unit_scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the mirrored frequency −ω_i.
    pub fn at_negative(&self, i: usize) -> T {
        match self.sidedness {
            Sidedness::OneSidedVacuum => T::zero(),
            Sidedness::TwoSided | Sidedness::Symmetrized => self.values[i],
        }
    }

    /// Values divided by the unit scale, or the raw values if none is set.
    pub fn scaled_values(&self) -> Vec<T> {
        match self.unit_scale {
            Some(s) => self.values.iter().map(|&v| v / s).collect(),
            None => self.values.clone(),
        }
    }

    pub fn map_values(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Self::new(self.grid.clone(), values, self.sidedness)?;
        out.unit_scale = self.unit_scale;
        Ok(out)
    }

    /// Pointwise sum of two spectra on the same grid with the same sidedness.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "spectrum sum")?;
        if self.sidedness != other.sidedness {
            return Err(Error::Domain(format!(
                "cannot add {:?} and {:?} spectra",
                self.sidedness, other.sidedness
            )));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        let mut out = Self::new(self.grid.clone(), values, self.sidedness)?;
        out.unit_scale = self.unit_scale.or(other.unit_scale);
        Ok(out)
    }

    /// C_sym[ω] = (C[ω] + C[−ω]) / 2.
    pub fn symmetrize(&self) -> Self {
        let half = T::lit(0.5);
        let values = (0..self.len())
            .map(|i| match self.sidedness {
                Sidedness::Symmetrized => self.values[i],
                _ => half * (self.values[i] + self.at_negative(i)),
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
            sidedness: Sidedness::Symmetrized,
            unit_scale: self.unit_scale,
        }
    }

    /// Linear interpolation in log-log coordinates; `None` outside the grid.
    ///
    /// Zero samples are interpolated linearly instead.
    pub fn interpolate(&self, omega: T) -> Option<T> {
        let w = self.grid.omegas();
        if omega < w[0] || omega > w[w.len() - 1] {
            return None;
        }
        let j = w.partition_point(|&x| x < omega);
        if j < w.len() && w[j] == omega {
            return Some(self.values[j]);
        }
        let (lo, hi) = (j - 1, j);
        let (v0, v1) = (self.values[lo], self.values[hi]);
        let t = (omega.ln() - w[lo].ln()) / (w[hi].ln() - w[lo].ln());
        if v0 > T::zero() && v1 > T::zero() {
            Some((v0.ln() + t * (v1.ln() - v0.ln())).exp())
        } else {
            let t = (omega - w[lo]) / (w[hi] - w[lo]);
            Some(v0 + t * (v1 - v0))
        }
    }
}

/// Free-function form of [`Spectrum::symmetrize`].
pub fn symmetrize<T: Scalar>(s: &Spectrum<T>) -> Spectrum<T> {
    s.symmetrize()
}
