//! Linearized-gravity curvature correlations, Planck-scale distance noise and
//! a Monte-Carlo geodesic-deviation estimator.
//!
//! Signature is (+,−,−,−) throughout. Wave vectors are stored with upper
//! indices; tensor components carry lower indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

mod mc;
mod noise;

pub use mc::{
    draw_realization, geodesic_deviation_mc, path_factor, GwMode, GwRealization, McConfig, McFit,
    McResult, Probing,
};
pub use noise::{
    classify_regime, combined_spectrum, gravitational_distance_spectrum, one_way_beta,
    CombinedSpectrum, Regime, RegimeReport,
};

/// Minkowski metric component η_{μν} (equal to η^{μν}).
pub fn eta<T: Scalar>(mu: usize, nu: usize) -> T {
    match (mu, nu) {
        (0, 0) => T::one(),
        (a, b) if a == b => -T::one(),
        _ => T::zero(),
    }
}

/// Contravariant wave four-vector k^μ in rad/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveVector<T = f64> {
    pub k: [T; 4],
}

impl<T: Scalar> WaveVector<T> {
    pub fn new(k: [T; 4]) -> Self {
        Self { k }
    }

    /// Null vector (|k⃗|, k⃗) of magnitude `omega_over_c` along `direction`,
    /// which need not be normalized.
    pub fn null(omega_over_c: T, direction: [T; 3]) -> Result<Self> {
        let n = (direction[0] * direction[0]
            + direction[1] * direction[1]
            + direction[2] * direction[2])
            .sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Domain("direction must be a non-zero finite vector".into()));
        }
        let s = omega_over_c / n;
        Ok(Self {
            k: [omega_over_c, s * direction[0], s * direction[1], s * direction[2]],
        })
    }

    /// Covariant components k_μ.
    pub fn lower(&self) -> [T; 4] {
        [self.k[0], -self.k[1], -self.k[2], -self.k[3]]
    }

    /// k·k with the Minkowski metric.
    pub fn square(&self) -> T {
        self.k[0] * self.k[0] - self.k[1] * self.k[1] - self.k[2] * self.k[2] - self.k[3] * self.k[3]
    }

    /// Euclidean norm squared of all four components.
    pub fn euclid_sq(&self) -> T {
        self.k.iter().fold(T::zero(), |a, &x| a + x * x)
    }

    pub fn is_null(&self, tol: T) -> bool {
        self.square().abs() <= tol * self.euclid_sq()
    }

    /// Apply a Lorentz matrix Λ^μ_ν.
    pub fn transform(&self, lambda: &[[T; 4]; 4]) -> Self {
        let mut out = [T::zero(); 4];
        for (mu, o) in out.iter_mut().enumerate() {
            for nu in 0..4 {
                *o = *o + lambda[mu][nu] * self.k[nu];
            }
        }
        Self { k: out }
    }
}

/// Default on-shell tolerance for [`WaveVector::is_null`].
pub const NULL_TOL: f64 = 1e-10;

fn check_indices(idx: &[usize]) -> Result<()> {
    match idx.iter().find(|&&i| i > 3) {
        Some(&i) => Err(Error::IndexOutOfRange(i)),
        None => Ok(()),
    }
}

/// Plane-wave curvature structure ½(k_λk_ρh_{μν} + k_μk_νh_{λρ} − k_μk_ρh_{λν} − k_λk_νh_{μρ})
/// for lowered `kl` and a symmetric lower-index tensor `h`.
pub fn plane_wave_riemann<T: Scalar>(kl: &[T; 4], h: &[[T; 4]; 4], idx: [usize; 4]) -> T {
    let [l, m, r, n] = idx;
    T::lit(0.5)
        * (kl[l] * kl[r] * h[m][n] + kl[m] * kl[n] * h[l][r]
            - kl[m] * kl[r] * h[l][n]
            - kl[l] * kl[n] * h[m][r])
}

fn eta_matrix<T: Scalar>() -> [[T; 4]; 4] {
    let mut h = [[T::zero(); 4]; 4];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = eta(i, i);
    }
    h
}

/// 𝓡_{λμρν}(k) with the metric as the polarization.
pub fn r_building_block<T: Scalar>(k: &WaveVector<T>, indices: [usize; 4]) -> Result<T> {
    check_indices(&indices)?;
    Ok(plane_wave_riemann(&k.lower(), &eta_matrix(), indices))
}

/// Flat position of an 8-index component in [`CurvatureSpectrum::components`].
pub fn flat_index(idx: [usize; 8]) -> usize {
    idx.iter().fold(0, |a, &i| a * 4 + i)
}

fn unflatten(mut f: usize) -> [usize; 8] {
    let mut idx = [0; 8];
    for slot in idx.iter_mut().rev() {
        *slot = f % 4;
        f /= 4;
    }
    idx
}

/// On-shell density of ⟨R_{λμρν} R_{λ'μ'ρ'ν'}⟩[k] with the δ(k²) factor removed.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSpectrum<T = f64> {
    pub k: WaveVector<T>,
    /// 4⁸ components, last index fastest; see [`flat_index`].
    pub components: Vec<T>,
    pub planck_length: T,
    /// k was not null, so the tensor is zero.
    pub off_shell: bool,
}

pub const CURVATURE_LEN: usize = 1 << 16;

/// 16π²l_p²θ(k⁰)(𝓡_{λμλ'μ'}𝓡_{ρνρ'ν'} + 𝓡_{λμρ'ν'}𝓡_{ρνλ'μ'} − 𝓡_{λμρν}𝓡_{λ'μ'ρ'ν'}).
pub fn curvature_spectrum<T: Scalar>(k: &WaveVector<T>, planck_length: T) -> CurvatureSpectrum<T> {
    let off_shell = !k.is_null(T::lit(NULL_TOL));
    let mut components = vec![T::zero(); CURVATURE_LEN];
    if off_shell || !(k.k[0] > T::zero()) {
        return CurvatureSpectrum {
            k: *k,
            components,
            planck_length,
            off_shell,
        };
    }
    let kl = k.lower();
    let h = eta_matrix();
    let mut rb = [T::zero(); 256];
    for (f, v) in rb.iter_mut().enumerate() {
        *v = plane_wave_riemann(&kl, &h, [f >> 6, (f >> 4) & 3, (f >> 2) & 3, f & 3]);
    }
    let pair = |a: usize, b: usize, c: usize, d: usize| rb[(a << 6) | (b << 4) | (c << 2) | d];
    let pref = T::lit(16.0) * T::PI() * T::PI() * planck_length * planck_length;
    for (f, c) in components.iter_mut().enumerate() {
        let [l, m, r, n, l2, m2, r2, n2] = unflatten(f);
        *c = pref
            * (pair(l, m, l2, m2) * pair(r, n, r2, n2) + pair(l, m, r2, n2) * pair(r, n, l2, m2)
                - pair(l, m, r, n) * pair(l2, m2, r2, n2));
    }
    CurvatureSpectrum {
        k: *k,
        components,
        planck_length,
        off_shell,
    }
}

impl<T: Scalar> CurvatureSpectrum<T> {
    pub fn get(&self, idx: [usize; 8]) -> Result<T> {
        check_indices(&idx)?;
        Ok(self.components[flat_index(idx)])
    }

    pub fn max_abs(&self) -> T {
        self.components.iter().fold(T::zero(), |a, &x| a.max(x.abs()))
    }

    /// Components divided by l_p².
    pub fn scaled(&self) -> Vec<T> {
        let s = self.planck_length * self.planck_length;
        self.components.iter().map(|&c| c / s).collect()
    }

    /// Largest violation of the index symmetries relative to the largest
    /// component: antisymmetry within each index pair, pair exchange within
    /// each factor, and exchange of the two factors.
    pub fn symmetry_residual(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let perms: [fn([usize; 8]) -> [usize; 8]; 7] = [
            |[a, b, c, d, e, f, g, h]| [b, a, c, d, e, f, g, h],
            |[a, b, c, d, e, f, g, h]| [a, b, d, c, e, f, g, h],
            |[a, b, c, d, e, f, g, h]| [a, b, c, d, f, e, g, h],
            |[a, b, c, d, e, f, g, h]| [a, b, c, d, e, f, h, g],
            |[a, b, c, d, e, f, g, h]| [c, d, a, b, e, f, g, h],
            |[a, b, c, d, e, f, g, h]| [a, b, c, d, g, h, e, f],
            |[a, b, c, d, e, f, g, h]| [e, f, g, h, a, b, c, d],
        ];
        let signs = [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
        let mut worst = T::zero();
        for f in 0..CURVATURE_LEN {
            let idx = unflatten(f);
            let v = self.components[f];
            for (p, s) in perms.iter().zip(signs) {
                let w = self.components[flat_index(p(idx))];
                worst = worst.max((v - T::lit(s) * w).abs());
            }
        }
        worst / scale
    }

    /// Correlation ⟨G_{μν} R_{λ'μ'ρ'ν'}⟩ with G = R^λ_{μλν} − ½η_{μν}R,
    /// as 4⁶ components (μ, ν, λ', μ', ρ', ν').
    pub fn einstein_contraction(&self) -> Vec<T> {
        let half = T::lit(0.5);
        let mut out = vec![T::zero(); 1 << 12];
        for tail in 0..256 {
            let t = [tail >> 6, (tail >> 4) & 3, (tail >> 2) & 3, tail & 3];
            let at = |l: usize, m: usize, r: usize, n: usize| {
                self.components[flat_index([l, m, r, n, t[0], t[1], t[2], t[3]])]
            };
            let mut ricci = [[T::zero(); 4]; 4];
            for (m, row) in ricci.iter_mut().enumerate() {
                for (n, v) in row.iter_mut().enumerate() {
                    for l in 0..4 {
                        *v = *v + eta::<T>(l, l) * at(l, m, l, n);
                    }
                }
            }
            let scalar = (0..4).fold(T::zero(), |a, m| a + eta::<T>(m, m) * ricci[m][m]);
            for m in 0..4 {
                for n in 0..4 {
                    out[(m * 4 + n) * 256 + tail] = ricci[m][n] - half * eta::<T>(m, n) * scalar;
                }
            }
        }
        out
    }

    /// Components after a Lorentz transformation x' = Λx; each lower index
    /// picks up a factor of Λ⁻¹.
    pub fn transformed(&self, lambda: &[[T; 4]; 4]) -> Vec<T> {
        let inv = lorentz_inverse(lambda);
        let mut cur = self.components.clone();
        for slot in 0..8 {
            let stride = 1usize << (2 * (7 - slot));
            let mut next = vec![T::zero(); CURVATURE_LEN];
            for (f, out) in next.iter_mut().enumerate() {
                let a = (f / stride) % 4;
                let base = f - a * stride;
                let mut acc = T::zero();
                for b in 0..4 {
                    acc = acc + inv[b][a] * cur[base + b * stride];
                }
                *out = acc;
            }
            cur = next;
        }
        cur
    }
}

/// Λ⁻¹ = η Λᵀ η.
pub fn lorentz_inverse<T: Scalar>(lambda: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = eta::<T>(i, i) * lambda[j][i] * eta::<T>(j, j);
        }
    }
    out
}

/// Pure boost of the given rapidity along a spatial direction.
pub fn boost<T: Scalar>(rapidity: T, direction: [T; 3]) -> Result<[[T; 4]; 4]> {
    let n = (direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2]).sqrt();
    if !(n > T::zero()) {
        return Err(Error::Domain("boost direction must be non-zero".into()));
    }
    let d = [direction[0] / n, direction[1] / n, direction[2] / n];
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut m = [[T::zero(); 4]; 4];
    m[0][0] = ch;
    for i in 0..3 {
        m[0][i + 1] = sh * d[i];
        m[i + 1][0] = sh * d[i];
        for j in 0..3 {
            let delta = if i == j { T::one() } else { T::zero() };
            m[i + 1][j + 1] = delta + (ch - T::one()) * d[i] * d[j];
        }
    }
    Ok(m)
}
