//! Run configuration: one strict JSON document shared by every command.

use qlim_core::gravity::{McConfig, Probing};
use qlim_core::{Damping, FrequencyGrid, MirrorParams, PhysicalConstants};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Issue};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub constants: ConstantsConfig,
    pub mirror: Option<MirrorConfig>,
    #[serde(default)]
    pub probe: ProbeConfig,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub gravity: GravityConfig,
    #[serde(default)]
    pub fdt: FdtConfig,
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Overrides of the CODATA values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub hbar: Option<f64>,
    pub c: Option<f64>,
    pub g: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorConfig {
    /// kg
    pub mass: f64,
    #[serde(default)]
    pub omega0: f64,
    /// Fixed friction (rad/s); when absent the vacuum force supplies it.
    pub gamma: Option<f64>,
    /// Coupling of the vacuum motional force; 1 if absent.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Probe wavenumber (rad/m); balanced per frequency when absent.
    pub k0: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub r_max: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { r_max: 30.0 }
    }
}

/// Either a fixed β or "mc" to estimate it.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BetaChoice {
    Value(f64),
    Keyword(BetaKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKeyword {
    Mc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    pub beta: BetaChoice,
    pub realizations: usize,
    pub modes: usize,
    pub band: Option<(f64, f64)>,
    pub path_length: f64,
    pub direction: [f64; 3],
    pub probing: Probing,
    pub seed: u64,
    pub fit_bins: usize,
    pub resolution: usize,
    pub amplitude_scale: f64,
    pub target_rel_ci: Option<f64>,
}

impl Default for GravityConfig {
    fn default() -> Self {
        let mc = McConfig::default();
        Self {
            beta: BetaChoice::Value(8.0 / 3.0),
            realizations: mc.realizations,
            modes: mc.modes,
            band: None,
            path_length: mc.path_length,
            direction: mc.direction,
            probing: mc.probing,
            seed: mc.seed,
            fit_bins: mc.fit_bins,
            resolution: mc.resolution,
            amplitude_scale: mc.amplitude_scale,
            target_rel_ci: mc.target_rel_ci,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdtModel {
    #[default]
    Mechanical,
    VacuumMotional,
    Dressed,
}

/// Multiply the spectrum at one grid index, to exercise the checker.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub index: usize,
    pub factor: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdtConfig {
    pub model: FdtModel,
    pub tol: f64,
    pub kk_tol: f64,
    pub kk: bool,
    pub fault: Option<Fault>,
}

impl Default for FdtConfig {
    fn default() -> Self {
        Self {
            model: FdtModel::Mechanical,
            tol: 1e-3,
            kk_tol: 1e-3,
            kk: true,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectrumSource {
    /// β l_p²/ω, symmetrized.
    Gravitational,
    /// The budget's total, symmetrized; needs a mirror.
    Combined,
    /// Tabulated symmetrized density (m²·s) on increasing ω.
    Table { omegas: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    pub spectrum: SpectrumSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitScale {
    /// Divide by l_p².
    Planck,
    /// Divide by λ_c² of the mirror.
    Compton,
    /// m²·s as is.
    Si,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub unit_scale: Option<UnitScale>,
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Validation(vec![Issue::new(
            "$",
            format!("{e} (line {}, column {})", e.line(), e.column()),
        )])
    })
}

/// Collects validation issues so that a bad config reports all of them at once.
#[derive(Default)]
pub struct Validator {
    issues: Vec<Issue>,
}

impl Validator {
    pub fn push(&mut self, field: &str, message: impl Into<String>) {
        self.issues.push(Issue::new(field, message));
    }

    pub fn positive(&mut self, field: &str, v: f64) {
        if !(v > 0.0) || !v.is_finite() {
            self.push(field, format!("must be finite and > 0, got {v}"));
        }
    }

    pub fn take<T>(&mut self, field: &str, r: qlim_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(field, e.to_string());
                None
            }
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        if self.issues.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(self.issues))
        }
    }
}

impl RunConfig {
    pub fn constants(&self, v: &mut Validator) -> PhysicalConstants<f64> {
        let d = PhysicalConstants::<f64>::codata();
        let (h, c, g) = (
            self.constants.hbar.unwrap_or(d.hbar()),
            self.constants.c.unwrap_or(d.c()),
            self.constants.g.unwrap_or(d.g()),
        );
        v.take("constants", PhysicalConstants::new(h, c, g)).unwrap_or(d)
    }

    pub fn alpha(&self) -> f64 {
        self.mirror.as_ref().and_then(|m| m.alpha).unwrap_or(1.0)
    }

    pub fn mirror(&self, v: &mut Validator) -> Option<MirrorParams<f64>> {
        let Some(m) = &self.mirror else {
            v.push("mirror", "section is required by this command");
            return None;
        };
        if m.gamma.is_some() && m.alpha.is_some() {
            v.push("mirror", "give either gamma or alpha, not both");
            return None;
        }
        let damping = match m.gamma {
            Some(g) => Damping::Fixed(g),
            None => Damping::Vacuum { alpha: self.alpha() },
        };
        v.take("mirror", MirrorParams::new(m.mass, m.omega0, damping))
    }

    pub fn grid(&self, v: &mut Validator) -> Option<FrequencyGrid<f64>> {
        let Some(g) = &self.grid else {
            v.push("grid", "section is required by this command");
            return None;
        };
        if g.points == 0 {
            v.push("grid.points", "must be at least 1");
            return None;
        }
        let r = match g.spacing {
            Spacing::Log => FrequencyGrid::log_spaced(g.omega_min, g.omega_max, g.points),
            Spacing::Linear => FrequencyGrid::linear(g.omega_min, g.omega_max, g.points),
        };
        v.take("grid", r)
    }

    /// β for the closed-form spectrum; `None` after recording an issue.
    pub fn fixed_beta(&self, v: &mut Validator) -> Option<f64> {
        match self.gravity.beta {
            BetaChoice::Value(b) if b > 0.0 && b.is_finite() => Some(b),
            BetaChoice::Value(b) => {
                v.push("gravity.beta", format!("must be finite and > 0, got {b}"));
                None
            }
            BetaChoice::Keyword(BetaKeyword::Mc) => {
                v.push("gravity.beta", "\"mc\" is only meaningful for gw-mc; give a number");
                None
            }
        }
    }

    pub fn mc_config(&self, seed: Option<u64>, v: &mut Validator) -> McConfig {
        let g = &self.gravity;
        let base = McConfig::default();
        let band = g.band.unwrap_or(base.band);
        if !(band.0 > 0.0) || !(band.1 > band.0) {
            v.push("gravity.band", format!("need 0 < lo < hi, got {band:?}"));
        }
        v.positive("gravity.path_length", g.path_length);
        if g.realizations < 2 {
            v.push("gravity.realizations", "need at least 2");
        }
        if g.modes == 0 {
            v.push("gravity.modes", "need at least 1");
        }
        if g.fit_bins < 2 {
            v.push("gravity.fit_bins", "need at least 2");
        }
        if g.resolution == 0 {
            v.push("gravity.resolution", "need at least 1");
        }
        if !(g.amplitude_scale >= 0.0) || !g.amplitude_scale.is_finite() {
            v.push("gravity.amplitude_scale", "must be finite and >= 0");
        }
        if g.direction.iter().all(|&x| x == 0.0) {
            v.push("gravity.direction", "must be non-zero");
        }
        McConfig {
            realizations: g.realizations,
            modes: g.modes,
            band,
            path_length: g.path_length,
            direction: g.direction,
            probing: g.probing,
            seed: seed.unwrap_or(g.seed),
            fit_bins: g.fit_bins,
            resolution: g.resolution,
            amplitude_scale: g.amplitude_scale,
            target_rel_ci: g.target_rel_ci,
        }
    }
}
