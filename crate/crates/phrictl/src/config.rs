//! Toolkit configuration: one JSON document, every field optional, unknown
//! keys rejected. A bare `{}` reproduces the default analysis pipeline.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use admittance_pareto::freqresp::{
    default_plant, make_log_grid_hz, FractionalTerm, FractionalTransferFunction, FrequencyGrid, PlantConfig,
    PlantModel,
};
use admittance_pareto::maps::{
    make_param_grid, ControllerGrid, DEFAULT_B_RANGE, DEFAULT_B_STEP, DEFAULT_M_RANGE, DEFAULT_M_STEP,
};
use admittance_pareto::metrics::{ImpedanceBounds, Scenario, WeightingFunction};
use admittance_pareto::select::{SelectionConstraints, SelectionPolicy, DEFAULT_K_E_EVAL};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn build_block(
    which: &str,
    num: &Option<Vec<FractionalTerm>>,
    den: &Option<Vec<FractionalTerm>>,
) -> Result<Option<FractionalTransferFunction>, CliError> {
    match (num, den) {
        (None, None) => Ok(None),
        (Some(num), Some(den)) => FractionalTransferFunction::new(num, den)
            .map(Some)
            .map_err(|e| CliError::Config(format!("plant.{which}: {e}"))),
        _ => Err(CliError::Config(format!("plant.{which}_num and plant.{which}_den must be given together"))),
    }
}

/// Robot lag and force filter. Term lists `{c, beta}` in `G_num`/`G_den`
/// and `H_num`/`H_den` replace the generated blocks when set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSettings {
    pub tau_r_s: f64,
    pub filter_order: u32,
    pub filter_cutoff_hz: f64,
    #[serde(rename = "G_num", skip_serializing_if = "Option::is_none")]
    pub g_num: Option<Vec<FractionalTerm>>,
    #[serde(rename = "G_den", skip_serializing_if = "Option::is_none")]
    pub g_den: Option<Vec<FractionalTerm>>,
    #[serde(rename = "H_num", skip_serializing_if = "Option::is_none")]
    pub h_num: Option<Vec<FractionalTerm>>,
    #[serde(rename = "H_den", skip_serializing_if = "Option::is_none")]
    pub h_den: Option<Vec<FractionalTerm>>,
}

impl Default for PlantSettings {
    fn default() -> Self {
        let d = PlantConfig::default();
        Self {
            tau_r_s: d.tau_r_s,
            filter_order: d.filter_order,
            filter_cutoff_hz: d.filter_cutoff_hz,
            g_num: None,
            g_den: None,
            h_num: None,
            h_den: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub m_range: [f64; 2],
    pub b_range: [f64; 2],
    pub k_range: [f64; 2],
}

/// A scenario preset name or explicit impedance bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSetting {
    Preset(String),
    Bounds(BoundsSpec),
}

impl Default for ScenarioSetting {
    fn default() -> Self {
        Self::Preset("S1".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSettings {
    pub m_range: [f64; 2],
    pub m_step: f64,
    pub b_range: [f64; 2],
    pub b_step: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { m_range: DEFAULT_M_RANGE, m_step: DEFAULT_M_STEP, b_range: DEFAULT_B_RANGE, b_step: DEFAULT_B_STEP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencySettings {
    pub band_hz: [f64; 2],
    pub points: usize,
    pub nyquist_band_hz: [f64; 2],
    pub nyquist_points: usize,
}

impl Default for FrequencySettings {
    fn default() -> Self {
        Self { band_hz: [0.01, 30.0], points: 500, nyquist_band_hz: [1e-3, 1e4], nyquist_points: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightingSettings {
    pub order: u32,
    pub cutoff_hz: f64,
}

impl Default for WeightingSettings {
    fn default() -> Self {
        Self { order: 5, cutoff_hz: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintSettings {
    #[serde(rename = "C_max")]
    pub c_max: Option<f64>,
    pub rho_min: Option<f64>,
    pub omega_c_min_hz: Option<f64>,
    pub k_e_eval: f64,
}

impl Default for ConstraintSettings {
    fn default() -> Self {
        let d = SelectionConstraints::default();
        Self { c_max: d.c_max, rho_min: d.rho_min, omega_c_min_hz: d.omega_c_min_hz, k_e_eval: DEFAULT_K_E_EVAL }
    }
}

impl From<ConstraintSettings> for SelectionConstraints {
    fn from(c: ConstraintSettings) -> Self {
        Self { c_max: c.c_max, rho_min: c.rho_min, omega_c_min_hz: c.omega_c_min_hz, k_e_eval: c.k_e_eval }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolkitConfig {
    pub plant: PlantSettings,
    pub scenario: ScenarioSetting,
    /// Stiffness at which the robustness corners are evaluated; defaults to
    /// the upper end of the scenario's stiffness range.
    pub k_eq: Option<f64>,
    pub alphas: Vec<f64>,
    pub grid: GridSettings,
    pub frequency: FrequencySettings,
    pub weighting: WeightingSettings,
    pub weight_step: f64,
    pub constraints: ConstraintSettings,
    pub policy: SelectionPolicy,
    /// Stiffness values for which stability boundaries are traced.
    pub boundary_k_eq: Vec<f64>,
    pub output_dir: PathBuf,
}

impl Default for ToolkitConfig {
    fn default() -> Self {
        Self {
            plant: PlantSettings::default(),
            scenario: ScenarioSetting::default(),
            k_eq: None,
            alphas: vec![1.0, 0.7, 0.4],
            grid: GridSettings::default(),
            frequency: FrequencySettings::default(),
            weighting: WeightingSettings::default(),
            weight_step: 0.001,
            constraints: ConstraintSettings::default(),
            policy: SelectionPolicy::MinC,
            boundary_k_eq: Vec::new(),
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Everything a pipeline stage needs, built once from a validated config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ToolkitConfig,
    pub plant: PlantModel,
    pub bounds: ImpedanceBounds,
    pub k_eq: f64,
    pub freq: FrequencyGrid,
    pub nyquist: FrequencyGrid,
    pub weighting: WeightingFunction,
    pub constraints: SelectionConstraints,
}

impl Resolved {
    pub fn grid(&self, alpha: f64) -> Result<ControllerGrid, CliError> {
        let g = &self.config.grid;
        make_param_grid(alpha, g.m_range, g.m_step, g.b_range, g.b_step).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

fn config_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

impl ToolkitConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn bounds(&self) -> Result<ImpedanceBounds, CliError> {
        match &self.scenario {
            ScenarioSetting::Preset(name) => Scenario::from_name(name)
                .map(Scenario::bounds)
                .ok_or_else(|| config_err("scenario", format!("unknown preset {name:?} (expected S1, S2 or S3)"))),
            ScenarioSetting::Bounds(b) => {
                ImpedanceBounds::new(b.m_range, b.b_range, b.k_range).map_err(|e| config_err("scenario", e))
            }
        }
    }

    fn plant_model(&self) -> Result<PlantModel, CliError> {
        let p = &self.plant;
        let generated = default_plant(&PlantConfig {
            tau_r_s: p.tau_r_s,
            filter_order: p.filter_order,
            filter_cutoff_hz: p.filter_cutoff_hz,
        })
        .map_err(|e| config_err("plant", e))?;
        let g = build_block("G", &p.g_num, &p.g_den)?.unwrap_or(generated.g);
        let h = build_block("H", &p.h_num, &p.h_den)?.unwrap_or(generated.h);
        Ok(PlantModel::new(g, h))
    }

    /// Validate every field and fill derived defaults.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        if self.alphas.is_empty() {
            return Err(config_err("alphas", "at least one integration order is required"));
        }
        for (i, a) in self.alphas.iter().enumerate() {
            if !(*a > 0.0 && *a <= 1.0) {
                return Err(config_err("alphas", format!("{a} is outside (0, 1]")));
            }
            if self.alphas[..i].contains(a) {
                return Err(config_err("alphas", format!("{a} is listed twice")));
            }
        }
        if !(self.weight_step > 0.0 && self.weight_step <= 1.0) {
            return Err(config_err("weight_step", "must lie in (0, 1]"));
        }
        if let SelectionPolicy::ByWeight(w) = self.policy {
            if !(0.0..=1.0).contains(&w) {
                return Err(config_err("policy", "by_weight needs a weight in [0, 1]"));
            }
        }
        let bounds = self.bounds()?;
        let k_eq = self.k_eq.unwrap_or(bounds.k_range[1]);
        if !(k_eq >= 0.0 && k_eq.is_finite()) {
            return Err(config_err("k_eq", "must be finite and non-negative"));
        }
        if let Some(k) = self.boundary_k_eq.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(config_err("boundary_k_eq", format!("{k} is not a finite non-negative stiffness")));
        }
        let plant = self.plant_model()?;
        let f = &self.frequency;
        let freq = make_log_grid_hz(f.band_hz[0], f.band_hz[1], f.points).map_err(|e| config_err("frequency", e))?;
        let nyquist = make_log_grid_hz(f.nyquist_band_hz[0], f.nyquist_band_hz[1], f.nyquist_points)
            .map_err(|e| config_err("frequency", e))?;
        let weighting = WeightingFunction::new(self.weighting.order, 2.0 * PI * self.weighting.cutoff_hz)
            .map_err(|e| config_err("weighting", e))?;
        let constraints = SelectionConstraints::from(self.constraints);
        constraints.validate().map_err(|e| config_err("constraints", e))?;

        let mut config = self.clone();
        config.k_eq = Some(k_eq);
        let resolved = Resolved { config, plant, bounds, k_eq, freq, nyquist, weighting, constraints };
        for &a in &resolved.config.alphas {
            resolved.grid(a)?;
        }
        Ok(resolved)
    }
}
