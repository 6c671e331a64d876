//! Scenario configuration: one JSON document, SI units unless noted.
//!
//! Fluxes are in units of Φ0. Frequencies are either a bare number (rad/s) or
//! `{"value": v, "unit": "GHz"}`, which means an angular frequency of
//! 2π·v·10⁹ rad/s. The same holds for "MHz"; "rad/s" is accepted explicitly.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use squid_gates::compiler::{Model, PulseSequence};
use squid_gates::lambda::{DriveSegment, DEFAULT_MARGIN};
use squid_gates::linalg::ComplexMatrixJson;
use squid_gates::spectrum::{FluxGrid, SquidParams, DEFAULT_RATIO_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "GHz")]
    Gigahertz,
    #[serde(rename = "MHz")]
    Megahertz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    RadPerSecond(f64),
    Tagged { value: f64, unit: FrequencyUnit },
}

impl Frequency {
    /// rad/s
    pub fn angular(&self) -> f64 {
        match *self {
            Frequency::RadPerSecond(w) => w,
            Frequency::Tagged { value, unit } => match unit {
                FrequencyUnit::RadPerSecond => value,
                FrequencyUnit::Gigahertz => TAU * 1e9 * value,
                FrequencyUnit::Megahertz => TAU * 1e6 * value,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = FluxGrid::default_window();
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
        }
    }
}

fn default_levels() -> usize {
    10
}

fn default_ratio() -> f64 {
    DEFAULT_RATIO_THRESHOLD
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    /// F
    #[serde(rename = "C")]
    pub capacitance: f64,
    /// H
    #[serde(rename = "L")]
    pub inductance: f64,
    /// A
    #[serde(rename = "I_c")]
    pub critical_current: f64,
    /// Φ0
    #[serde(rename = "Phi_x")]
    pub flux_bias: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_levels")]
    pub n_levels: usize,
    /// Explicit |a⟩ index; chosen by the φ-ratio heuristic when absent.
    #[serde(default)]
    pub intermediate: Option<usize>,
    #[serde(default = "default_ratio")]
    pub ratio_threshold: f64,
    /// Re-solve on the refined grid and report the changes.
    #[serde(default = "default_true")]
    pub convergence_check: bool,
}

impl DeviceConfig {
    pub fn params(&self) -> squid_gates::Result<SquidParams> {
        SquidParams::with_bias_in_flux_quanta(self.capacitance, self.inductance, self.critical_current, self.flux_bias)
    }

    pub fn flux_grid(&self) -> squid_gates::Result<FluxGrid> {
        FluxGrid::new(self.grid.x_min, self.grid.x_max, self.grid.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(rename = "omega_I")]
    pub omega_i: Frequency,
    #[serde(rename = "omega_II")]
    pub omega_ii: Frequency,
    pub delta: Frequency,
    #[serde(rename = "phi_I", default)]
    pub phi_i: f64,
    #[serde(rename = "phi_II", default)]
    pub phi_ii: f64,
    /// s; defaults to the NOT duration where a duration is needed.
    #[serde(default)]
    pub duration: Option<f64>,
}

impl DriveConfig {
    pub fn segment(&self, duration: f64) -> squid_gates::Result<DriveSegment> {
        DriveSegment::new(
            self.omega_i.angular(),
            self.omega_ii.angular(),
            self.delta.angular(),
            self.phi_i,
            self.phi_ii,
            duration,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSpec {
    Not,
    Hadamard,
    Identity,
    /// diag(e^{−iχ}, e^{iχ})
    Phase(f64),
    /// Row-major (re, im) pairs.
    Matrix(ComplexMatrixJson),
    Sequence(PulseSequence),
    SequenceFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    /// s
    #[serde(default)]
    pub duration: Option<f64>,
    /// Gap length in free-precession periods 2πħ/(E1 − E0).
    #[serde(default)]
    pub periods: Option<f64>,
    /// (E1 − E0)/ħ; taken from the solved spectrum when absent.
    #[serde(default)]
    pub level_gap: Option<Frequency>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometricConfig {
    /// Angle α directly, or the splitting ω0; otherwise ω0 follows from the drive.
    Rotation {
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        omega_0: Option<Frequency>,
        #[serde(default)]
        gap: Option<GapConfig>,
    },
    Phase {
        delta_phi_0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "a")]
    Intermediate,
    #[serde(rename = "+")]
    PlusY,
    #[serde(rename = "-")]
    MinusY,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default = "default_initial")]
    pub initial: InitialState,
    /// Samples per segment; at least enough to resolve the Δ oscillation.
    #[serde(default)]
    pub samples: Option<usize>,
}

fn default_initial() -> InitialState {
    InitialState::Zero
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            initial: InitialState::Zero,
            samples: None,
        }
    }
}

fn default_leakage_bound() -> f64 {
    squid_gates::compiler::DEFAULT_LEAKAGE_BOUND
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Defaults to 0.99 for the three-level model and 1 − 10⁻⁹ otherwise.
    #[serde(default)]
    pub fidelity: Option<f64>,
    #[serde(default = "default_leakage_bound")]
    pub leakage_bound: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            fidelity: None,
            leakage_bound: default_leakage_bound(),
            margin: default_margin(),
        }
    }
}

impl Thresholds {
    pub fn fidelity_for(&self, model: Model) -> f64 {
        self.fidelity.unwrap_or(match model {
            Model::ThreeLevel => 0.99,
            _ => 1.0 - 1e-9,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub device: Option<DeviceConfig>,
    #[serde(default)]
    pub drive: Option<DriveConfig>,
    #[serde(default)]
    pub gate: Option<GateSpec>,
    /// Intended action for `sequence` gates; the closed-form result of the
    /// sequence itself when absent.
    #[serde(default)]
    pub target: Option<ComplexMatrixJson>,
    #[serde(default)]
    pub geometric: Option<GeometricConfig>,
    #[serde(default)]
    pub dynamics: Option<DynamicsConfig>,
    #[serde(default)]
    pub model: Option<Model>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config file; relative `sequence_file` paths resolve against
    /// the config's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::from_json(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(GateSpec::SequenceFile(file)) = &mut cfg.gate {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    pub fn device(&self) -> anyhow::Result<&DeviceConfig> {
        self.device.as_ref().ok_or_else(|| anyhow!("config has no \"device\" block"))
    }

    pub fn drive(&self) -> anyhow::Result<&DriveConfig> {
        self.drive.as_ref().ok_or_else(|| anyhow!("config has no \"drive\" block"))
    }

    pub fn model(&self) -> Model {
        self.model.unwrap_or(Model::ClosedForm)
    }
}

/// The bundled configuration reproducing the reference device scenario.
pub const PAPER_CONFIG: &str = include_str!("../configs/paper.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_units() {
        let f: Frequency = serde_json::from_str("2.5e9").unwrap();
        assert_eq!(f.angular(), 2.5e9);
        let f: Frequency = serde_json::from_str(r#"{"value": 1.0, "unit": "GHz"}"#).unwrap();
        assert!((f.angular() - TAU * 1e9).abs() < 1e-3);
        let f: Frequency = serde_json::from_str(r#"{"value": 3.0, "unit": "rad/s"}"#).unwrap();
        assert_eq!(f.angular(), 3.0);
        assert!(serde_json::from_str::<Frequency>(r#"{"value": 1.0, "unit": "Hz"}"#).is_err());
    }

    #[test]
    fn gate_spec_forms() {
        assert_eq!(serde_json::from_str::<GateSpec>(r#""not""#).unwrap(), GateSpec::Not);
        assert_eq!(serde_json::from_str::<GateSpec>(r#"{"phase": 0.3}"#).unwrap(), GateSpec::Phase(0.3));
        let m: GateSpec = serde_json::from_str(r#"{"matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
        assert!(matches!(m, GateSpec::Matrix(_)));
    }

    #[test]
    fn bundled_config_parses() {
        let cfg = ScenarioConfig::from_json(PAPER_CONFIG).unwrap();
        let device = cfg.device().unwrap();
        assert_eq!(device.flux_bias, -0.501);
        assert!(cfg.drive().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"devise": {}}"#).is_err());
    }
}
