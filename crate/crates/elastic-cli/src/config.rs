use std::path::{Path, PathBuf};

use elastic_charsolver::SolverConfig;
use elastic_initdata::InitialDataSpec;
use elastic_model::{sigma_from_gamma, DimMode, MaterialParams, StoredEnergyCoeffs};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    VerifyStructure,
    Simulate,
    CompareOracle,
    SweepEta,
    SingleWave,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::VerifyStructure => "verify-structure",
            Mode::Simulate => "simulate",
            Mode::CompareOracle => "compare-oracle",
            Mode::SweepEta => "sweep-eta",
            Mode::SingleWave => "single-wave",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        [Mode::VerifyStructure, Mode::Simulate, Mode::CompareOracle, Mode::SweepEta, Mode::SingleWave]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "3d")]
    Three,
    #[serde(rename = "2d")]
    Two,
}

impl Dim {
    pub fn mode(self) -> DimMode {
        match self {
            Dim::Three => DimMode::Planar3D,
            Dim::Two => DimMode::Planar2D,
        }
    }
}

/// Either the wave speeds and σ's directly, or the stored-energy
/// coefficients they derive from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Direct { c1: f64, c2: f64, sigma0: f64, sigma1: f64, delta: f64 },
    StoredEnergy { coeffs: StoredEnergyCoeffs, delta: f64 },
}

impl Default for MaterialSpec {
    fn default() -> Self {
        MaterialSpec::Direct { c1: 2.0, c2: 1.0, sigma0: -1.0, sigma1: 1.0, delta: 1e-2 }
    }
}

/// Initial-data knobs; unset fields take the dimension's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub eta: Option<f64>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub bound_fraction: Option<f64>,
    pub transverse_fraction: Option<f64>,
    pub signs: Option<Vec<f64>>,
}

impl DataSpec {
    pub fn resolve(&self, mode: DimMode) -> InitialDataSpec {
        let d = InitialDataSpec::default_for(mode);
        InitialDataSpec {
            eta: self.eta.unwrap_or(d.eta),
            theta: self.theta.unwrap_or(d.theta),
            alpha: self.alpha.unwrap_or(d.alpha),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            bound_fraction: self.bound_fraction.unwrap_or(d.bound_fraction),
            transverse_fraction: self.transverse_fraction.unwrap_or(d.transverse_fraction),
            signs: self.signs.clone().unwrap_or(d.signs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructureOptions {
    /// Random states for the identity checks.
    pub samples: usize,
    /// Random states for biorthogonality and eigen-residuals.
    pub frame_samples: usize,
    /// η values for the Sobolev ratio comparison.
    pub sobolev_etas: Vec<f64>,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions { samples: 500, frame_samples: 1000, sobolev_etas: vec![0.1, 0.01] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    /// Stop early at this time (no shock report beyond it).
    pub stop_at: Option<f64>,
    /// Profile dumps at these fractions of 1/(|c₁₁(0)|·W₀).
    pub profile_fractions: Vec<f64>,
    /// Time of the ∂z ρ₁ decomposition check as a fraction of T*.
    pub rhod_fraction: f64,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions { stop_at: None, profile_fractions: vec![0.0, 0.25, 0.5, 0.75], rhod_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareOptions {
    /// Comparison time as a fraction of T*.
    pub fraction: f64,
    /// Shock time to use; found by a full run when absent.
    pub t_star: Option<f64>,
    /// Cells per η of the refinement levels, coarse to fine.
    pub levels: Vec<f64>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { fraction: 0.5, t_star: None, levels: vec![100.0, 200.0, 400.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub etas: Vec<f64>,
    /// η whose W₀ the held-amplitude runs reproduce.
    pub reference_eta: f64,
    /// Also run every η at the sweep θ (W₀ drifting with η).
    pub fixed_theta: bool,
    /// Sweep θ as a fraction of the data θ. Φ₀ grows roughly like W₀·η, so
    /// the default data θ leaves the amplitude ball at η = 0.2.
    pub theta_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { etas: vec![0.2, 0.1, 0.05], reference_eta: 0.2, fixed_theta: true, theta_fraction: 0.8 }
    }
}

/// Scalar model data: W₁⁰ = a1·b((y − 0.5)/0.5), W₂⁰ = a2·b((y − 3)/1) with
/// b(s) = (1 − s²)⁴ on |s| < 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleWaveOptions {
    pub a1: f64,
    pub a2: f64,
    /// Foot of the 2-characteristic.
    pub y2: f64,
    /// Label spacing and count of the characteristic net.
    pub h: f64,
    pub n: usize,
    /// Slope threshold 1/tol marking numeric blow-up.
    pub tol: f64,
    /// Step for tracing characteristics through simple waves.
    pub dt: f64,
    pub trace_time: f64,
}

impl Default for SingleWaveOptions {
    fn default() -> Self {
        SingleWaveOptions { a1: 0.3, a2: 0.2, y2: 0.3, h: 0.005, n: 1600, tol: 1e-4, dt: 1e-4, trace_time: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub material: MaterialSpec,
    pub dim_mode: Dim,
    pub data: DataSpec,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    /// Seed of every random sample drawn by the run.
    pub seed: u64,
    pub structure: StructureOptions,
    pub simulate: SimulateOptions,
    pub compare: CompareOptions,
    pub sweep: SweepOptions,
    pub single_wave: SingleWaveOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            material: MaterialSpec::default(),
            dim_mode: Dim::Three,
            data: DataSpec::default(),
            solver: SolverConfig::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            structure: StructureOptions::default(),
            simulate: SimulateOptions::default(),
            compare: CompareOptions::default(),
            sweep: SweepOptions::default(),
            single_wave: SingleWaveOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path.is_empty() { "." } else { &path }, e.inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn material(&self) -> Result<MaterialParams, CliError> {
        let mode = self.dim_mode.mode();
        let p = match &self.material {
            MaterialSpec::Direct { c1, c2, sigma0, sigma1, delta } => {
                MaterialParams::new(*c1, *c2, *sigma0, *sigma1, mode, *delta)
            }
            MaterialSpec::StoredEnergy { coeffs, delta } => sigma_from_gamma(coeffs, mode, *delta),
        };
        let p = p.map_err(|e| CliError::config("material", e.to_string()))?;
        if !(p.c11_at_zero() < 0.0) {
            return Err(CliError::config(
                "material",
                format!("c11(0) = {} must be negative (sign convention)", p.c11_at_zero()),
            ));
        }
        elastic_coupling::validate_sign_convention(&p, 200)
            .map_err(|e| CliError::config("material", e.to_string()))?;
        Ok(p)
    }

    pub fn data_spec(&self) -> Result<InitialDataSpec, CliError> {
        let spec = self.data.resolve(self.dim_mode.mode());
        spec.validate(self.dim_mode.mode()).map_err(|e| CliError::config("data", e.to_string()))?;
        Ok(spec)
    }

    /// Checks every sub-configuration the selected mode reads.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        self.material()?;
        self.data_spec()?;
        self.solver.validate().map_err(|e| CliError::config("solver", e.to_string()))?;
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(path, format!("must be positive, got {v}")))
            }
        };
        match mode {
            Mode::VerifyStructure => {
                if self.structure.samples == 0 || self.structure.frame_samples == 0 {
                    return Err(CliError::config("structure", "sample counts must be positive"));
                }
                for (k, &e) in self.structure.sobolev_etas.iter().enumerate() {
                    if !(e > 0.0 && e <= 1.0) {
                        return Err(CliError::config(format!("structure.sobolev_etas[{k}]"), "must lie in (0, 1]"));
                    }
                }
            }
            Mode::Simulate => {
                if let Some(t) = self.simulate.stop_at {
                    positive("simulate.stop_at", t)?;
                }
                for (k, &f) in self.simulate.profile_fractions.iter().enumerate() {
                    if !(f >= 0.0 && f.is_finite()) {
                        return Err(CliError::config(format!("simulate.profile_fractions[{k}]"), "must be >= 0"));
                    }
                }
                if !(self.simulate.rhod_fraction > 0.0 && self.simulate.rhod_fraction < 1.0) {
                    return Err(CliError::config("simulate.rhod_fraction", "must lie in (0, 1)"));
                }
            }
            Mode::CompareOracle => {
                if !(self.compare.fraction > 0.0 && self.compare.fraction < 1.0) {
                    return Err(CliError::config("compare.fraction", "must lie in (0, 1)"));
                }
                if let Some(t) = self.compare.t_star {
                    positive("compare.t_star", t)?;
                }
                if self.compare.levels.is_empty() || self.compare.levels.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(CliError::config("compare.levels", "must be non-empty and increasing"));
                }
                for (k, &l) in self.compare.levels.iter().enumerate() {
                    if l < 20.0 {
                        return Err(CliError::config(format!("compare.levels[{k}]"), "must be >= 20"));
                    }
                }
            }
            Mode::SweepEta => {
                positive("sweep.theta_fraction", self.sweep.theta_fraction)?;
                if self.sweep.etas.is_empty() {
                    return Err(CliError::config("sweep.etas", "must be non-empty"));
                }
                for (k, &e) in self.sweep.etas.iter().chain([&self.sweep.reference_eta]).enumerate() {
                    if !(e > 0.0 && e < 1.0) {
                        let path = if k < self.sweep.etas.len() {
                            format!("sweep.etas[{k}]")
                        } else {
                            "sweep.reference_eta".into()
                        };
                        return Err(CliError::config(path, "must lie in (0, 1)"));
                    }
                }
            }
            Mode::SingleWave => {
                let s = &self.single_wave;
                positive("single_wave.h", s.h)?;
                positive("single_wave.tol", s.tol)?;
                positive("single_wave.dt", s.dt)?;
                positive("single_wave.trace_time", s.trace_time)?;
                if s.n < 4 {
                    return Err(CliError::config("single_wave.n", "must be >= 4"));
                }
                // Keeps 1 + 3(W₂ − W₁)/2 positive everywhere.
                if !(s.a1 > 0.0 && 1.0 - 1.5 * (s.a1 + s.a2.abs()) > 0.0) {
                    return Err(CliError::config("single_wave", "need a1 > 0 and a1 + |a2| < 2/3"));
                }
            }
        }
        Ok(())
    }
}
