//! Strict JSON config schemas for the subcommands. Unknown keys are
//! rejected everywhere so a typo cannot silently fall back to a default.

use serde::{Deserialize, Serialize};

use lindblad_core::{
    heisenberg_model, two_level_model, CollapseBasis, CoreError, IntegratorSpec, LindbladModel,
    MemoryBudget, Method, Spin, SpinChainSpec, TwoLevelSpec,
};

use crate::CliError;

fn default_budget() -> u64 {
    MemoryBudget::DEFAULT_BYTES
}

fn default_taylor_order() -> usize {
    10
}

fn default_burn_in() -> usize {
    10
}

fn default_thin() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    TwoLevel {
        energy: f64,
        rabi: f64,
        gamma: f64,
        hbar: f64,
    },
    Heisenberg {
        length: usize,
        coupling: f64,
        gamma: f64,
        hbar: f64,
    },
}

impl SystemConfig {
    pub fn build(&self, budget: MemoryBudget) -> Result<LindbladModel, CoreError> {
        match *self {
            SystemConfig::TwoLevel {
                energy,
                rabi,
                gamma,
                hbar,
            } => two_level_model(&TwoLevelSpec {
                energy,
                rabi,
                gamma,
                hbar,
            }),
            SystemConfig::Heisenberg {
                length,
                coupling,
                gamma,
                hbar,
            } => heisenberg_model(
                &SpinChainSpec {
                    length,
                    coupling,
                    gamma,
                    hbar,
                },
                budget,
            ),
        }
    }

    pub fn sites(&self) -> Option<usize> {
        match self {
            SystemConfig::TwoLevel { .. } => None,
            SystemConfig::Heisenberg { length, .. } => Some(*length),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    TaylorSeries,
    VectorizationFull,
    VectorizationTaylor,
    Rk4,
}

impl From<MethodConfig> for Method {
    fn from(m: MethodConfig) -> Method {
        match m {
            MethodConfig::TaylorSeries => Method::TaylorSeries,
            MethodConfig::VectorizationFull => Method::VectorizationFull,
            MethodConfig::VectorizationTaylor => Method::VectorizationTaylor,
            MethodConfig::Rk4 => Method::Rk4,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: MethodConfig,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_target: Option<f64>,
}

impl IntegratorConfig {
    pub fn to_spec(self) -> IntegratorSpec {
        IntegratorSpec {
            method: self.method.into(),
            dt: self.dt,
            order: self.order,
            error_target: self.error_target,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SpinConfig {
    Up,
    Down,
}

impl From<SpinConfig> for Spin {
    fn from(s: SpinConfig) -> Spin {
        match s {
            SpinConfig::Up => Spin::Up,
            SpinConfig::Down => Spin::Down,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateConfig {
    /// |1⟩⟨1| of the two-level system.
    Excited,
    /// Gibbs state e^{−βH}/Z of the system Hamiltonian.
    Thermal { beta: f64 },
    /// Alternating ↑↓↑↓… product state.
    Neel,
    /// Explicit spin pattern, site 0 first.
    Pattern(Vec<SpinConfig>),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CollapseBasisConfig {
    X,
    Y,
    Z,
}

impl Default for CollapseBasisConfig {
    fn default() -> Self {
        CollapseBasisConfig::X
    }
}

impl From<CollapseBasisConfig> for CollapseBasis {
    fn from(b: CollapseBasisConfig) -> CollapseBasis {
        match b {
            CollapseBasisConfig::X => CollapseBasis::X,
            CollapseBasisConfig::Y => CollapseBasis::Y,
            CollapseBasisConfig::Z => CollapseBasis::Z,
        }
    }
}

/// Config for `evolve`: one system, one integrator, one initial state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub integrator: IntegratorConfig,
    pub t_final: f64,
    pub sample_every: usize,
    pub initial_state: InitialStateConfig,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Density-matrix elements written to the CSV; defaults to the
    /// diagonal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<(usize, usize)>>,
}

/// Config for `compare`: two methods and a reference on a shared system.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub system: SystemConfig,
    pub initial_state: InitialStateConfig,
    pub t_final: f64,
    pub method_a: IntegratorConfig,
    pub method_b: IntegratorConfig,
    pub reference: IntegratorConfig,
    /// Output grid spacing; defaults to max(method dt values). Every
    /// integrator dt must divide it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// Config for `bench`: one-step timings over a chain-length sweep.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub methods: Vec<MethodConfig>,
    /// Chain lengths L to sweep; the benchmark system is the
    /// boundary-driven chain with dimension 2^L.
    pub sites: Vec<usize>,
    pub repeats: usize,
    pub dt: f64,
    /// Series order for the Taylor methods.
    pub order: usize,
    pub coupling: f64,
    pub gamma: f64,
    pub hbar: f64,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// Config for `traj`: ensemble unraveling against a deterministic
/// reference.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrajConfig {
    pub system: SystemConfig,
    pub initial_state: InitialStateConfig,
    pub t_final: f64,
    pub dt: f64,
    pub n_trajectories: usize,
    #[serde(default = "default_taylor_order")]
    pub taylor_order: usize,
    /// Thermal initial states are unraveled by the chain sampler with this
    /// burn-in.
    #[serde(default = "default_burn_in")]
    pub metts_burn_in: usize,
    /// Chain thinning for the thermal sampler; per-trajectory standard
    /// errors assume independent starts, so decorrelate when they matter.
    #[serde(default = "default_thin")]
    pub metts_thin: usize,
    #[serde(default)]
    pub collapse_basis: CollapseBasisConfig,
    /// Master-equation reference; defaults to the series method at the
    /// trajectory step with order 10.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<IntegratorConfig>,
    pub sample_every: usize,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<(usize, usize)>>,
}

/// Config for `metts`: thermal sampling checked against the dense Gibbs
/// state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MettsRunConfig {
    pub system: SystemConfig,
    pub beta: f64,
    pub n_samples: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default)]
    pub collapse_basis: CollapseBasisConfig,
    #[serde(default = "default_budget")]
    pub memory_budget_bytes: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// Parses a strict JSON config, reporting line and column on failure.
pub fn parse_config<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!(
            "config parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}
