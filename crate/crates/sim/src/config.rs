//! Experiment configuration and the built-in presets.
//!
//! Config files are TOML. Top-level keys mirror [`ExperimentConfig`]; the
//! `[scenario]` table mirrors [`ScenarioConfig`] (missing keys take their
//! defaults) and `[sweep]` names the swept variable and its grid:
//!
//! ```toml
//! master_seed = 1
//! num_drops = 500
//! methods = ["formation", "exhaustive", "grand", "singletons", "random", "kmeans"]
//! budgets = 8            # or one entry per user, e.g. [8, 8, 4, ...]
//!
//! [scenario]
//! num_users = 8
//! ms_antennas = 6
//! bs_antennas = 12
//!
//! [sweep]
//! variable = "speed_kmh"
//! values = [3.0, 10.0, 30.0, 60.0, 120.0, 250.0]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bsclust_core::partitions::ENUMERATION_CAP;
use bsclust_core::{MethodId, ScenarioConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{HarnessError, Result};

/// Scenario parameter varied along the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// MS speed [km/h]; changes the coherence block length.
    SpeedKmh,
    /// BS transmit power [dBm].
    TxPowerDbm,
}

impl SweepVariable {
    /// Column name used in output files.
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SpeedKmh => "speed_kmh",
            SweepVariable::TxPowerDbm => "tx_power_dbm",
        }
    }

    /// `base` with this variable set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut s = base.clone();
        match self {
            SweepVariable::SpeedKmh => s.ms_speed_kmh = value,
            SweepVariable::TxPowerDbm => s.tx_power_dbm = value,
        }
        s
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Swept variable and its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// Communication budgets for the formation game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Budgets {
    /// Same budget for every user.
    Scalar(u32),
    /// One budget per user.
    PerUser(Vec<u32>),
}

impl Budgets {
    /// Expand to one entry per user.
    pub fn per_user(&self, num_users: usize) -> Vec<u32> {
        match self {
            Budgets::Scalar(b) => vec![*b; num_users],
            Budgets::PerUser(v) => v.clone(),
        }
    }
}

fn default_seed() -> u64 {
    1
}

fn default_drops() -> usize {
    500
}

fn default_methods() -> Vec<MethodId> {
    MethodId::ALL.to_vec()
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// Independent network drops per sweep point.
    #[serde(default = "default_drops")]
    pub num_drops: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodId>,
    /// Formation budgets; defaults to `K` per user.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Budgets>,
    /// Shuffle the player order on every formation pass.
    #[serde(default)]
    pub shuffle_players: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    pub sweep: Sweep,
}

impl ExperimentConfig {
    /// Load from a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_owned(),
            source,
        })?;
        let config: Self = toml::from_str(&text).map_err(|source| HarnessError::Toml {
            path: path.to_owned(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    /// TOML text of this config.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the TOML form, hex encoded.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Budgets expanded per user.
    pub fn budgets_per_user(&self) -> Vec<u32> {
        let k = self.scenario.num_users;
        self.budgets
            .as_ref()
            .map_or_else(|| vec![k as u32; k], |b| b.per_user(k))
    }

    /// Reject configs that cannot run, before doing any work.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(HarnessError::Invalid(m));
        if self.num_drops == 0 {
            return invalid("num_drops must be at least 1".into());
        }
        if self.methods.is_empty() {
            return invalid("no methods selected".into());
        }
        let values = &self.sweep.values;
        if values.is_empty() {
            return invalid("sweep grid is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!(
                "sweep grid must be finite and strictly increasing: {values:?}"
            ));
        }
        for &v in values {
            self.sweep.variable.apply(&self.scenario, v).validate()?;
        }
        let k = self.scenario.num_users;
        if self.methods.contains(&MethodId::Exhaustive) && k > ENUMERATION_CAP {
            return invalid(format!(
                "exhaustive search supports at most {ENUMERATION_CAP} users, scenario has {k}"
            ));
        }
        let budgets = self.budgets_per_user();
        if budgets.len() != k || budgets.contains(&0) {
            return invalid(format!("need {k} positive budgets, got {budgets:?}"));
        }
        Ok(())
    }

    /// Methods deduplicated, in output order.
    pub fn methods_sorted(&self) -> Vec<MethodId> {
        let mut m = self.methods.clone();
        m.sort_unstable();
        m.dedup();
        m
    }
}

/// Built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `(6×12,1)^8`, MS speed sweep.
    A,
    /// `(2×4,1)^8` at 30 km/h, transmit power sweep.
    B,
    /// `(2×4,1)^16` at 30 km/h, transmit power sweep, no exhaustive search.
    C,
}

/// Transmit power grid for presets B and C [dBm].
pub const POWER_GRID_DBM: [f64; 9] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];
/// Speed grid for preset A [km/h].
pub const SPEED_GRID_KMH: [f64; 6] = [3.0, 10.0, 30.0, 60.0, 120.0, 250.0];

impl Preset {
    /// The preset's configuration.
    pub fn config(self) -> ExperimentConfig {
        let (scenario, sweep, methods) = match self {
            Preset::A => (
                ScenarioConfig::symmetric(8, 6, 12),
                Sweep {
                    variable: SweepVariable::SpeedKmh,
                    values: SPEED_GRID_KMH.to_vec(),
                },
                MethodId::ALL.to_vec(),
            ),
            Preset::B => (
                ScenarioConfig::symmetric(8, 2, 4),
                Sweep {
                    variable: SweepVariable::TxPowerDbm,
                    values: POWER_GRID_DBM.to_vec(),
                },
                MethodId::ALL.to_vec(),
            ),
            Preset::C => (
                ScenarioConfig::symmetric(16, 2, 4),
                Sweep {
                    variable: SweepVariable::TxPowerDbm,
                    values: POWER_GRID_DBM.to_vec(),
                },
                MethodId::ALL
                    .into_iter()
                    .filter(|&m| m != MethodId::Exhaustive)
                    .collect(),
            ),
        };
        ExperimentConfig {
            master_seed: default_seed(),
            num_drops: default_drops(),
            methods,
            budgets: None,
            shuffle_players: false,
            output_dir: None,
            scenario,
            sweep,
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Preset::A),
            "B" | "b" => Ok(Preset::B),
            "C" | "c" => Ok(Preset::C),
            other => Err(HarnessError::Invalid(format!(
                "unknown preset {other:?} (expected A, B or C)"
            ))),
        }
    }
}
