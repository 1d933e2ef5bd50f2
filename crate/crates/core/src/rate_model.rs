//! Long-term throughput model for clustered interference alignment.
//!
//! Inside a coalition interference is aligned away; interference from
//! other coalitions is treated as noise. With single-antenna-equivalent
//! Rayleigh effective channels the ergodic per-stream rate has the closed
//! form `e^{1/ρ} E1(1/ρ)` nats, and CSI acquisition inside each coalition
//! costs symbols out of every coherence block, scaling all rates by a common
//! pre-log factor `α(S)`.
//!
//! Rates are reported in bits per channel use.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LOG2_E;

use crate::network::{Antennas, CoherenceBlock, GainMatrix, Network, ScenarioConfig};
use crate::partitions::{Coalition, CoalitionStructure};
use crate::specfun::exp_scaled_e1;
use crate::{Error, Result};

/// How a pre-log below zero is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PrelogMode {
    /// `max(0, α)`: the overhead can at most consume the whole block.
    #[default]
    Clamped,
    /// Raw `α = 1 - ΣL/L_coh`, negative when the overhead exceeds the block.
    Signed,
}

/// Whether interference alignment is feasible for a coalition of `size`
/// users in a symmetric `(N × M, d)` interference channel:
/// `d ≤ min(M, N)` and `(size + 1)·d ≤ M + N`.
pub fn ia_feasible(size: usize, antennas: Antennas) -> bool {
    let Antennas { bs, ms, streams } = antennas;
    size >= 1 && streams >= 1 && streams <= bs.min(ms) && (size + 1) * streams <= bs + ms
}

/// Symbols spent on CSI acquisition by a coalition of `size` users:
/// DL training `cM`, UL training `cN`, analog feedback `c²M` and effective
/// channel training `cd`.
pub fn csi_overhead_symbols(size: usize, antennas: Antennas) -> u64 {
    let c = size as u64;
    let (m, n, d) = (antennas.bs as u64, antennas.ms as u64, antennas.streams as u64);
    c * m + c * n + c * c * m + c * d
}

/// Ergodic rate `d·e^{1/ρ}E1(1/ρ)` in bits for per-stream SNR `rho`.
pub fn longterm_se_from_snr(rho: f64, streams: usize) -> f64 {
    if rho.is_nan() || rho <= 0.0 {
        return 0.0;
    }
    let inv = 1.0 / rho;
    if !inv.is_finite() {
        return 0.0;
    }
    let nats = exp_scaled_e1(inv).expect("1/ρ is finite and positive");
    streams as f64 * nats * LOG2_E
}

/// Statistical CSI and dimensions needed to evaluate the model.
#[derive(Debug, Clone, PartialEq)]
pub struct RateContext {
    gamma: GainMatrix,
    tx_power_w: f64,
    noise_power_w: f64,
    antennas: Antennas,
    coherence: CoherenceBlock,
}

/// Per-user throughputs of one coalition structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    /// `t_k(S)` in bits per channel use.
    pub per_user: Vec<f64>,
    /// `α(S)` as used for `per_user`.
    pub prelog: f64,
    /// IA feasibility of each coalition, in canonical block order.
    pub feasible: Vec<bool>,
    /// `Σ_k t_k(S)`.
    pub sum: f64,
}

impl ThroughputReport {
    /// Sum throughput in nats per channel use.
    pub fn sum_nats(&self) -> f64 {
        self.sum / LOG2_E
    }
}

impl RateContext {
    /// Validate and build.
    pub fn new(
        gamma: GainMatrix,
        tx_power_w: f64,
        noise_power_w: f64,
        antennas: Antennas,
        coherence: CoherenceBlock,
    ) -> Result<Self> {
        let k = gamma.dim();
        if k == 0 || k > crate::partitions::MAX_USERS {
            return Err(Error::Config(format!("gain matrix dimension {k} unsupported")));
        }
        for r in 0..k {
            if gamma.row(r).iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::Config(format!(
                    "gains of user {} must be finite and >= 0",
                    r + 1
                )));
            }
            if gamma.get(r, r).is_nan() || gamma.get(r, r) <= 0.0 {
                return Err(Error::Config(format!(
                    "direct gain of user {} must be positive",
                    r + 1
                )));
            }
        }
        if !(tx_power_w.is_finite() && tx_power_w > 0.0 && noise_power_w.is_finite() && noise_power_w > 0.0) {
            return Err(Error::Config("powers must be finite and positive".into()));
        }
        if antennas.streams == 0 || antennas.bs == 0 || antennas.ms == 0 {
            return Err(Error::Config("antenna and stream counts must be positive".into()));
        }
        if let CoherenceBlock::Finite(l) = coherence {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config(format!(
                    "coherence block length must be positive, got {l}"
                )));
            }
        }
        Ok(Self {
            gamma,
            tx_power_w,
            noise_power_w,
            antennas,
            coherence,
        })
    }

    /// Context for one network drop under a scenario.
    pub fn from_network(network: &Network, config: &ScenarioConfig) -> Result<Self> {
        Self::new(
            network.gamma.clone(),
            network.tx_power_w,
            network.noise_power_w,
            config.antennas(),
            config.coherence_block(),
        )
    }

    /// Number of users `K`.
    pub fn num_users(&self) -> usize {
        self.gamma.dim()
    }

    /// Large-scale gains.
    pub fn gamma(&self) -> &GainMatrix {
        &self.gamma
    }

    /// Antenna configuration.
    pub fn antennas(&self) -> Antennas {
        self.antennas
    }

    /// Coherence block.
    pub fn coherence(&self) -> CoherenceBlock {
        self.coherence
    }

    /// Transmit power [W].
    pub fn tx_power_w(&self) -> f64 {
        self.tx_power_w
    }

    /// Noise power [W].
    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    /// Same context with a different coherence block.
    pub fn with_coherence(&self, coherence: CoherenceBlock) -> Self {
        Self {
            coherence,
            ..self.clone()
        }
    }

    /// Same context with gains and noise multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            gamma: self.gamma.scaled(factor),
            noise_power_w: self.noise_power_w * factor,
            ..self.clone()
        }
    }

    /// Per-stream SNR of `user` when its coalition is `coalition`:
    /// `γ_kk P/d / (Σ_{l∉C} γ_kl P + σ²)`.
    pub fn snr_in(&self, coalition: Coalition, user: usize) -> f64 {
        let row = self.gamma.row(user);
        let interference: f64 = row
            .iter()
            .enumerate()
            .filter(|(l, _)| !coalition.contains(*l))
            .map(|(_, g)| g * self.tx_power_w)
            .sum();
        let signal = row[user] * self.tx_power_w / self.antennas.streams as f64;
        signal / (interference + self.noise_power_w)
    }

    /// `ρ_k(S)`.
    pub fn per_stream_snr(&self, structure: &CoalitionStructure, user: usize) -> Result<f64> {
        Ok(self.snr_in(structure.coalition_of(user)?, user))
    }

    /// `r_k(S)` in bits per channel use.
    pub fn longterm_se(&self, structure: &CoalitionStructure, user: usize) -> Result<f64> {
        Ok(longterm_se_from_snr(
            self.per_stream_snr(structure, user)?,
            self.antennas.streams,
        ))
    }

    /// Total CSI acquisition symbols of a structure.
    pub fn total_overhead(&self, structure: &CoalitionStructure) -> u64 {
        structure
            .blocks()
            .iter()
            .map(|b| csi_overhead_symbols(b.len(), self.antennas))
            .sum()
    }

    /// Raw pre-log `1 - ΣL/L_coh` (may be negative).
    pub fn signed_prelog(&self, structure: &CoalitionStructure) -> f64 {
        match self.coherence {
            CoherenceBlock::Infinite => 1.0,
            CoherenceBlock::Finite(l) => 1.0 - self.total_overhead(structure) as f64 / l,
        }
    }

    /// `α(S) = max(0, 1 - ΣL/L_coh)`.
    pub fn prelog(&self, structure: &CoalitionStructure) -> f64 {
        self.signed_prelog(structure).max(0.0)
    }

    fn prelog_with(&self, structure: &CoalitionStructure, mode: PrelogMode) -> f64 {
        match mode {
            PrelogMode::Clamped => self.prelog(structure),
            PrelogMode::Signed => self.signed_prelog(structure),
        }
    }

    /// `t_k(S)` for a single user.
    pub fn user_throughput(
        &self,
        structure: &CoalitionStructure,
        user: usize,
        mode: PrelogMode,
    ) -> Result<f64> {
        let coalition = structure.coalition_of(user)?;
        if !ia_feasible(coalition.len(), self.antennas) {
            return Ok(0.0);
        }
        let rate = longterm_se_from_snr(self.snr_in(coalition, user), self.antennas.streams);
        Ok(self.prelog_with(structure, mode) * rate)
    }

    /// Throughputs of every user under `structure`.
    pub fn throughput(&self, structure: &CoalitionStructure) -> Result<ThroughputReport> {
        self.throughput_with(structure, PrelogMode::Clamped)
    }

    /// Throughputs with an explicit pre-log convention.
    pub fn throughput_with(
        &self,
        structure: &CoalitionStructure,
        mode: PrelogMode,
    ) -> Result<ThroughputReport> {
        if structure.num_users() != self.num_users() {
            return Err(Error::Config(format!(
                "structure has {} users, context has {}",
                structure.num_users(),
                self.num_users()
            )));
        }
        let prelog = self.prelog_with(structure, mode);
        let mut per_user = alloc::vec![0.0; self.num_users()];
        let mut feasible = Vec::with_capacity(structure.num_coalitions());
        for &block in structure.blocks() {
            let ok = ia_feasible(block.len(), self.antennas);
            feasible.push(ok);
            if ok {
                for k in block.members() {
                    per_user[k] = prelog * longterm_se_from_snr(self.snr_in(block, k), self.antennas.streams);
                }
            }
        }
        let sum = per_user.iter().sum();
        Ok(ThroughputReport {
            per_user,
            prelog,
            feasible,
            sum,
        })
    }

    /// `Σ_k t_k(S)` with the clamped pre-log.
    pub fn sum_throughput(&self, structure: &CoalitionStructure) -> Result<f64> {
        Ok(self.throughput(structure)?.sum)
    }
}
