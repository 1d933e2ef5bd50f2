//! Random network drops: geometry, large-scale fading and user association.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::partitions::MAX_USERS;
use crate::{Error, Result, SeedStream};

/// Speed of light [m/s].
pub const SPEED_OF_LIGHT: f64 = 3e8;
/// Links shorter than this are evaluated at this distance.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Antenna configuration of a symmetric `(N × M, d)^K` network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Antennas {
    /// BS antennas `M`.
    pub bs: usize,
    /// MS antennas `N`.
    pub ms: usize,
    /// Streams per user `d`.
    pub streams: usize,
}

impl Antennas {
    /// `(ms × bs, streams)`.
    pub const fn new(ms: usize, bs: usize, streams: usize) -> Self {
        Self { bs, ms, streams }
    }
}

/// Physical and dimensional parameters of a scenario.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    /// Number of BS/MS pairs `K`.
    pub num_users: usize,
    /// BS antennas `M`.
    pub bs_antennas: usize,
    /// MS antennas `N`.
    pub ms_antennas: usize,
    /// Streams per user `d`.
    pub streams: usize,
    /// Transmit power per BS [dBm].
    pub tx_power_dbm: f64,
    /// Carrier frequency [Hz].
    pub carrier_freq_hz: f64,
    /// System bandwidth [Hz]; also the noise bandwidth.
    pub system_bandwidth_hz: f64,
    /// Coherence bandwidth [Hz].
    pub coherence_bandwidth_hz: f64,
    /// Noise power spectral density [dBm/Hz].
    pub noise_psd_dbm_hz: f64,
    /// Receiver noise figure [dB].
    pub noise_figure_db: f64,
    /// Log-normal shadowing standard deviation [dB].
    pub shadow_std_db: f64,
    /// Apothem of the equivalent hexagonal cell [m].
    pub cell_apothem_m: f64,
    /// MS speed [km/h]; zero means a static channel.
    pub ms_speed_kmh: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_users: 8,
            bs_antennas: 4,
            ms_antennas: 2,
            streams: 1,
            tx_power_dbm: 18.2,
            carrier_freq_hz: 2e9,
            system_bandwidth_hz: 10e6,
            coherence_bandwidth_hz: 300e3,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            shadow_std_db: 8.0,
            cell_apothem_m: 250.0,
            ms_speed_kmh: 30.0,
        }
    }
}

impl ScenarioConfig {
    /// Default parameters for an `(ms × bs, 1)^num_users` network.
    pub fn symmetric(num_users: usize, ms_antennas: usize, bs_antennas: usize) -> Self {
        Self {
            num_users,
            ms_antennas,
            bs_antennas,
            ..Self::default()
        }
    }

    /// Antenna triple.
    pub fn antennas(&self) -> Antennas {
        Antennas::new(self.ms_antennas, self.bs_antennas, self.streams)
    }

    /// Check the scenario invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Config(msg));
        if self.num_users == 0 || self.num_users > MAX_USERS {
            return fail(format!(
                "num_users must be in 1..={MAX_USERS}, got {}",
                self.num_users
            ));
        }
        if self.streams != 1 {
            return fail(format!(
                "only single-stream users are supported, got d = {}",
                self.streams
            ));
        }
        if self.ms_antennas == 0 || self.bs_antennas < self.ms_antennas {
            return fail(format!(
                "need 1 <= N <= M, got N = {}, M = {}",
                self.ms_antennas, self.bs_antennas
            ));
        }
        let reals = [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
            ("noise_figure_db", self.noise_figure_db),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("system_bandwidth_hz", self.system_bandwidth_hz),
            ("coherence_bandwidth_hz", self.coherence_bandwidth_hz),
            ("cell_apothem_m", self.cell_apothem_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if self.coherence_bandwidth_hz > self.system_bandwidth_hz {
            return fail("coherence bandwidth exceeds system bandwidth".into());
        }
        if !(self.shadow_std_db.is_finite() && self.shadow_std_db >= 0.0) {
            return fail(format!("shadow_std_db must be >= 0, got {}", self.shadow_std_db));
        }
        if !(self.ms_speed_kmh.is_finite() && self.ms_speed_kmh >= 0.0) {
            return fail(format!("ms_speed_kmh must be >= 0, got {}", self.ms_speed_kmh));
        }
        Ok(())
    }

    /// Coherence block length for this scenario's speed.
    pub fn coherence_block(&self) -> CoherenceBlock {
        coherence_block_length(
            self.ms_speed_kmh,
            self.carrier_freq_hz,
            self.coherence_bandwidth_hz,
        )
    }

    /// Per-BS transmit power [W].
    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    /// Receiver noise power [W].
    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(noise_power_dbm(self))
    }
}

/// Coherence block length `L_coh = T_c W_c` in symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceBlock {
    /// Finite block of the given length.
    Finite(f64),
    /// Static channel: CSI never needs to be re-acquired.
    Infinite,
}

impl CoherenceBlock {
    /// Length in symbols, `+∞` for a static channel.
    pub fn symbols(&self) -> f64 {
        match *self {
            CoherenceBlock::Finite(l) => l,
            CoherenceBlock::Infinite => f64::INFINITY,
        }
    }
}

/// `10^((dBm - 30)/10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Side of the square whose area is `num_users` hexagonal cells of the
/// given apothem (a hexagon with apothem `a` covers `2√3·a²`).
pub fn deployment_square_side(num_users: usize, apothem_m: f64) -> Result<f64> {
    if num_users == 0 {
        return Err(Error::Config("deployment needs at least one cell".into()));
    }
    if !(apothem_m.is_finite() && apothem_m > 0.0) {
        return Err(Error::Config(format!(
            "apothem must be positive, got {apothem_m}"
        )));
    }
    let hexagon = 2.0 * libm::sqrt(3.0) * apothem_m * apothem_m;
    Ok(libm::sqrt(num_users as f64 * hexagon))
}

/// Macro-cell pathloss `15.3 + 37.6·log10(d)` [dB] with `d` in meters,
/// clamped below at 1 m.
pub fn pathloss_db(distance_m: f64) -> f64 {
    let d = if distance_m.is_nan() {
        MIN_DISTANCE_M
    } else {
        distance_m.max(MIN_DISTANCE_M)
    };
    15.3 + 37.6 * libm::log10(d)
}

/// Linear average channel gain for a link with the given shadowing [dB].
pub fn link_gain(distance_m: f64, shadow_db: f64) -> f64 {
    libm::pow(10.0, -(pathloss_db(distance_m) + shadow_db) / 10.0)
}

/// Thermal noise plus noise figure over the system bandwidth [dBm].
pub fn noise_power_dbm(config: &ScenarioConfig) -> f64 {
    config.noise_psd_dbm_hz + 10.0 * libm::log10(config.system_bandwidth_hz) + config.noise_figure_db
}

/// `L_coh = T_c·W_c` with `T_c = c / (2 v f_c)`.
///
/// A zero speed gives [`CoherenceBlock::Infinite`].
pub fn coherence_block_length(speed_kmh: f64, carrier_freq_hz: f64, coherence_bw_hz: f64) -> CoherenceBlock {
    if speed_kmh <= 0.0 {
        return CoherenceBlock::Infinite;
    }
    // v [m/s] = 10·speed/36; grouping keeps the common anchors exact.
    let length = SPEED_OF_LIGHT * coherence_bw_hz * 36.0 / (20.0 * speed_kmh * carrier_freq_hz);
    CoherenceBlock::Finite(length)
}

/// Dense square matrix of linear gains, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl GainMatrix {
    /// Build from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Config(format!(
                    "gain matrix row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// `dim × dim` matrix filled from `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Side length.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(row, col)`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    /// One row.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// Multiply every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|g| g * factor).collect(),
        }
    }
}

/// Greedy one-to-one association on a gain matrix indexed `[ms][bs]`.
///
/// Repeatedly picks the largest remaining entry, pairs that MS with that BS
/// and removes both. Ties go to the lexicographically smallest `(ms, bs)`.
/// Returns `assoc` with `assoc[bs] = ms`.
pub fn greedy_associate(gains: &GainMatrix) -> Vec<usize> {
    let n = gains.dim();
    let mut ms_free = alloc::vec![true; n];
    let mut bs_free = alloc::vec![true; n];
    let mut assoc = alloc::vec![usize::MAX; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize, f64)> = None;
        for (ms, _) in ms_free.iter().enumerate().filter(|(_, free)| **free) {
            for (bs, _) in bs_free.iter().enumerate().filter(|(_, free)| **free) {
                let g = gains.get(ms, bs);
                if best.is_none_or(|(_, _, b)| g > b) {
                    best = Some((ms, bs, g));
                }
            }
        }
        let (ms, bs, _) = best.expect("a free pair remains");
        ms_free[ms] = false;
        bs_free[bs] = false;
        assoc[bs] = ms;
    }
    assoc
}

/// A 2-D point in meters.
pub type Point = [f64; 2];

fn distance(a: Point, b: Point) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

/// One drop of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    /// BS positions; BS `k` serves user `k`.
    pub bs_positions: Vec<Point>,
    /// MS positions in drop order.
    pub ms_positions: Vec<Point>,
    /// `association[k]` is the index into `ms_positions` of the MS served by BS `k`.
    pub association: Vec<usize>,
    /// `gamma[k][l]`: average gain from BS `l` to the MS of user `k`.
    pub gamma: GainMatrix,
    /// Receiver noise power σ² [W].
    pub noise_power_w: f64,
    /// Transmit power per BS [W].
    pub tx_power_w: f64,
}

impl Network {
    /// Assemble a drop from explicit positions and per-link shadowing
    /// (`shadow_db[ms][bs]`), running the greedy association.
    pub fn from_layout(
        config: &ScenarioConfig,
        bs_positions: Vec<Point>,
        ms_positions: Vec<Point>,
        shadow_db: &GainMatrix,
    ) -> Result<Self> {
        let k = bs_positions.len();
        if ms_positions.len() != k || shadow_db.dim() != k {
            return Err(Error::Config(format!(
                "layout sizes disagree: {} BSs, {} MSs, shadowing {}x{}",
                k,
                ms_positions.len(),
                shadow_db.dim(),
                shadow_db.dim()
            )));
        }
        let raw = GainMatrix::from_fn(k, |ms, bs| {
            link_gain(
                distance(ms_positions[ms], bs_positions[bs]),
                shadow_db.get(ms, bs),
            )
        });
        let association = greedy_associate(&raw);
        let gamma = GainMatrix::from_fn(k, |user, bs| raw.get(association[user], bs));
        Ok(Self {
            bs_positions,
            ms_positions,
            association,
            gamma,
            noise_power_w: config.noise_power_w(),
            tx_power_w: config.tx_power_w(),
        })
    }

    /// Number of users.
    pub fn num_users(&self) -> usize {
        self.bs_positions.len()
    }

    /// Position of the MS served by user `k`.
    pub fn served_ms(&self, k: usize) -> Point {
        self.ms_positions[self.association[k]]
    }
}

/// Draw a network: BSs and MSs uniform on the deployment square, i.i.d.
/// log-normal shadowing per link, greedy association.
pub fn generate_network(config: &ScenarioConfig, seed: SeedStream) -> Result<Network> {
    config.validate()?;
    let k = config.num_users;
    let side = deployment_square_side(k, config.cell_apothem_m)?;
    let mut rng = seed.rng();
    let point = |rng: &mut rand_chacha::ChaCha8Rng| -> Point {
        [rng.random::<f64>() * side, rng.random::<f64>() * side]
    };
    let bs: Vec<Point> = (0..k).map(|_| point(&mut rng)).collect();
    let ms: Vec<Point> = (0..k).map(|_| point(&mut rng)).collect();
    let shadow = if config.shadow_std_db > 0.0 {
        let normal = Normal::new(0.0, config.shadow_std_db)
            .map_err(|e| Error::Config(format!("shadowing distribution: {e}")))?;
        GainMatrix::from_fn(k, |_, _| normal.sample(&mut rng))
    } else {
        GainMatrix::from_fn(k, |_, _| 0.0)
    };
    Network::from_layout(config, bs, ms, &shadow)
}
