//! Seeded, reproducible simulation of schedule execution under realistic
//! effects: on/off switching costs, load-proportional power, heterogeneous
//! host power and access speed, and congestion-perturbed link rates.
//!
//! Randomness comes from ChaCha12 seeded with the configured 64-bit seed.
//! Streams keep draws independent of consumption order: stream 1 carries
//! host power draws (server first, then clients in caller order), stream 2
//! nominal access-speed draws, and stream `16 + h` the per-slot congestion
//! factors of scheduled host `h` (0 is the server, `i + 1` is client `i` in
//! scheduled order, one draw per slot the host is active in). Identical
//! config and seed therefore reproduce bit-identical reports, and sweep rows
//! may be computed in any order.
//!
//! Schedules are generated from the nominal uniform-capacity system; sampled
//! rates and congestion only perturb transfer timing. A transfer takes
//! `s / min(effective sender rate, effective receiver rate)` seconds, slots
//! act as barriers, and hosts are billed for their actual on-time within
//! each slot.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::Deserialize;
use thiserror::Error;

use crate::bounds;
use crate::energy::{EnergyModel, EnergyReport, FourStateFractions};
use crate::model::{HostId, HostSpec, Scheme, SpecError, SystemSpec};
use crate::rational;
use crate::schedulers::{self, ScheduleError, SchemeKind};

const POWER_STREAM: u64 = 1;
const RATE_STREAM: u64 = 2;
const CONGESTION_STREAM_BASE: u64 = 16;

/// Resolution of the simulated clock under perturbed rates: durations are
/// rounded up to multiples of 2^-24 s (about 60 ns). Keeping denominators
/// dyadic stops exact-rational timestamps from growing without bound over
/// long runs; with fixed rates and no congestion durations are already tame
/// and are kept exact.
const TIME_GRID_BITS: u32 = 24;

fn quantize_seconds_up(q: BigRational) -> BigRational {
    let scale = num::BigInt::from(1u64) << TIME_GRID_BITS;
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.ceil().to_integer(), scale)
}

/// 256 kB in bits, the fixed-block-size convention (kB = 1024 bytes).
pub const BLOCK_256KB_BITS: u64 = 256 * 1024 * 8;

/// Distribution of nominal host power.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerDist {
    Fixed(BigRational),
    Gaussian { mean: f64, std: f64 },
    Exponential { mean: f64 },
}

impl PowerDist {
    /// Nominal mean as an exact rational (used for block planning).
    pub fn mean(&self) -> BigRational {
        match self {
            PowerDist::Fixed(q) => q.clone(),
            PowerDist::Gaussian { mean, .. } | PowerDist::Exponential { mean } => {
                rational::from_f64(*mean).expect("finite mean")
            }
        }
    }
}

/// Distribution of nominal access speed (upload = download).
#[derive(Debug, Clone, PartialEq)]
pub enum RateDist {
    Fixed(u64),
    ExponentialNominal { mean_bps: f64 },
}

impl RateDist {
    /// Nominal rate used to build the (uniform-capacity) schedule.
    pub fn nominal_bps(&self) -> u64 {
        match self {
            RateDist::Fixed(u) => *u,
            RateDist::ExponentialNominal { mean_bps } => (mean_bps.round() as u64).max(1),
        }
    }
}

/// Per-slot multiplicative perturbation of link rates.
#[derive(Debug, Clone, PartialEq)]
pub enum Congestion {
    Off,
    /// Gaussian factor with mean 1.0; non-positive draws are resampled.
    GaussianFactor { std: f64 },
}

/// Full simulation configuration.
///
/// `delta_joules` (per-block energy, default 1) is a programmatic knob and
/// is not part of the flat config-file schema.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: SchemeKind,
    pub energy_model: EnergyModel,
    pub switch_seconds: BigRational,
    pub power_dist: PowerDist,
    pub rate_dist: RateDist,
    pub congestion: Congestion,
    pub seed: u64,
    pub n: u32,
    pub file_bits: u64,
    pub block_bits: u64,
    pub delta_joules: BigRational,
}

impl SimConfig {
    /// Homogeneous defaults: 80 W fixed power, 1 J per block, 10 Mbps fixed
    /// rates, no congestion, instantaneous switching, two-state model.
    pub fn new(scheme: SchemeKind, n: u32, file_bits: u64, block_bits: u64) -> Self {
        SimConfig {
            scheme,
            energy_model: EnergyModel::TwoState,
            switch_seconds: BigRational::zero(),
            power_dist: PowerDist::Fixed(rational::int(80)),
            rate_dist: RateDist::Fixed(10_000_000),
            congestion: Congestion::Off,
            seed: 42,
            n,
            file_bits,
            block_bits,
            delta_joules: rational::int(1),
        }
    }

    pub fn block_count(&self) -> u32 {
        (self.file_bits / self.block_bits) as u32
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::InvalidConfig("n must be positive".into()));
        }
        if self.block_bits == 0 || self.file_bits == 0 {
            return Err(SimError::InvalidConfig(
                "file_bits and block_bits must be positive".into(),
            ));
        }
        if !self.file_bits.is_multiple_of(self.block_bits) {
            return Err(SimError::InvalidConfig(format!(
                "block_bits {} does not divide file_bits {}",
                self.block_bits, self.file_bits
            )));
        }
        if self.switch_seconds.is_negative() {
            return Err(SimError::InvalidConfig(
                "switch_seconds must be nonnegative".into(),
            ));
        }
        match &self.power_dist {
            PowerDist::Fixed(q) if q.is_negative() => {
                return Err(SimError::InvalidConfig("fixed power must be >= 0".into()))
            }
            PowerDist::Gaussian { mean, std } if *mean <= 0.0 || *std < 0.0 => {
                return Err(SimError::InvalidConfig(
                    "gaussian power needs mean > 0 and std >= 0".into(),
                ))
            }
            PowerDist::Exponential { mean } if *mean <= 0.0 => {
                return Err(SimError::InvalidConfig(
                    "exponential power needs mean > 0".into(),
                ))
            }
            _ => {}
        }
        match &self.rate_dist {
            RateDist::Fixed(0) => {
                return Err(SimError::InvalidConfig("fixed rate must be positive".into()))
            }
            RateDist::ExponentialNominal { mean_bps } if *mean_bps <= 0.0 => {
                return Err(SimError::InvalidConfig(
                    "exponential rate needs mean > 0".into(),
                ))
            }
            _ => {}
        }
        if let Congestion::GaussianFactor { std } = self.congestion {
            if std < 0.0 {
                return Err(SimError::InvalidConfig(
                    "congestion std must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Parses the flat key = value configuration (TOML syntax). Recognized
    /// keys: scheme, energy_model, switch_seconds, power_dist, power_mean,
    /// power_std, rate_dist, rate_mean_bps, congestion_std, seed, n,
    /// file_bits, block_bits. Unknown keys are rejected.
    pub fn from_config_str(text: &str) -> Result<Self, SimError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            scheme: String,
            energy_model: Option<String>,
            switch_seconds: Option<f64>,
            power_dist: Option<String>,
            power_mean: Option<f64>,
            power_std: Option<f64>,
            rate_dist: Option<String>,
            rate_mean_bps: Option<f64>,
            congestion_std: Option<f64>,
            seed: Option<u64>,
            n: u32,
            file_bits: u64,
            block_bits: u64,
        }
        let raw: Raw =
            toml::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        let scheme: SchemeKind = raw.scheme.parse().map_err(SimError::InvalidConfig)?;
        let energy_model = match raw.energy_model.as_deref().unwrap_or("two_state") {
            "two_state" => EnergyModel::TwoState,
            "four_state" => EnergyModel::FourState(FourStateFractions::default()),
            other => {
                return Err(SimError::InvalidConfig(format!(
                    "unknown energy_model {other:?} (expected two_state or four_state)"
                )))
            }
        };
        let switch_seconds = raw.switch_seconds.unwrap_or(0.0);
        if !switch_seconds.is_finite() || switch_seconds < 0.0 {
            return Err(SimError::InvalidConfig(
                "switch_seconds must be finite and nonnegative".into(),
            ));
        }
        let power_mean = raw.power_mean.unwrap_or(80.0);
        let power_std = raw.power_std.unwrap_or(0.0);
        let power_dist = match raw.power_dist.as_deref().unwrap_or("fixed") {
            "fixed" => PowerDist::Fixed(
                rational::from_f64(power_mean)
                    .ok_or_else(|| SimError::InvalidConfig("power_mean must be finite".into()))?,
            ),
            "gaussian" => PowerDist::Gaussian {
                mean: power_mean,
                std: power_std,
            },
            "exponential" => PowerDist::Exponential { mean: power_mean },
            other => {
                return Err(SimError::InvalidConfig(format!(
                    "unknown power_dist {other:?} (expected fixed, gaussian or exponential)"
                )))
            }
        };
        let rate_mean = raw.rate_mean_bps.unwrap_or(10_000_000.0);
        let rate_dist = match raw.rate_dist.as_deref().unwrap_or("fixed") {
            "fixed" => RateDist::Fixed((rate_mean.round() as u64).max(1)),
            "exponential_nominal" => RateDist::ExponentialNominal {
                mean_bps: rate_mean,
            },
            other => {
                return Err(SimError::InvalidConfig(format!(
                    "unknown rate_dist {other:?} (expected fixed or exponential_nominal)"
                )))
            }
        };
        let congestion = match raw.congestion_std.unwrap_or(0.0) {
            0.0 => Congestion::Off,
            std if std > 0.0 && std.is_finite() => Congestion::GaussianFactor { std },
            _ => {
                return Err(SimError::InvalidConfig(
                    "congestion_std must be finite and nonnegative".into(),
                ))
            }
        };
        let config = SimConfig {
            scheme,
            energy_model,
            switch_seconds: rational::from_f64(switch_seconds).expect("finite"),
            power_dist,
            rate_dist,
            congestion,
            seed: raw.seed.unwrap_or(42),
            n: raw.n,
            file_bits: raw.file_bits,
            block_bits: raw.block_bits,
            delta_joules: rational::int(1),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Outcome of the stay-on versus power-cycle decision for one idle gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapDecision {
    StayOn,
    OffOn,
}

/// Decides whether a host rides out an idle gap powered on or cycles off
/// and back on. Staying on costs `P * gap`; a cycle costs `2 * P * alpha`
/// and only fits if the gap is at least `2 * alpha` long.
pub fn gap_policy(
    power_watts: &BigRational,
    switch_seconds: &BigRational,
    gap_seconds: &BigRational,
) -> GapDecision {
    let cost_on = power_watts * gap_seconds;
    let cost_offon = rational::int(2) * power_watts * switch_seconds;
    let two_alpha = rational::int(2) * switch_seconds;
    if cost_on <= cost_offon || gap_seconds < &two_alpha {
        GapDecision::StayOn
    } else {
        GapDecision::OffOn
    }
}

/// Simulation outcome: full energy report plus the switching breakdown and
/// per-host on-intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub energy: EnergyReport,
    /// Energy billed for transfer activity (power during on-time plus
    /// per-block energy).
    pub transfer_joules: BigRational,
    /// Energy billed for gaps ridden out powered on.
    pub idle_gap_joules: BigRational,
    /// Energy billed for on/off transitions.
    pub switch_joules: BigRational,
    /// Number of on/off transitions, including free ones when switching is
    /// instantaneous.
    pub switch_events: u64,
    /// Per-host on-intervals in seconds, keyed by caller-order host ids;
    /// one interval per active slot (not merged).
    pub on_intervals: BTreeMap<HostId, Vec<(BigRational, BigRational)>>,
    /// Simulated wall-clock duration of the distribution.
    pub wall_seconds: BigRational,
}

impl SimReport {
    pub const CSV_HEADER: &'static str = "scheme,n,beta,file_bits,model,total_j,makespan_slots,energy_per_bit_j,switch_events,switch_j,seed";

    pub fn csv_row(&self, config: &SimConfig) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            config.scheme,
            config.n,
            config.block_count(),
            config.file_bits,
            config.energy_model.label(),
            rational::to_f64(&self.energy.total_joules),
            self.energy.makespan_slots,
            rational::to_f64(&self.energy.energy_per_bit),
            self.switch_events,
            rational::to_f64(&self.switch_joules),
            config.seed,
        )
    }
}

fn positive_draw<D: Distribution<f64>>(rng: &mut ChaCha12Rng, dist: &D) -> f64 {
    loop {
        let v = dist.sample(rng);
        if v > 0.0 && v.is_finite() {
            return v;
        }
    }
}

/// Samples the host population for a config: power from the configured
/// distribution (server first, then clients in caller order) and nominal
/// access speed from the rate distribution, with upload = download.
/// Non-positive draws are resampled. Deterministic in `seed`.
pub fn sample_hosts(config: &SimConfig, seed: u64) -> Vec<HostSpec> {
    let count = config.n as usize + 1;
    let mut power_rng = ChaCha12Rng::seed_from_u64(seed);
    power_rng.set_stream(POWER_STREAM);
    let powers: Vec<BigRational> = match &config.power_dist {
        PowerDist::Fixed(q) => vec![q.clone(); count],
        PowerDist::Gaussian { mean, std } => {
            let dist = Normal::new(*mean, *std).expect("validated params");
            (0..count)
                .map(|_| rational::from_f64(positive_draw(&mut power_rng, &dist)).expect("finite"))
                .collect()
        }
        PowerDist::Exponential { mean } => {
            let dist = Exp::new(1.0 / mean).expect("validated params");
            (0..count)
                .map(|_| rational::from_f64(positive_draw(&mut power_rng, &dist)).expect("finite"))
                .collect()
        }
    };
    let mut rate_rng = ChaCha12Rng::seed_from_u64(seed);
    rate_rng.set_stream(RATE_STREAM);
    let rates: Vec<u64> = match &config.rate_dist {
        RateDist::Fixed(u) => vec![*u; count],
        RateDist::ExponentialNominal { mean_bps } => {
            let dist = Exp::new(1.0 / mean_bps).expect("validated params");
            (0..count)
                .map(|_| (positive_draw(&mut rate_rng, &dist).round() as u64).max(1))
                .collect()
        }
    };
    powers
        .into_iter()
        .zip(rates)
        .map(|(power, rate)| {
            HostSpec::from_rationals(
                power,
                config.delta_joules.clone(),
                config.switch_seconds.clone(),
                rate,
                rate,
            )
            .expect("sampled parameters are positive")
        })
        .collect()
}

struct HostActivity {
    slot: usize,
    start: BigRational,
    end: BigRational,
    uploads: bool,
    downloads: bool,
}

/// Runs one simulation: samples hosts, generates the schedule from the
/// nominal uniform-capacity system, executes it with per-transfer timing,
/// applies the gap policy, and accounts energy under the configured model.
pub fn simulate(config: &SimConfig) -> Result<SimReport, SimError> {
    config.validate()?;
    let sampled = sample_hosts(config, config.seed);
    let nominal = config.rate_dist.nominal_bps();
    let k = match config.scheme {
        SchemeKind::Alg4 => 2u64,
        _ => 1,
    };
    // Uniform-capacity system for schedule construction; sampled powers
    // drive host ordering and billing, sampled rates drive timing only.
    let mk = |h: &HostSpec| {
        HostSpec::from_rationals(
            h.power_watts.clone(),
            h.per_block_joules.clone(),
            h.switch_seconds.clone(),
            nominal,
            nominal * k,
        )
        .expect("positive nominal rate")
    };
    let server = mk(&sampled[0]);
    let clients: Vec<HostSpec> = sampled[1..].iter().map(mk).collect();
    let spec = SystemSpec::new(server, clients, config.file_bits, config.block_count())?;

    if config.scheme == SchemeKind::Parallel {
        return Ok(simulate_parallel(config, &spec, &sampled));
    }

    let scheme = match config.scheme {
        SchemeKind::Opt => schedulers::opt_schedule(&spec)?,
        SchemeKind::Alg4 => schedulers::alg4_schedule(&spec)?,
        SchemeKind::Serial => schedulers::serial_schedule(&spec),
        SchemeKind::Parallel => unreachable!(),
    };
    Ok(simulate_scheme(config, &spec, &sampled, &scheme))
}

/// Executes an already-built scheme under a config (shared by [`simulate`]
/// and tests that want a custom schedule).
pub fn simulate_scheme(
    config: &SimConfig,
    spec: &SystemSpec,
    sampled: &[HostSpec],
    scheme: &Scheme,
) -> SimReport {
    let hosts = spec.n() as usize + 1;
    let idx = |h: HostId| -> usize {
        match h {
            HostId::Server => 0,
            HostId::Client(i) => i as usize + 1,
        }
    };
    // Sampled rates in scheduled (internal) order.
    let rate_of: Vec<u64> = (0..hosts)
        .map(|j| {
            if j == 0 {
                sampled[0].upload_bps
            } else {
                sampled[spec.external_client(j as u32 - 1) as usize + 1].upload_bps
            }
        })
        .collect();
    let power_of: Vec<BigRational> = (0..hosts)
        .map(|j| {
            if j == 0 {
                spec.server().power_watts.clone()
            } else {
                spec.clients()[j - 1].power_watts.clone()
            }
        })
        .collect();

    let mut congestion_rngs: Vec<ChaCha12Rng> = (0..hosts)
        .map(|h| {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            rng.set_stream(CONGESTION_STREAM_BASE + h as u64);
            rng
        })
        .collect();
    let factor_dist = match config.congestion {
        Congestion::Off => None,
        Congestion::GaussianFactor { std } => {
            Some(Normal::new(1.0, std).expect("validated params"))
        }
    };

    let s_bits = rational::uint(spec.block_bits());
    let noisy_timing =
        factor_dist.is_some() || !matches!(config.rate_dist, RateDist::Fixed(_));
    let mut activity: Vec<Vec<HostActivity>> = (0..hosts).map(|_| Vec::new()).collect();
    let mut slot_start = BigRational::zero();
    for (ti, slot) in scheme.slots.iter().enumerate() {
        let mut ends: BTreeMap<usize, (BigRational, bool, bool)> = BTreeMap::new();
        let mut factors: BTreeMap<usize, BigRational> = BTreeMap::new();
        // One congestion draw per active host per slot, in host order.
        let active: std::collections::BTreeSet<usize> = slot
            .transfers
            .iter()
            .flat_map(|t| [idx(t.from), idx(t.to)])
            .collect();
        for &h in &active {
            let f = match &factor_dist {
                None => rational::int(1),
                Some(dist) => rational::from_f64(positive_draw(&mut congestion_rngs[h], dist))
                    .expect("finite"),
            };
            factors.insert(h, f);
        }
        let mut slot_end = slot_start.clone();
        for t in &slot.transfers {
            let (from, to) = (idx(t.from), idx(t.to));
            let up = rational::uint(rate_of[from]) * &factors[&from];
            let down = rational::uint(rate_of[to]) * &factors[&to];
            let rate = up.min(down);
            let mut duration = &s_bits / rate;
            if noisy_timing {
                duration = quantize_seconds_up(duration);
            }
            let end = &slot_start + duration;
            if end > slot_end {
                slot_end = end.clone();
            }
            for (h, uploads) in [(from, true), (to, false)] {
                let entry = ends
                    .entry(h)
                    .or_insert_with(|| (slot_start.clone(), false, false));
                if end > entry.0 {
                    entry.0 = end.clone();
                }
                if uploads {
                    entry.1 = true;
                } else {
                    entry.2 = true;
                }
            }
        }
        for (h, (end, uploads, downloads)) in ends {
            activity[h].push(HostActivity {
                slot: ti,
                start: slot_start.clone(),
                end,
                uploads,
                downloads,
            });
        }
        slot_start = slot_end;
    }
    let wall_seconds = slot_start;

    bill_activity(config, spec, scheme.makespan(), &power_of, activity, wall_seconds)
}

/// Billing shared by the slotted path: transfer energy per active host-slot,
/// then boundary switches and gap charges. Gap energy is attributed to the
/// slot the gap follows so per-slot values still sum to the total.
fn bill_activity(
    config: &SimConfig,
    spec: &SystemSpec,
    makespan: usize,
    power_of: &[BigRational],
    activity: Vec<Vec<HostActivity>>,
    wall_seconds: BigRational,
) -> SimReport {
    let hosts = activity.len();
    let alpha = &config.switch_seconds;
    let mut per_slot = vec![BigRational::zero(); makespan];
    let mut per_host = vec![BigRational::zero(); hosts];
    let mut transfer_joules = BigRational::zero();
    let mut idle_gap_joules = BigRational::zero();
    let mut switch_joules = BigRational::zero();
    let mut switch_events = 0u64;
    let mut on_intervals: BTreeMap<HostId, Vec<(BigRational, BigRational)>> = BTreeMap::new();

    for (h, acts) in activity.iter().enumerate() {
        if acts.is_empty() {
            continue;
        }
        let power = &power_of[h];
        let delta = &config.delta_joules;
        let host_id = if h == 0 {
            HostId::Server
        } else {
            spec.external_id(HostId::Client(h as u32 - 1))
        };
        let intervals = on_intervals.entry(host_id).or_default();
        for a in acts {
            let on_time = &a.end - &a.start;
            let power_part = match &config.energy_model {
                EnergyModel::TwoState => power * &on_time,
                EnergyModel::FourState(f) => {
                    let fraction = if a.uploads && a.downloads {
                        &f.duplex
                    } else {
                        &f.single
                    };
                    fraction * power * &on_time
                }
            };
            let contribution = power_part + delta;
            per_slot[a.slot] += &contribution;
            per_host[h] += &contribution;
            transfer_joules += contribution;
            intervals.push((a.start.clone(), a.end.clone()));
        }

        // Boundary: one power-on before first activity, one power-off after
        // the last.
        let switch_once = power * alpha;
        let first = acts.first().unwrap();
        let last = acts.last().unwrap();
        per_slot[first.slot] += &switch_once;
        per_slot[last.slot] += &switch_once;
        per_host[h] += &switch_once + &switch_once;
        switch_joules += &switch_once + &switch_once;
        switch_events += 2;

        for w in acts.windows(2) {
            let gap = &w[1].start - &w[0].end;
            if !gap.is_positive() {
                continue;
            }
            match gap_policy(power, alpha, &gap) {
                GapDecision::StayOn => {
                    let charge = match &config.energy_model {
                        EnergyModel::TwoState => power * &gap,
                        EnergyModel::FourState(f) => &f.idle * power * &gap,
                    };
                    per_slot[w[0].slot] += &charge;
                    per_host[h] += &charge;
                    idle_gap_joules += charge;
                }
                GapDecision::OffOn => {
                    per_slot[w[0].slot] += &switch_once;
                    per_slot[w[1].slot] += &switch_once;
                    per_host[h] += &switch_once + &switch_once;
                    switch_joules += &switch_once + &switch_once;
                    switch_events += 2;
                }
            }
        }
    }

    let total = per_host
        .iter()
        .fold(BigRational::zero(), |acc, v| acc + v);
    let delivered_bits = spec.n() as u128 * spec.file_bits() as u128;
    let energy_per_bit = &total / rational::uint128(delivered_bits);
    let per_host_joules = per_host
        .into_iter()
        .enumerate()
        .map(|(j, v)| {
            let id = if j == 0 {
                HostId::Server
            } else {
                spec.external_id(HostId::Client(j as u32 - 1))
            };
            (id, v)
        })
        .collect();

    SimReport {
        energy: EnergyReport {
            total_joules: total,
            per_host_joules,
            per_slot_joules: per_slot,
            makespan_slots: makespan,
            delivered_bits,
            energy_per_bit,
        },
        transfer_joules,
        idle_gap_joules,
        switch_joules,
        switch_events,
        on_intervals,
        wall_seconds,
    }
}

/// Continuous-time execution of the parallel baseline: the server splits its
/// effective upload capacity evenly over the clients; every host stays on
/// until its own stream (or, for the server, the last stream) finishes.
fn simulate_parallel(config: &SimConfig, spec: &SystemSpec, sampled: &[HostSpec]) -> SimReport {
    let n = spec.n() as usize;
    let hosts = n + 1;
    let mut factors: Vec<BigRational> = vec![rational::int(1); hosts];
    if let Congestion::GaussianFactor { std } = config.congestion {
        let dist = Normal::new(1.0, std).expect("validated params");
        for (h, f) in factors.iter_mut().enumerate() {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            rng.set_stream(CONGESTION_STREAM_BASE + h as u64);
            *f = rational::from_f64(positive_draw(&mut rng, &dist)).expect("finite");
        }
    }
    let rate_of = |h: usize| -> u64 {
        if h == 0 {
            sampled[0].upload_bps
        } else {
            sampled[spec.external_client(h as u32 - 1) as usize + 1].upload_bps
        }
    };
    let server_share =
        rational::uint(rate_of(0)) * &factors[0] / rational::uint(spec.n() as u64);
    let file = rational::uint(spec.file_bits());
    let beta = rational::uint(spec.block_count() as u64);
    let alpha = &config.switch_seconds;
    let delta = &config.delta_joules;

    let noisy_timing = !matches!(config.congestion, Congestion::Off)
        || !matches!(config.rate_dist, RateDist::Fixed(_));
    let mut per_host: Vec<BigRational> = vec![BigRational::zero(); hosts];
    let mut on_intervals: BTreeMap<HostId, Vec<(BigRational, BigRational)>> = BTreeMap::new();
    let mut ends: Vec<BigRational> = Vec::with_capacity(n);
    for (h, factor) in factors.iter().enumerate().skip(1) {
        let down = rational::uint(rate_of(h)) * factor;
        let rate = server_share.clone().min(down);
        let mut duration = &file / rate;
        if noisy_timing {
            duration = quantize_seconds_up(duration);
        }
        ends.push(duration);
    }
    let server_end = ends
        .iter()
        .cloned()
        .fold(BigRational::zero(), |acc, e| acc.max(e));

    let single = match &config.energy_model {
        EnergyModel::TwoState => rational::int(1),
        EnergyModel::FourState(f) => f.single.clone(),
    };
    let power_of = |h: usize| -> BigRational {
        if h == 0 {
            spec.server().power_watts.clone()
        } else {
            spec.clients()[h - 1].power_watts.clone()
        }
    };
    let external = |h: usize| -> HostId {
        if h == 0 {
            HostId::Server
        } else {
            spec.external_id(HostId::Client(h as u32 - 1))
        }
    };

    let mut transfer_joules = BigRational::zero();
    let mut switch_joules = BigRational::zero();
    let mut switch_events = 0u64;
    for h in 0..hosts {
        let on_time = if h == 0 {
            server_end.clone()
        } else {
            ends[h - 1].clone()
        };
        let served_received = if h == 0 {
            rational::uint(spec.n() as u64) * &beta
        } else {
            beta.clone()
        };
        let energy = &single * power_of(h) * &on_time + delta * served_received;
        transfer_joules += &energy;
        per_host[h] += energy;
        let switch_once = power_of(h) * alpha;
        per_host[h] += &switch_once + &switch_once;
        switch_joules += &switch_once + &switch_once;
        switch_events += 2;
        on_intervals.insert(external(h), vec![(BigRational::zero(), on_time)]);
    }

    let total = per_host
        .iter()
        .fold(BigRational::zero(), |acc, v| acc + v);
    let delivered_bits = spec.n() as u128 * spec.file_bits() as u128;
    let energy_per_bit = &total / rational::uint128(delivered_bits);
    let slots_exact = &server_end / spec.slot_seconds();
    let makespan: usize = slots_exact
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX);
    let per_slot = if makespan > 0 {
        let share = &total / rational::uint(makespan as u64);
        vec![share; makespan]
    } else {
        Vec::new()
    };
    let per_host_joules = per_host
        .into_iter()
        .enumerate()
        .map(|(h, v)| (external(h), v))
        .collect();

    SimReport {
        energy: EnergyReport {
            total_joules: total,
            per_host_joules,
            per_slot_joules: per_slot,
            makespan_slots: makespan,
            delivered_bits,
            energy_per_bit,
        },
        transfer_joules,
        idle_gap_joules: BigRational::zero(),
        switch_joules,
        switch_events,
        on_intervals,
        wall_seconds: server_end,
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// How to pick the block size for a given file size and host count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPolicy {
    /// 256 kB blocks; the file is padded up to a whole number of blocks.
    Fixed256kB,
    /// The energy-minimizing block count for the nominal parameters; the
    /// file is padded so the count divides it evenly.
    OptimalBeta,
}

impl BlockPolicy {
    /// Resolves `(padded_file_bits, block_bits)` for a file size under this
    /// policy.
    pub fn plan(&self, file_bits: u64, n: u32, config: &SimConfig) -> (u64, u64) {
        match self {
            BlockPolicy::Fixed256kB => {
                let blocks = file_bits.div_ceil(BLOCK_256KB_BITS).max(1);
                (blocks * BLOCK_256KB_BITS, BLOCK_256KB_BITS)
            }
            BlockPolicy::OptimalBeta => {
                let beta = bounds::optimal_block_count(
                    &config.power_dist.mean(),
                    file_bits,
                    config.rate_dist.nominal_bps(),
                    &config.delta_joules,
                    n,
                )
                .map(|r| r.beta)
                .unwrap_or(1)
                .max(1) as u64;
                let block_bits = file_bits.div_ceil(beta);
                (block_bits * beta, block_bits)
            }
        }
    }
}

/// One experiment axis for [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    FileSize(Vec<u64>),
    HostCount(Vec<u32>),
    SwitchSeconds(Vec<BigRational>),
    BlockPolicy(Vec<BlockPolicy>),
}

/// One sweep result row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub config: SimConfig,
    pub report: SimReport,
}

/// Runs one simulation per (axis value, seed), axis-major then seed, and
/// returns the rows in that order. The block policy re-derives the block
/// size whenever the axis changes the file size or host count.
pub fn sweep(
    base: &SimConfig,
    axis: &SweepAxis,
    policy: BlockPolicy,
    seeds: &[u64],
) -> Result<Vec<SweepRow>, SimError> {
    let mut rows = Vec::new();
    let mut run = |axis_name: &str, value: String, config: SimConfig| -> Result<(), SimError> {
        for &seed in seeds {
            let mut c = config.clone();
            c.seed = seed;
            let report = simulate(&c)?;
            rows.push(SweepRow {
                axis: axis_name.to_string(),
                value: value.clone(),
                config: c,
                report,
            });
        }
        Ok(())
    };
    match axis {
        SweepAxis::FileSize(sizes) => {
            for &size in sizes {
                let mut c = base.clone();
                let (file, block) = policy.plan(size, c.n, &c);
                c.file_bits = file;
                c.block_bits = block;
                run("file_bits", size.to_string(), c)?;
            }
        }
        SweepAxis::HostCount(counts) => {
            for &n in counts {
                let mut c = base.clone();
                c.n = n;
                let (file, block) = policy.plan(c.file_bits, n, &c);
                c.file_bits = file;
                c.block_bits = block;
                run("n", n.to_string(), c)?;
            }
        }
        SweepAxis::SwitchSeconds(alphas) => {
            for alpha in alphas {
                let mut c = base.clone();
                c.switch_seconds = alpha.clone();
                let (file, block) = policy.plan(c.file_bits, c.n, &c);
                c.file_bits = file;
                c.block_bits = block;
                run("switch_seconds", rational::to_f64(alpha).to_string(), c)?;
            }
        }
        SweepAxis::BlockPolicy(policies) => {
            for p in policies {
                let mut c = base.clone();
                let (file, block) = p.plan(c.file_bits, c.n, &c);
                c.file_bits = file;
                c.block_bits = block;
                let label = match p {
                    BlockPolicy::Fixed256kB => "fixed_256kB",
                    BlockPolicy::OptimalBeta => "optimal_beta",
                };
                run("block_policy", label.to_string(), c)?;
            }
        }
    }
    Ok(rows)
}

impl fmt::Display for BlockPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockPolicy::Fixed256kB => f.write_str("fixed_256kB"),
            BlockPolicy::OptimalBeta => f.write_str("optimal_beta"),
        }
    }
}
