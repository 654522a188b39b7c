//! Exact energy accounting for schemes.
//!
//! Arithmetic is carried out on arbitrary-precision rationals built from the
//! input parameters; equality checks against closed-form bounds are exact,
//! and floating point only appears when a report is rendered.
//!
//! Unit conventions: `kB` is 1024 bytes (a 256 kB block is 2097152 bits) and
//! `Mbps` is 10^6 bits per second.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use num::Zero;
use thiserror::Error;

use crate::model::{HostId, HostSpec, Scheme, SlotSchedule, SystemSpec, ValidationReport};
use crate::rational;
use crate::schedulers::{ContinuousPlan, Role};
use crate::sim::{gap_policy, GapDecision};

/// Fractions of nominal power drawn in each active state of the four-state
/// model. `idle <= single <= duplex` and `duplex` is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FourStateFractions {
    pub idle: BigRational,
    pub single: BigRational,
    pub duplex: BigRational,
}

impl Default for FourStateFractions {
    fn default() -> Self {
        FourStateFractions {
            idle: rational::ratio(4, 5),
            single: rational::ratio(9, 10),
            duplex: rational::int(1),
        }
    }
}

impl FourStateFractions {
    pub fn new(
        idle: BigRational,
        single: BigRational,
        duplex: BigRational,
    ) -> Result<Self, EnergyError> {
        let zero = BigRational::zero();
        let one = rational::int(1);
        if idle < zero || idle > single || single > duplex || duplex != one {
            return Err(EnergyError::BadFractions);
        }
        Ok(FourStateFractions {
            idle,
            single,
            duplex,
        })
    }
}

/// Power model: two-state hosts draw full nominal power whenever on;
/// four-state hosts scale with activity (idle, single transfer direction,
/// or simultaneous transmit and receive).
#[derive(Debug, Clone, PartialEq, Default)]
pub enum EnergyModel {
    #[default]
    TwoState,
    FourState(FourStateFractions),
}

impl EnergyModel {
    pub fn four_state() -> Self {
        EnergyModel::FourState(FourStateFractions::default())
    }

    pub fn label(&self) -> &'static str {
        match self {
            EnergyModel::TwoState => "two_state",
            EnergyModel::FourState(_) => "four_state",
        }
    }
}

impl fmt::Display for EnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("slot {slot} out of range (makespan {makespan})")]
    SlotOutOfRange { slot: usize, makespan: usize },
    #[error("invalid scheme:\n{0}")]
    InvalidScheme(Box<ValidationReport>),
    #[error("four-state fractions must satisfy 0 <= idle <= single <= duplex = 1")]
    BadFractions,
}

/// Cost attribution for one delivered block.
///
/// `d_indicator` is set when this block is the minimum-index block among the
/// receiver's downloads in the slot (the receiver's `Delta` is charged once
/// per active slot, on that block). `u_indicator` is set when the serving
/// host downloads nothing in the slot (the sender's `Delta` has nowhere else
/// to go). `cost_joules = d * Delta_receiver + u * Delta_sender`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCostEntry {
    pub block: u32,
    pub receiver: HostId,
    /// 1-based slot of delivery.
    pub slot: usize,
    pub d_indicator: bool,
    pub u_indicator: bool,
    pub server_of_block: HostId,
    pub cost_joules: BigRational,
}

/// Energy totals for one scheme run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub total_joules: BigRational,
    /// Keyed by the caller's original host numbering.
    pub per_host_joules: BTreeMap<HostId, BigRational>,
    pub per_slot_joules: Vec<BigRational>,
    pub makespan_slots: usize,
    pub delivered_bits: u128,
    pub energy_per_bit: BigRational,
}

impl EnergyReport {
    pub const CSV_HEADER: &'static str =
        "scheme,n,beta,file_bits,model,total_j,makespan_slots,energy_per_bit_j";

    pub fn csv_row(&self, scheme_label: &str, spec: &SystemSpec, model: &EnergyModel) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            scheme_label,
            spec.n(),
            spec.block_count(),
            spec.file_bits(),
            model.label(),
            rational::to_f64(&self.total_joules),
            self.makespan_slots,
            rational::to_f64(&self.energy_per_bit),
        )
    }
}

/// Options for [`scheme_energy`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyOptions {
    /// Charge on/off switching and idle-gap energy using each host's
    /// `switch_seconds`. Off by default, matching the instantaneous-switching
    /// assumption of the analytic results.
    pub switch_seconds_enabled: bool,
}

/// Energy one active slot costs `host` under `spec`'s slot duration:
/// `Delta = P * B / (u * beta) + delta`.
pub fn delta_per_slot(host: &HostSpec, spec: &SystemSpec) -> BigRational {
    &host.power_watts * spec.slot_seconds() + &host.per_block_joules
}

/// Cost of one slot: the sum of `Delta_i` over hosts active in it.
/// `slot` is 1-based.
pub fn slot_cost(spec: &SystemSpec, scheme: &Scheme, slot: usize) -> Result<BigRational, EnergyError> {
    if slot == 0 || slot > scheme.makespan() {
        return Err(EnergyError::SlotOutOfRange {
            slot,
            makespan: scheme.makespan(),
        });
    }
    let s = &scheme.slots[slot - 1];
    Ok(s.active_hosts()
        .into_iter()
        .map(|h| spec.delta(h))
        .fold(BigRational::zero(), |acc, d| acc + d))
}

fn slot_block_costs(spec: &SystemSpec, slot: &SlotSchedule, slot_no: usize) -> Vec<BlockCostEntry> {
    let mut min_block: BTreeMap<HostId, u32> = BTreeMap::new();
    let mut downloaders: BTreeSet<HostId> = BTreeSet::new();
    for t in &slot.transfers {
        downloaders.insert(t.to);
        min_block
            .entry(t.to)
            .and_modify(|m| *m = (*m).min(t.block))
            .or_insert(t.block);
    }
    let mut d_spent: BTreeSet<HostId> = BTreeSet::new();
    slot.transfers
        .iter()
        .map(|t| {
            let is_min = min_block.get(&t.to) == Some(&t.block) && d_spent.insert(t.to);
            let u = !downloaders.contains(&t.from);
            let mut cost = BigRational::zero();
            if is_min {
                cost += spec.delta(t.to);
            }
            if u {
                cost += spec.delta(t.from);
            }
            BlockCostEntry {
                block: t.block,
                receiver: t.to,
                slot: slot_no,
                d_indicator: is_min,
                u_indicator: u,
                server_of_block: t.from,
                cost_joules: cost,
            }
        })
        .collect()
}

/// Per-delivery cost table for a valid scheme, one entry per
/// `(block, receiver)` delivery in slot order.
pub fn block_costs(spec: &SystemSpec, scheme: &Scheme) -> Result<Vec<BlockCostEntry>, EnergyError> {
    let report = crate::model::validate_scheme(spec, scheme);
    if !report.ok() {
        return Err(EnergyError::InvalidScheme(Box::new(report)));
    }
    Ok(scheme
        .slots
        .iter()
        .enumerate()
        .flat_map(|(i, s)| slot_block_costs(spec, s, i + 1))
        .collect())
}

/// Checks that in every slot the block costs sum exactly to the slot cost.
/// Computed structurally, so it can exercise corrupted schedules too; degree
/// violations (for example a host uploading twice while idle on the download
/// side) make the identity fail, which is the point of the check.
pub fn verify_block_slot_consistency(spec: &SystemSpec, scheme: &Scheme) -> bool {
    scheme.slots.iter().enumerate().all(|(i, slot)| {
        let block_sum = slot_block_costs(spec, slot, i + 1)
            .into_iter()
            .fold(BigRational::zero(), |acc, e| acc + e.cost_joules);
        let slot_sum = slot
            .active_hosts()
            .into_iter()
            .map(|h| spec.delta(h))
            .fold(BigRational::zero(), |acc, d| acc + d);
        block_sum == slot_sum
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SlotRole {
    UploadOnly,
    DownloadOnly,
    Both,
}

/// Full energy accounting for a valid scheme.
///
/// Two-state: every active host pays `Delta_i` per active slot. Four-state:
/// an active host pays `fraction * P_i * gamma + delta_i`, with the single
/// fraction when it only uploads or only downloads and the duplex fraction
/// when it does both; `delta_i` is charged once per active host-slot either
/// way, mirroring how the download/upload indicators attribute it.
///
/// With `switch_seconds_enabled`, each participating host additionally pays
/// one on and one off transition (`P_i * alpha_i` each) at the edges of its
/// activity, and for every idle gap either stays on (full power two-state,
/// idle fraction four-state) or powers off and on again, whichever the gap
/// policy picks. Gap and switch energy is attributed to the gap's slots so
/// the per-slot column still sums to the total.
pub fn scheme_energy(
    spec: &SystemSpec,
    scheme: &Scheme,
    model: &EnergyModel,
    options: &EnergyOptions,
) -> Result<EnergyReport, EnergyError> {
    let report = crate::model::validate_scheme(spec, scheme);
    if !report.ok() {
        return Err(EnergyError::InvalidScheme(Box::new(report)));
    }
    Ok(scheme_energy_unchecked(spec, scheme, model, options))
}

/// [`scheme_energy`] without the validity pre-check; used internally where
/// the scheme was just generated or already validated.
pub(crate) fn scheme_energy_unchecked(
    spec: &SystemSpec,
    scheme: &Scheme,
    model: &EnergyModel,
    options: &EnergyOptions,
) -> EnergyReport {
    let n = spec.n() as usize;
    let hosts = n + 1; // slot 0 = server, i+1 = client i
    let gamma = spec.slot_seconds();
    let idx = |h: HostId| -> usize {
        match h {
            HostId::Server => 0,
            HostId::Client(i) => i as usize + 1,
        }
    };
    let host_spec = |j: usize| -> &HostSpec {
        if j == 0 {
            spec.server()
        } else {
            &spec.clients()[j - 1]
        }
    };
    let power_gamma: Vec<BigRational> = (0..hosts)
        .map(|j| &host_spec(j).power_watts * &gamma)
        .collect();
    let deltas: Vec<BigRational> = (0..hosts)
        .map(|j| &power_gamma[j] + &host_spec(j).per_block_joules)
        .collect();

    let makespan = scheme.makespan();
    let mut per_slot: Vec<BigRational> = vec![BigRational::zero(); makespan];
    let mut per_host: Vec<BigRational> = vec![BigRational::zero(); hosts];
    let mut activity: Vec<Vec<usize>> = vec![Vec::new(); hosts];

    for (ti, slot) in scheme.slots.iter().enumerate() {
        let mut roles: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
        for t in &slot.transfers {
            roles.entry(idx(t.from)).or_insert((false, false)).0 = true;
            roles.entry(idx(t.to)).or_insert((false, false)).1 = true;
        }
        for (&j, &(up, down)) in &roles {
            let role = match (up, down) {
                (true, true) => SlotRole::Both,
                (true, false) => SlotRole::UploadOnly,
                (false, true) => SlotRole::DownloadOnly,
                (false, false) => unreachable!(),
            };
            let contribution = match model {
                EnergyModel::TwoState => deltas[j].clone(),
                EnergyModel::FourState(f) => {
                    let fraction = match role {
                        SlotRole::Both => &f.duplex,
                        _ => &f.single,
                    };
                    fraction * &power_gamma[j] + &host_spec(j).per_block_joules
                }
            };
            per_slot[ti] += &contribution;
            per_host[j] += contribution;
            activity[j].push(ti);
        }
    }

    if options.switch_seconds_enabled {
        for j in 0..hosts {
            if activity[j].is_empty() {
                continue;
            }
            let power = &host_spec(j).power_watts;
            let alpha = &host_spec(j).switch_seconds;
            let switch_once = power * alpha;
            // One power-on before the first active slot, one power-off after
            // the last.
            let first = activity[j][0];
            let last = *activity[j].last().unwrap();
            per_slot[first] += &switch_once;
            per_slot[last] += &switch_once;
            per_host[j] += &switch_once + &switch_once;

            for w in activity[j].windows(2) {
                let (a, b) = (w[0], w[1]);
                let gap_slots = b - a - 1;
                if gap_slots == 0 {
                    continue;
                }
                let gap_seconds = rational::uint(gap_slots as u64) * &gamma;
                match gap_policy(power, alpha, &gap_seconds) {
                    GapDecision::StayOn => {
                        let per_gap_slot = match model {
                            EnergyModel::TwoState => power * &gamma,
                            EnergyModel::FourState(f) => &f.idle * power * &gamma,
                        };
                        for slot_charge in per_slot[(a + 1)..b].iter_mut() {
                            *slot_charge += &per_gap_slot;
                            per_host[j] += &per_gap_slot;
                        }
                    }
                    GapDecision::OffOn => {
                        per_slot[a + 1] += &switch_once;
                        per_slot[b - 1] += &switch_once;
                        per_host[j] += &switch_once + &switch_once;
                    }
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

    EnergyReport {
        total_joules: total,
        per_host_joules,
        per_slot_joules: per_slot,
        makespan_slots: makespan,
        delivered_bits,
        energy_per_bit,
    }
}

/// Energy of a continuous (non-slotted) plan, used for the parallel
/// baseline: every host pays nominal (or single-fraction) power for its on
/// time, plus `delta` per block served and per block received.
///
/// The per-slot column spreads the total uniformly over the plan's
/// slot-equivalents so that report invariants carry over.
pub fn plan_energy(spec: &SystemSpec, plan: &ContinuousPlan, model: &EnergyModel) -> EnergyReport {
    let beta = rational::uint(spec.block_count() as u64);
    let mut per_host: BTreeMap<HostId, BigRational> = BTreeMap::new();
    for (host, intervals) in &plan.intervals {
        let host_spec = spec.host(*host).expect("plan host in spec");
        let on_time = intervals
            .iter()
            .fold(BigRational::zero(), |acc, iv| acc + (&iv.end_seconds - &iv.start_seconds));
        let duplex = intervals.iter().any(|iv| iv.role == Role::Both);
        let power = match model {
            EnergyModel::TwoState => host_spec.power_watts.clone(),
            EnergyModel::FourState(f) => {
                let fraction = if duplex { &f.duplex } else { &f.single };
                fraction * &host_spec.power_watts
            }
        };
        let served = rational::uint(plan.blocks_served.get(host).copied().unwrap_or(0));
        let received = match host {
            HostId::Server => BigRational::zero(),
            HostId::Client(_) => beta.clone(),
        };
        let energy = power * on_time + &host_spec.per_block_joules * (served + received);
        per_host.insert(spec.external_id(*host), energy);
    }
    let total = per_host
        .values()
        .fold(BigRational::zero(), |acc, v| acc + v);
    let delivered_bits = spec.n() as u128 * spec.file_bits() as u128;
    let energy_per_bit = &total / rational::uint128(delivered_bits);
    let slots_exact = &plan.duration_seconds / spec.slot_seconds();
    let makespan = (slots_exact.ceil().to_integer())
        .try_into()
        .unwrap_or(usize::MAX);
    let per_slot = if makespan > 0 {
        let share = &total / rational::uint(makespan as u64);
        vec![share; makespan]
    } else {
        Vec::new()
    };
    EnergyReport {
        total_joules: total,
        per_host_joules: per_host,
        per_slot_joules: per_slot,
        makespan_slots: makespan,
        delivered_bits,
        energy_per_bit,
    }
}
