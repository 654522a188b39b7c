//! Constructive schedule generators.
//!
//! `opt_schedule` emits the energy-optimal scheme for `k = 1`, dispatching on
//! the relation between client count and block count. `alg4_schedule` emits
//! the near-optimal scheme that exploits two parallel downloads when
//! `beta > n`. `serial_schedule` and `parallel_plan` are the centralized
//! baselines the optimal schemes are measured against.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use thiserror::Error;

use crate::model::{HostId, Scheme, SlotSchedule, SystemSpec, Transfer};
use crate::rational;

/// The schedule families exposed by the CLI and the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Energy-optimal collaborative scheme, requires `k = 1`.
    Opt,
    /// Near-optimal collaborative scheme using two parallel downloads,
    /// requires `k >= 2` and `beta > n`.
    Alg4,
    /// Server uploads the whole file to one client at a time.
    Serial,
    /// Server uploads to every client simultaneously, splitting its capacity.
    Parallel,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::Opt => "opt",
            SchemeKind::Alg4 => "alg4",
            SchemeKind::Serial => "serial",
            SchemeKind::Parallel => "parallel",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "opt" => Ok(SchemeKind::Opt),
            "alg4" => Ok(SchemeKind::Alg4),
            "serial" => Ok(SchemeKind::Serial),
            "parallel" => Ok(SchemeKind::Parallel),
            other => Err(format!(
                "unknown scheme kind {other:?} (expected opt, alg4, serial or parallel)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("optimal schemes require k = 1, spec has k = {k}")]
    KNotOne { k: u32 },
    #[error("the parallel-download scheme requires k >= 2, spec has k = 1")]
    KTooSmall,
    #[error("the parallel-download scheme requires beta > n (got beta = {beta}, n = {n}); use the optimal scheme instead")]
    BetaNotAboveN { n: u32, beta: u32 },
}

/// Role of a host within a continuous plan interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Upload,
    Download,
    Both,
}

/// One on-interval of a host in a continuous plan.
#[derive(Debug, Clone, PartialEq)]
pub struct HostInterval {
    pub start_seconds: BigRational,
    pub end_seconds: BigRational,
    pub role: Role,
}

/// Carrier for the parallel baseline, which does not fit the slot model:
/// per-host on-intervals plus how many blocks each host serves.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPlan {
    pub intervals: BTreeMap<HostId, Vec<HostInterval>>,
    pub blocks_served: BTreeMap<HostId, u64>,
    pub duration_seconds: BigRational,
}

impl ContinuousPlan {
    /// Total bits delivered to clients.
    pub fn delivered_bits(&self, spec: &SystemSpec) -> u128 {
        spec.n() as u128 * spec.file_bits() as u128
    }
}

fn client(i: i64, n: i64) -> HostId {
    HostId::Client(i.rem_euclid(n) as u32)
}

fn block(j: i64, beta: i64) -> u32 {
    j.rem_euclid(beta) as u32
}

/// Optimal scheme for `beta = n`: the server hands a distinct block to each
/// client, then the clients run `n - 1` full rotation slots.
fn schedule_equal(n: i64) -> Scheme {
    let mut slots = Vec::new();
    for j in 0..n {
        slots.push(SlotSchedule::new(vec![Transfer::new(
            HostId::Server,
            client(j, n),
            block(j, n),
        )]));
    }
    for j in n..=(2 * n - 2) {
        let transfers = (0..n)
            .map(|i| Transfer::new(client(i, n), client(i - 1, n), block(i + j, n)))
            .collect();
        slots.push(SlotSchedule::new(transfers));
    }
    Scheme::new(slots)
}

/// Optimal scheme for `beta > n`: after seeding one block per client the
/// server keeps feeding fresh blocks to the last client while a chain shifts
/// older blocks down, then full rotations finish the distribution.
fn schedule_more_blocks(n: i64, beta: i64) -> Scheme {
    let mut slots = Vec::new();
    for j in 0..n {
        slots.push(SlotSchedule::new(vec![Transfer::new(
            HostId::Server,
            client(j, n),
            block(j, beta),
        )]));
    }
    for j in n..beta {
        let mut transfers = vec![Transfer::new(HostId::Server, client(n - 1, n), block(j, beta))];
        for i in 1..n {
            transfers.push(Transfer::new(
                client(i, n),
                client(i - 1, n),
                block(i + j - n, beta),
            ));
        }
        slots.push(SlotSchedule::new(transfers));
    }
    for j in beta..=(beta + n - 2) {
        let transfers = (1..=n)
            .map(|i| {
                Transfer::new(
                    client(i % n, n),
                    client(i - 1, n),
                    block(i + j - n, beta),
                )
            })
            .collect();
        slots.push(SlotSchedule::new(transfers));
    }
    Scheme::new(slots)
}

/// Optimal scheme for `beta < n`: some blocks must be uploaded more than
/// once; the host with the smallest per-slot energy keeps re-serving block 0
/// to hosts that have nothing yet while a window of blocks slides across the
/// clients, and final rotations close the stragglers.
fn schedule_fewer_blocks(n: i64, beta: i64, h_min: HostId) -> Scheme {
    let mut slots = Vec::new();
    for j in 0..beta {
        slots.push(SlotSchedule::new(vec![Transfer::new(
            HostId::Server,
            client(j, n),
            block(j, beta),
        )]));
    }
    for j in beta..n {
        let mut transfers = vec![Transfer::new(h_min, client(j + 1 - beta, n), 0)];
        for i in 1..beta {
            transfers.push(Transfer::new(
                client(i + j - beta, n),
                client(i + j + 1 - beta, n),
                block(i, beta),
            ));
        }
        slots.push(SlotSchedule::new(transfers));
    }
    for j in n..=(n + beta - 2) {
        let mut transfers = vec![Transfer::new(
            client(2 * n - (j + 1), n),
            client(n + beta - (j + 2), n),
            block(beta - 1, beta),
        )];
        for i in 0..=(beta - 2) {
            transfers.push(Transfer::new(
                client(n + i - j, n),
                client(n + i - j - 1, n),
                block(i, beta),
            ));
        }
        slots.push(SlotSchedule::new(transfers));
    }
    Scheme::new(slots)
}

/// Builds the energy-optimal scheme for `k = 1`, dispatching on the relation
/// between `n` and `beta`. The makespan is `2n - 1` for `beta = n`,
/// `beta + n - 1` for `beta > n` and `n + beta - 1` for `beta < n`; the
/// measured energy matches the `k = 1` lower bound exactly.
pub fn opt_schedule(spec: &SystemSpec) -> Result<Scheme, ScheduleError> {
    if spec.k() != 1 {
        return Err(ScheduleError::KNotOne { k: spec.k() });
    }
    let n = spec.n() as i64;
    let beta = spec.block_count() as i64;
    Ok(if beta == n {
        schedule_equal(n)
    } else if beta > n {
        schedule_more_blocks(n, beta)
    } else {
        // The cheapest host keeps re-serving block 0. Ties between the
        // server and client 0 go to the client, which lets the server power
        // off after its beta slots; the energy is identical either way.
        let h_min = if spec.delta(HostId::Server) < spec.min_client_delta() {
            HostId::Server
        } else {
            HostId::Client(0)
        };
        schedule_fewer_blocks(n, beta, h_min)
    })
}

/// Builds the `k = 2` near-optimal scheme for `beta > n`.
///
/// The first loops seed one block per client and stage the start of each
/// block group at client 0; the middle phase runs full rotations (each
/// client downloading from the cycle while one also receives the next
/// group's seed from the server in parallel); the final phase distributes
/// the remaining `n + beta mod n` blocks exactly like the `beta > n`
/// optimal scheme after renaming. No host ever has more than two downloads
/// in one slot.
pub fn alg4_schedule(spec: &SystemSpec) -> Result<Scheme, ScheduleError> {
    if spec.k() < 2 {
        return Err(ScheduleError::KTooSmall);
    }
    let n = spec.n() as i64;
    let beta = spec.block_count() as i64;
    if beta <= n {
        return Err(ScheduleError::BetaNotAboveN {
            n: spec.n(),
            beta: spec.block_count(),
        });
    }
    let b = beta % n;
    let q = beta / n;
    let mut slots = Vec::new();
    for j in 0..n {
        slots.push(SlotSchedule::new(vec![Transfer::new(
            HostId::Server,
            client(j, n),
            block(j, beta),
        )]));
    }
    for j in 1..q {
        slots.push(SlotSchedule::new(vec![Transfer::new(
            HostId::Server,
            HostId::Client(0),
            block(n * j, beta),
        )]));
    }
    for l in 0..=(q - 2) {
        for j in 0..=(n - 2) {
            let mut transfers = vec![Transfer::new(
                HostId::Server,
                client(j + 1, n),
                block((l + 1) * n + j + 1, beta),
            )];
            for i in 0..n {
                transfers.push(Transfer::new(
                    client(i, n),
                    client(i - 1, n),
                    block(l * n + (i + j).rem_euclid(n), beta),
                ));
            }
            slots.push(SlotSchedule::new(transfers));
        }
    }
    // Finish with the beta > n optimal phases over the last n + b blocks,
    // renamed so that local block x maps to x + offset.
    let beta_tail = n + b;
    let offset = beta - beta_tail;
    for j in n..beta_tail {
        let mut transfers = vec![Transfer::new(
            HostId::Server,
            client(n - 1, n),
            block(j + offset, beta),
        )];
        for i in 1..n {
            transfers.push(Transfer::new(
                client(i, n),
                client(i - 1, n),
                block(i + j - n + offset, beta),
            ));
        }
        slots.push(SlotSchedule::new(transfers));
    }
    for j in beta_tail..=(beta_tail + n - 2) {
        let transfers = (1..=n)
            .map(|i| {
                Transfer::new(
                    client(i % n, n),
                    client(i - 1, n),
                    block((i + j - n).rem_euclid(beta_tail) + offset, beta),
                )
            })
            .collect();
        slots.push(SlotSchedule::new(transfers));
    }
    Ok(Scheme::new(slots))
}

/// The serial baseline: `n * beta` slots, slot `i * beta + j` carrying the
/// single transfer of block `j` from the server to client `i`.
pub fn serial_schedule(spec: &SystemSpec) -> Scheme {
    let n = spec.n();
    let beta = spec.block_count();
    let mut slots = Vec::with_capacity(n as usize * beta as usize);
    for i in 0..n {
        for j in 0..beta {
            slots.push(SlotSchedule::new(vec![Transfer::new(
                HostId::Server,
                HostId::Client(i),
                j,
            )]));
        }
    }
    Scheme::new(slots)
}

/// The parallel baseline: the server splits its upload capacity evenly over
/// all `n` clients, so every host stays on for `n * B / u` seconds.
pub fn parallel_plan(spec: &SystemSpec) -> ContinuousPlan {
    let n = spec.n();
    let duration = rational::uint(n as u64) * rational::uint(spec.file_bits())
        / rational::uint(spec.upload_bps());
    let mut intervals = BTreeMap::new();
    let mut blocks_served = BTreeMap::new();
    intervals.insert(
        HostId::Server,
        vec![HostInterval {
            start_seconds: rational::int(0),
            end_seconds: duration.clone(),
            role: Role::Upload,
        }],
    );
    blocks_served.insert(
        HostId::Server,
        n as u64 * spec.block_count() as u64,
    );
    for i in 0..n {
        intervals.insert(
            HostId::Client(i),
            vec![HostInterval {
                start_seconds: rational::int(0),
                end_seconds: duration.clone(),
                role: Role::Download,
            }],
        );
        blocks_served.insert(HostId::Client(i), 0);
    }
    ContinuousPlan {
        intervals,
        blocks_served,
        duration_seconds: duration,
    }
}
