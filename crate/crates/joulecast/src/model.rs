//! Domain types for hosts, blocks and slotted schedules, plus full validation
//! of schedules against the transfer model.
//!
//! All types are immutable after construction and all operations are pure
//! functions of their inputs, so everything here is safe to share across
//! threads.
//!
//! Slot numbering is 1-based everywhere a slot index is user visible
//! (violations, interchange text, per-slot costs); "after slot 0" denotes the
//! initial state before any transfer.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use thiserror::Error;

use crate::rational;

/// Identifies one host: the server or a client by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HostId {
    Server,
    Client(u32),
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostId::Server => write!(f, "S"),
            HostId::Client(i) => write!(f, "H{i}"),
        }
    }
}

impl FromStr for HostId {
    type Err = InterchangeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "S" {
            return Ok(HostId::Server);
        }
        if let Some(idx) = s.strip_prefix('H') {
            if !idx.is_empty() && idx.chars().all(|c| c.is_ascii_digit()) {
                if let Ok(i) = idx.parse::<u32>() {
                    return Ok(HostId::Client(i));
                }
            }
        }
        Err(InterchangeError::BadHost(s.to_string()))
    }
}

/// Block index within a file of `beta` blocks.
pub type BlockId = u32;

/// One host's power draw, per-block energy, switch time and link capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct HostSpec {
    pub power_watts: BigRational,
    pub per_block_joules: BigRational,
    pub switch_seconds: BigRational,
    pub upload_bps: u64,
    pub download_bps: u64,
}

impl HostSpec {
    /// Builds a host from decimal-valued parameters. Capacities are integral
    /// bits per second; the energy parameters must be finite and nonnegative.
    pub fn new(
        power_watts: f64,
        per_block_joules: f64,
        switch_seconds: f64,
        upload_bps: u64,
        download_bps: u64,
    ) -> Result<Self, SpecError> {
        let conv = |v: f64, what: &str| -> Result<BigRational, SpecError> {
            if !v.is_finite() || v < 0.0 {
                return Err(SpecError::BadHostParameter {
                    what: what.to_string(),
                    value: v,
                });
            }
            Ok(rational::from_f64(v).expect("finite float"))
        };
        Self::from_rationals(
            conv(power_watts, "power_watts")?,
            conv(per_block_joules, "per_block_joules")?,
            conv(switch_seconds, "switch_seconds")?,
            upload_bps,
            download_bps,
        )
    }

    /// Exact-rational constructor.
    pub fn from_rationals(
        power_watts: BigRational,
        per_block_joules: BigRational,
        switch_seconds: BigRational,
        upload_bps: u64,
        download_bps: u64,
    ) -> Result<Self, SpecError> {
        use num::Signed;
        for (q, what) in [
            (&power_watts, "power_watts"),
            (&per_block_joules, "per_block_joules"),
            (&switch_seconds, "switch_seconds"),
        ] {
            if q.is_negative() {
                return Err(SpecError::BadHostParameter {
                    what: what.to_string(),
                    value: rational::to_f64(q),
                });
            }
        }
        if upload_bps == 0 || download_bps == 0 {
            return Err(SpecError::ZeroCapacity);
        }
        Ok(HostSpec {
            power_watts,
            per_block_joules,
            switch_seconds,
            upload_bps,
            download_bps,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("host parameter {what} must be finite and nonnegative, got {value}")]
    BadHostParameter { what: String, value: f64 },
    #[error("upload and download capacities must be positive")]
    ZeroCapacity,
    #[error("at least one client is required")]
    NoClients,
    #[error("file_bits must be positive")]
    EmptyFile,
    #[error("block_count must be positive")]
    NoBlocks,
    #[error("file of {file_bits} bits does not divide into {block_count} equal blocks; pad the file")]
    IndivisibleFile { file_bits: u64, block_count: u32 },
    #[error("all hosts must share one upload and one download capacity")]
    NonUniformCapacity,
    #[error("download capacity {download_bps} is not an integer multiple of upload capacity {upload_bps}")]
    NonIntegralRatio { upload_bps: u64, download_bps: u64 },
}

/// The full problem instance: server, clients, file size and block count.
///
/// Clients are relabeled at construction so that per-slot energies satisfy
/// `Delta_0 <= ... <= Delta_{n-1}` (ties broken by the caller's original
/// index). Schedules and internal computations use the relabeled indices;
/// [`SystemSpec::external_client`] recovers the caller's numbering for
/// reports.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    server: HostSpec,
    clients: Vec<HostSpec>,
    file_bits: u64,
    block_count: u32,
    upload_bps: u64,
    download_bps: u64,
    to_external: Vec<u32>,
    to_internal: Vec<u32>,
}

impl SystemSpec {
    /// Validates and builds a uniform-capacity instance.
    ///
    /// Requirements: at least one client, positive file and block counts, the
    /// block size `B / beta` divides evenly, every host shares one upload and
    /// one download capacity, and `d / u` is a positive integer.
    pub fn new(
        server: HostSpec,
        clients: Vec<HostSpec>,
        file_bits: u64,
        block_count: u32,
    ) -> Result<Self, SpecError> {
        if clients.is_empty() {
            return Err(SpecError::NoClients);
        }
        if file_bits == 0 {
            return Err(SpecError::EmptyFile);
        }
        if block_count == 0 {
            return Err(SpecError::NoBlocks);
        }
        if !file_bits.is_multiple_of(block_count as u64) {
            return Err(SpecError::IndivisibleFile {
                file_bits,
                block_count,
            });
        }
        let upload_bps = server.upload_bps;
        let download_bps = server.download_bps;
        if clients
            .iter()
            .any(|c| c.upload_bps != upload_bps || c.download_bps != download_bps)
        {
            return Err(SpecError::NonUniformCapacity);
        }
        if !download_bps.is_multiple_of(upload_bps) {
            return Err(SpecError::NonIntegralRatio {
                upload_bps,
                download_bps,
            });
        }

        let gamma = slot_seconds_for(file_bits, block_count, upload_bps);
        let mut order: Vec<usize> = (0..clients.len()).collect();
        order.sort_by(|&a, &b| {
            let da = &clients[a].power_watts * &gamma + &clients[a].per_block_joules;
            let db = &clients[b].power_watts * &gamma + &clients[b].per_block_joules;
            da.cmp(&db).then(a.cmp(&b))
        });
        let mut to_internal = vec![0u32; clients.len()];
        for (internal, &external) in order.iter().enumerate() {
            to_internal[external] = internal as u32;
        }
        let to_external: Vec<u32> = order.iter().map(|&e| e as u32).collect();
        let sorted: Vec<HostSpec> = order.iter().map(|&e| clients[e].clone()).collect();

        Ok(SystemSpec {
            server,
            clients: sorted,
            file_bits,
            block_count,
            upload_bps,
            download_bps,
            to_external,
            to_internal,
        })
    }

    /// Convenience constructor for a system of identical hosts.
    pub fn homogeneous(
        n: u32,
        power_watts: f64,
        per_block_joules: f64,
        upload_bps: u64,
        k: u32,
        file_bits: u64,
        block_count: u32,
    ) -> Result<Self, SpecError> {
        if k == 0 {
            return Err(SpecError::NonIntegralRatio {
                upload_bps,
                download_bps: 0,
            });
        }
        let host = HostSpec::new(
            power_watts,
            per_block_joules,
            0.0,
            upload_bps,
            upload_bps * k as u64,
        )?;
        SystemSpec::new(host.clone(), vec![host; n as usize], file_bits, block_count)
    }

    pub fn n(&self) -> u32 {
        self.clients.len() as u32
    }

    pub fn block_count(&self) -> u32 {
        self.block_count
    }

    pub fn file_bits(&self) -> u64 {
        self.file_bits
    }

    /// Block size `s = B / beta` in bits.
    pub fn block_bits(&self) -> u64 {
        self.file_bits / self.block_count as u64
    }

    pub fn upload_bps(&self) -> u64 {
        self.upload_bps
    }

    pub fn download_bps(&self) -> u64 {
        self.download_bps
    }

    /// Download-to-upload ratio `k = d / u`.
    pub fn k(&self) -> u32 {
        (self.download_bps / self.upload_bps) as u32
    }

    /// Slot duration `gamma = s / u` in seconds.
    pub fn slot_seconds(&self) -> BigRational {
        slot_seconds_for(self.file_bits, self.block_count, self.upload_bps)
    }

    pub fn server(&self) -> &HostSpec {
        &self.server
    }

    /// Host parameters by internal id.
    pub fn host(&self, id: HostId) -> Option<&HostSpec> {
        match id {
            HostId::Server => Some(&self.server),
            HostId::Client(i) => self.clients.get(i as usize),
        }
    }

    /// Clients in internal (ascending-`Delta`) order.
    pub fn clients(&self) -> &[HostSpec] {
        &self.clients
    }

    /// Energy one active slot costs host `id`: `Delta_i = P_i * gamma + delta_i`.
    pub fn delta(&self, id: HostId) -> BigRational {
        let host = self.host(id).expect("host id in range");
        &host.power_watts * self.slot_seconds() + &host.per_block_joules
    }

    /// Sum of all client `Delta_i`.
    pub fn sum_client_deltas(&self) -> BigRational {
        let gamma = self.slot_seconds();
        self.clients
            .iter()
            .map(|c| &c.power_watts * &gamma + &c.per_block_joules)
            .fold(rational::int(0), |acc, d| acc + d)
    }

    /// Smallest client `Delta` (i.e. `Delta_0` in internal order).
    pub fn min_client_delta(&self) -> BigRational {
        self.delta(HostId::Client(0))
    }

    /// Caller-side index for an internal client index.
    pub fn external_client(&self, internal: u32) -> u32 {
        self.to_external[internal as usize]
    }

    /// Internal index for a caller-side client index.
    pub fn internal_client(&self, external: u32) -> u32 {
        self.to_internal[external as usize]
    }

    /// Maps an internal host id to the caller's original numbering.
    pub fn external_id(&self, id: HostId) -> HostId {
        match id {
            HostId::Server => HostId::Server,
            HostId::Client(i) => HostId::Client(self.external_client(i)),
        }
    }
}

fn slot_seconds_for(file_bits: u64, block_count: u32, upload_bps: u64) -> BigRational {
    rational::uint(file_bits / block_count as u64) / rational::uint(upload_bps)
}

/// One block moving from one host to another within a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transfer {
    pub from: HostId,
    pub to: HostId,
    pub block: BlockId,
}

impl Transfer {
    pub fn new(from: HostId, to: HostId, block: BlockId) -> Self {
        Transfer { from, to, block }
    }
}

/// The set of transfers scheduled for one slot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotSchedule {
    pub transfers: Vec<Transfer>,
}

impl SlotSchedule {
    pub fn new(transfers: Vec<Transfer>) -> Self {
        SlotSchedule { transfers }
    }

    pub fn is_empty(&self) -> bool {
        self.transfers.is_empty()
    }

    /// Hosts appearing in any transfer of this slot, deduplicated.
    pub fn active_hosts(&self) -> BTreeSet<HostId> {
        self.transfers
            .iter()
            .flat_map(|t| [t.from, t.to])
            .collect()
    }
}

/// An ordered sequence of slots delivering the whole file to every client.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scheme {
    pub slots: Vec<SlotSchedule>,
}

impl Scheme {
    pub fn new(slots: Vec<SlotSchedule>) -> Self {
        Scheme { slots }
    }

    /// Number of slots until distribution completes.
    pub fn makespan(&self) -> usize {
        self.slots.len()
    }

    pub fn transfer_count(&self) -> usize {
        self.slots.iter().map(|s| s.transfers.len()).sum()
    }
}

/// Blocks held by one host at some point in time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HostState {
    pub blocks_held: BTreeSet<BlockId>,
}

/// Shape of a slot's transfer graph. With per-host out-degree at most one, a
/// connected slot graph is either a tree or contains exactly one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Tree,
    Unicyclic,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlotGraphError {
    #[error("slot has no transfers")]
    Empty,
    #[error("slot transfer graph is disconnected")]
    Disconnected,
}

/// Validation rule identifiers; `Display` yields the kebab-case rule names
/// used in messages and CLI output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    UploadDegree,
    DownloadDegree,
    SelfTransfer,
    ServerDownload,
    UnknownClient,
    BlockOutOfRange,
    BlockNotHeld,
    RedundantDownload,
    IncompleteClient,
    EmptySlot,
    DisconnectedSlot,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::UploadDegree => "upload-degree",
            Rule::DownloadDegree => "download-degree",
            Rule::SelfTransfer => "self-transfer",
            Rule::ServerDownload => "server-download",
            Rule::UnknownClient => "unknown-client",
            Rule::BlockOutOfRange => "block-out-of-range",
            Rule::BlockNotHeld => "block-not-held",
            Rule::RedundantDownload => "redundant-download",
            Rule::IncompleteClient => "incomplete-client",
            Rule::EmptySlot => "empty-slot",
            Rule::DisconnectedSlot => "disconnected-slot",
        };
        f.write_str(s)
    }
}

/// One rule violation, with the 1-based slot it occurred in (if any).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub slot: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slot {
            Some(s) => write!(f, "slot {s}: {}: {}", self.rule, self.message),
            None => write!(f, "{}: {}", self.rule, self.message),
        }
    }
}

/// Outcome of validating a scheme: `ok()` plus every violation found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, slot: Option<usize>, rule: Rule, message: String) {
        self.violations.push(Violation {
            slot,
            rule,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Compact bitset over block indices.
#[derive(Clone)]
pub(crate) struct BlockSet {
    words: Vec<u64>,
}

impl BlockSet {
    pub(crate) fn new(block_count: u32) -> Self {
        BlockSet {
            words: vec![0; (block_count as usize).div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, b: BlockId) {
        self.words[b as usize / 64] |= 1 << (b % 64);
    }

    pub(crate) fn contains(&self, b: BlockId) -> bool {
        self.words[b as usize / 64] & (1 << (b % 64)) != 0
    }

    pub(crate) fn len(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn to_btree(&self, block_count: u32) -> BTreeSet<BlockId> {
        (0..block_count).filter(|&b| self.contains(b)).collect()
    }
}

/// Checks a scheme against the transfer model. The report enumerates every
/// failure rather than stopping at the first:
///
/// - per-slot degree rules: a host uploads to at most one host, a host
///   downloads at most `k` blocks, no self transfers, the server never
///   downloads, client and block indices are in range;
/// - causality: a served block was fully received in a strictly earlier slot
///   (the server holds everything from the start);
/// - no client downloads a block it already holds (this keeps the delivered
///   block count at exactly `n * beta` and the per-block cost accounting
///   well defined);
/// - completeness: after the last slot every client holds all `beta` blocks.
///
/// Transfers are applied to the replayed states even when they violate a
/// rule, so later slots are judged against the schedule as written.
pub fn validate_scheme(spec: &SystemSpec, scheme: &Scheme) -> ValidationReport {
    let n = spec.n();
    let beta = spec.block_count();
    let k = spec.k() as usize;
    let mut report = ValidationReport::default();
    let mut held: Vec<BlockSet> = vec![BlockSet::new(beta); n as usize];

    for (idx, slot) in scheme.slots.iter().enumerate() {
        let slot_no = idx + 1;
        let mut upload_counts: std::collections::HashMap<HostId, usize> =
            std::collections::HashMap::new();
        let mut download_counts: std::collections::HashMap<HostId, usize> =
            std::collections::HashMap::new();
        let mut seen_downloads: BTreeSet<(HostId, BlockId)> = BTreeSet::new();

        for t in &slot.transfers {
            if t.from == t.to {
                report.push(
                    Some(slot_no),
                    Rule::SelfTransfer,
                    format!("{} transfers block {} to itself", t.from, t.block),
                );
            }
            if t.to == HostId::Server {
                report.push(
                    Some(slot_no),
                    Rule::ServerDownload,
                    format!("{} uploads block {} to the server", t.from, t.block),
                );
            }
            for id in [t.from, t.to] {
                if let HostId::Client(i) = id {
                    if i >= n {
                        report.push(
                            Some(slot_no),
                            Rule::UnknownClient,
                            format!("client index {i} out of range (n = {n})"),
                        );
                    }
                }
            }
            if t.block >= beta {
                report.push(
                    Some(slot_no),
                    Rule::BlockOutOfRange,
                    format!("block {} out of range (beta = {beta})", t.block),
                );
            }
            *upload_counts.entry(t.from).or_insert(0) += 1;
            *download_counts.entry(t.to).or_insert(0) += 1;

            // Causality and redundancy checks need in-range indices.
            let in_range = t.block < beta
                && matches!(t.to, HostId::Client(i) if i < n)
                && !matches!(t.from, HostId::Client(i) if i >= n);
            if !in_range {
                continue;
            }
            if let HostId::Client(i) = t.from {
                if !held[i as usize].contains(t.block) {
                    report.push(
                        Some(slot_no),
                        Rule::BlockNotHeld,
                        format!("{} serves block {} it has not received", t.from, t.block),
                    );
                }
            }
            if let HostId::Client(i) = t.to {
                let duplicate_now = !seen_downloads.insert((t.to, t.block));
                if duplicate_now || held[i as usize].contains(t.block) {
                    report.push(
                        Some(slot_no),
                        Rule::RedundantDownload,
                        format!("{} downloads block {} it already holds", t.to, t.block),
                    );
                }
            }
        }

        for (host, count) in upload_counts {
            if count > 1 {
                report.push(
                    Some(slot_no),
                    Rule::UploadDegree,
                    format!("{host} uploads {count} times in one slot"),
                );
            }
        }
        for (host, count) in download_counts {
            if count > k {
                report.push(
                    Some(slot_no),
                    Rule::DownloadDegree,
                    format!("{host} downloads {count} blocks with capacity for {k}"),
                );
            }
        }

        for t in &slot.transfers {
            if let HostId::Client(i) = t.to {
                if i < n && t.block < beta {
                    held[i as usize].insert(t.block);
                }
            }
        }
    }

    for (i, set) in held.iter().enumerate() {
        if set.len() != beta {
            let missing: Vec<String> = (0..beta)
                .filter(|&b| !set.contains(b))
                .map(|b| b.to_string())
                .collect();
            report.push(
                None,
                Rule::IncompleteClient,
                format!("H{i} never receives blocks {{{}}}", missing.join(",")),
            );
        }
    }

    report
}

/// Classifies one slot's transfer graph as a tree or a unicyclic graph.
///
/// Vertices are the hosts active in the slot and each transfer contributes
/// one edge; a connected graph with `E = V - 1` is a tree and with `E = V`
/// contains exactly one cycle.
pub fn classify_slot(_spec: &SystemSpec, slot: &SlotSchedule) -> Result<SlotKind, SlotGraphError> {
    if slot.is_empty() {
        return Err(SlotGraphError::Empty);
    }
    let hosts: Vec<HostId> = slot.active_hosts().into_iter().collect();
    if !slot_connected(&hosts, &slot.transfers) {
        return Err(SlotGraphError::Disconnected);
    }
    if slot.transfers.len() + 1 == hosts.len() {
        Ok(SlotKind::Tree)
    } else {
        Ok(SlotKind::Unicyclic)
    }
}

fn slot_connected(hosts: &[HostId], transfers: &[Transfer]) -> bool {
    if hosts.is_empty() {
        return false;
    }
    let index = |h: HostId| hosts.binary_search(&h).expect("active host");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); hosts.len()];
    for t in transfers {
        let a = index(t.from);
        let b = index(t.to);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; hosts.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Checks the extra structural rules a "normal" scheme obeys on top of
/// validity: no empty slots and a connected transfer graph in every slot.
/// Idle-but-on hosts cannot be represented here (a host is active exactly
/// when it appears in a transfer), so idleness needs no check.
pub fn check_normal(spec: &SystemSpec, scheme: &Scheme) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (idx, slot) in scheme.slots.iter().enumerate() {
        let slot_no = idx + 1;
        match classify_slot(spec, slot) {
            Ok(_) => {}
            Err(SlotGraphError::Empty) => report.push(
                Some(slot_no),
                Rule::EmptySlot,
                "slot schedules no transfers".to_string(),
            ),
            Err(SlotGraphError::Disconnected) => report.push(
                Some(slot_no),
                Rule::DisconnectedSlot,
                "slot transfer graph has more than one component".to_string(),
            ),
        }
    }
    report
}

/// Per-client block states after every slot.
///
/// `states[t][i]` is client `H_i`'s state after slot `t` (1-based), with
/// `states[0]` the initial empty states. The server's state is always the
/// full block set and is not materialized.
pub fn replay_states(
    spec: &SystemSpec,
    scheme: &Scheme,
) -> Result<Vec<Vec<HostState>>, Box<ValidationReport>> {
    let report = validate_scheme(spec, scheme);
    if !report.ok() {
        return Err(Box::new(report));
    }
    let n = spec.n() as usize;
    let beta = spec.block_count();
    let mut held: Vec<BlockSet> = vec![BlockSet::new(beta); n];
    let mut out = Vec::with_capacity(scheme.makespan() + 1);
    let snapshot = |held: &[BlockSet]| -> Vec<HostState> {
        held.iter()
            .map(|s| HostState {
                blocks_held: s.to_btree(beta),
            })
            .collect()
    };
    out.push(snapshot(&held));
    for slot in &scheme.slots {
        for t in &slot.transfers {
            if let HostId::Client(i) = t.to {
                held[i as usize].insert(t.block);
            }
        }
        out.push(snapshot(&held));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Interchange format
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterchangeError {
    #[error("line {line}: expected `slot {expected}`, got {got:?}")]
    BadSlotHeader {
        line: usize,
        expected: usize,
        got: String,
    },
    #[error("line {line}: transfer before any `slot` header")]
    TransferBeforeSlot { line: usize },
    #[error("line {line}: expected `<from> <to> <block>`, got {got:?}")]
    BadTransfer { line: usize, got: String },
    #[error("unrecognized host {0:?} (expected `S` or `H<i>`)")]
    BadHost(String),
    #[error("line {line}: invalid block index {got:?}")]
    BadBlock { line: usize, got: String },
}

/// Renders a scheme in the line-oriented interchange format: each slot opens
/// with a `slot <index>` header (1-based) followed by one `<from> <to>
/// <block>` line per transfer, hosts spelled `S` or `H<i>`.
pub fn scheme_to_string(scheme: &Scheme) -> String {
    let mut out = String::new();
    for (idx, slot) in scheme.slots.iter().enumerate() {
        out.push_str(&format!("slot {}\n", idx + 1));
        for t in &slot.transfers {
            out.push_str(&format!("{} {} {}\n", t.from, t.to, t.block));
        }
    }
    out
}

/// Parses the interchange format produced by [`scheme_to_string`]. Blank
/// lines and `#` comments are skipped; slot headers must count up from 1.
/// Only syntax is checked here; rule conformance is [`validate_scheme`]'s
/// job.
pub fn parse_scheme(text: &str) -> Result<Scheme, InterchangeError> {
    let mut slots: Vec<SlotSchedule> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0] == "slot" {
            let expected = slots.len() + 1;
            let ok = fields.len() == 2 && fields[1].parse::<usize>() == Ok(expected);
            if !ok {
                return Err(InterchangeError::BadSlotHeader {
                    line,
                    expected,
                    got: trimmed.to_string(),
                });
            }
            slots.push(SlotSchedule::default());
            continue;
        }
        if fields.len() != 3 {
            return Err(InterchangeError::BadTransfer {
                line,
                got: trimmed.to_string(),
            });
        }
        let from: HostId = fields[0].parse()?;
        let to: HostId = fields[1].parse()?;
        let block: BlockId = fields[2]
            .parse()
            .map_err(|_| InterchangeError::BadBlock {
                line,
                got: fields[2].to_string(),
            })?;
        let slot = slots
            .last_mut()
            .ok_or(InterchangeError::TransferBeforeSlot { line })?;
        slot.transfers.push(Transfer::new(from, to, block));
    }
    Ok(Scheme::new(slots))
}
