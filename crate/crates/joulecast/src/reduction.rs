//! Hardness gadget: minimizing distribution energy with heterogeneous upload
//! capacities and powers encodes the Partition problem.
//!
//! An instance over values `x_0..x_{k-1}` with even sum `M` becomes a
//! distribution problem with `M` unit blocks and hosts `S` (the source), `T`
//! (a full-capacity mirror), one item host per value with upload capacity
//! `x_i`, and a sink `R` that can absorb exactly `M/2` blocks per slot but
//! burns power `P' > 2P(2k + 1)` while on. The file can be distributed with
//! energy below `3 P'` exactly when a subset of the values sums to `M / 2`:
//! only then can the sink be fed at full rate and finish in two slots.
//!
//! Schedules here are capacity weighted (a transfer carries a set of unit
//! blocks) and validated by a generalized checker local to this module; the
//! uniform-capacity validator in [`crate::model`] is untouched.

use std::collections::BTreeSet;
use std::fmt;

use num::rational::BigRational;
use num::Signed;
use num::Zero;
use thiserror::Error;

use crate::rational;

/// A Partition instance: positive integers with an even sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInput {
    values: Vec<u64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("partition input needs more than one value")]
    TooFewValues,
    #[error("partition values must be positive")]
    ZeroValue,
    #[error("partition values must sum to an even number, got {sum}")]
    OddSum { sum: u64 },
    #[error("power must be positive")]
    NonPositivePower,
    #[error("subset sums to {got}, expected {want}")]
    SubsetSumMismatch { got: u64, want: u64 },
    #[error("subset index {index} out of range")]
    SubsetIndexOutOfRange { index: usize },
    #[error("subset repeats index {index}")]
    SubsetDuplicateIndex { index: usize },
    #[error("exhaustive search supports at most {max} values, got {got}")]
    TooManyValues { max: u32, got: usize },
}

impl PartitionInput {
    pub fn new(values: Vec<u64>) -> Result<Self, ReductionError> {
        if values.len() < 2 {
            return Err(ReductionError::TooFewValues);
        }
        if values.contains(&0) {
            return Err(ReductionError::ZeroValue);
        }
        let sum: u64 = values.iter().sum();
        if !sum.is_multiple_of(2) {
            return Err(ReductionError::OddSum { sum });
        }
        Ok(PartitionInput { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Number of values `k`; always at least 2.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Never empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total `M` of all values.
    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Target subset sum `M / 2`.
    pub fn target(&self) -> u64 {
        self.total() / 2
    }
}

/// Hosts of the gadget instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GadgetHostId {
    /// Source holding the file.
    Server,
    /// Full-capacity mirror fed first.
    Mirror,
    /// Capacity-`M/2`, high-power sink.
    Sink,
    /// One host per partition value, uploading at `x_i` blocks per slot.
    Item(u32),
}

impl fmt::Display for GadgetHostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetHostId::Server => write!(f, "S"),
            GadgetHostId::Mirror => write!(f, "T"),
            GadgetHostId::Sink => write!(f, "R"),
            GadgetHostId::Item(i) => write!(f, "H{i}"),
        }
    }
}

/// One gadget host with blocks-per-slot capacities and nominal power.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetHost {
    pub id: GadgetHostId,
    pub upload_blocks: u64,
    pub download_blocks: u64,
    pub power: BigRational,
}

/// A heterogeneous distribution instance generated from a Partition input:
/// `M` unit blocks, unit slot length, zero per-block and switching energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionInstance {
    pub values: Vec<u64>,
    pub block_count: u64,
    pub hosts: Vec<GadgetHost>,
    pub power: BigRational,
    pub sink_power: BigRational,
    /// Decision threshold `3 P'`.
    pub threshold: BigRational,
}

impl ReductionInstance {
    pub fn host(&self, id: GadgetHostId) -> &GadgetHost {
        self.hosts
            .iter()
            .find(|h| h.id == id)
            .expect("gadget host")
    }
}

/// A capacity-weighted transfer: `blocks` all move from `from` to `to`
/// within one unit slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetTransfer {
    pub from: GadgetHostId,
    pub to: GadgetHostId,
    pub blocks: Vec<u64>,
}

/// A slotted schedule over gadget transfers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GadgetSchedule {
    pub slots: Vec<Vec<GadgetTransfer>>,
}

/// A feasible schedule witnessing a Partition solution, with its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub schedule: GadgetSchedule,
    pub energy: BigRational,
}

/// Builds the gadget instance for a Partition input. The sink power is set
/// to `2P(2k + 1) + P`, the smallest simple choice strictly above the
/// required bound.
pub fn build_instance(
    input: &PartitionInput,
    power: &BigRational,
) -> Result<ReductionInstance, ReductionError> {
    if !power.is_positive() {
        return Err(ReductionError::NonPositivePower);
    }
    let k = input.len() as u64;
    let m = input.total();
    let sink_power = rational::uint(2 * (2 * k + 1)) * power + power;
    let mut hosts = vec![
        GadgetHost {
            id: GadgetHostId::Server,
            upload_blocks: m,
            download_blocks: 0,
            power: power.clone(),
        },
        GadgetHost {
            id: GadgetHostId::Mirror,
            upload_blocks: m,
            download_blocks: m,
            power: power.clone(),
        },
        GadgetHost {
            id: GadgetHostId::Sink,
            upload_blocks: 0,
            download_blocks: m / 2,
            power: sink_power.clone(),
        },
    ];
    for (i, &x) in input.values().iter().enumerate() {
        hosts.push(GadgetHost {
            id: GadgetHostId::Item(i as u32),
            upload_blocks: x,
            download_blocks: m,
            power: power.clone(),
        });
    }
    Ok(ReductionInstance {
        values: input.values().to_vec(),
        block_count: m,
        hosts,
        power: power.clone(),
        sink_power: sink_power.clone(),
        threshold: rational::int(3) * sink_power,
    })
}

/// Energy of a gadget schedule: with unit slots and zero per-block energy,
/// each host pays its power for every slot it appears in.
pub fn schedule_energy(instance: &ReductionInstance, schedule: &GadgetSchedule) -> BigRational {
    let mut total = BigRational::zero();
    for slot in &schedule.slots {
        let active: BTreeSet<GadgetHostId> = slot
            .iter()
            .flat_map(|t| [t.from, t.to])
            .collect();
        for id in active {
            total += &instance.host(id).power;
        }
    }
    total
}

/// Capacity-weighted validation of a gadget schedule: per slot each host
/// uploads to at most one peer and within its block budget, each receiver
/// stays within its download budget, blocks are only served once held, and
/// at the end every non-server host holds all `M` blocks. Returns the list
/// of violation messages.
pub fn validate_gadget_schedule(
    instance: &ReductionInstance,
    schedule: &GadgetSchedule,
) -> Vec<String> {
    let m = instance.block_count;
    let mut errors = Vec::new();
    let mut held: std::collections::BTreeMap<GadgetHostId, BTreeSet<u64>> = instance
        .hosts
        .iter()
        .map(|h| {
            let blocks = if h.id == GadgetHostId::Server {
                (0..m).collect()
            } else {
                BTreeSet::new()
            };
            (h.id, blocks)
        })
        .collect();

    for (idx, slot) in schedule.slots.iter().enumerate() {
        let slot_no = idx + 1;
        let mut upload_load: std::collections::BTreeMap<GadgetHostId, (BTreeSet<GadgetHostId>, u64)> =
            Default::default();
        let mut download_load: std::collections::BTreeMap<GadgetHostId, u64> = Default::default();
        for t in slot {
            if t.from == t.to || t.to == GadgetHostId::Server {
                errors.push(format!("slot {slot_no}: illegal endpoint {} -> {}", t.from, t.to));
            }
            for &b in &t.blocks {
                if b >= m {
                    errors.push(format!("slot {slot_no}: block {b} out of range"));
                } else if !held[&t.from].contains(&b) {
                    errors.push(format!(
                        "slot {slot_no}: {} serves block {b} it does not hold",
                        t.from
                    ));
                }
            }
            let entry = upload_load.entry(t.from).or_default();
            entry.0.insert(t.to);
            entry.1 += t.blocks.len() as u64;
            *download_load.entry(t.to).or_default() += t.blocks.len() as u64;
        }
        for (id, (peers, blocks)) in upload_load {
            if peers.len() > 1 {
                errors.push(format!("slot {slot_no}: {id} uploads to {} hosts", peers.len()));
            }
            if blocks > instance.host(id).upload_blocks {
                errors.push(format!(
                    "slot {slot_no}: {id} uploads {blocks} blocks over capacity {}",
                    instance.host(id).upload_blocks
                ));
            }
        }
        for (id, blocks) in download_load {
            if blocks > instance.host(id).download_blocks {
                errors.push(format!(
                    "slot {slot_no}: {id} downloads {blocks} blocks over capacity {}",
                    instance.host(id).download_blocks
                ));
            }
        }
        for t in slot {
            let dest = held.entry(t.to).or_default();
            for &b in &t.blocks {
                if b < m {
                    dest.insert(b);
                }
            }
        }
    }

    for host in &instance.hosts {
        if host.id == GadgetHostId::Server {
            continue;
        }
        if held[&host.id].len() as u64 != m {
            errors.push(format!("{} never receives the whole file", host.id));
        }
    }
    errors
}

/// Builds the feasible low-energy schedule for a qualifying subset: the
/// mirror is fed in one slot, the mirror feeds every item host in one slot
/// each, then the subset hosts stream to the sink at full rate for exactly
/// two slots (each contributing `x_i` blocks per slot, block ranges assigned
/// greedily and disjointly). Fails if the subset does not sum to `M / 2`.
pub fn witness_schedule(
    instance: &ReductionInstance,
    subset: &[usize],
) -> Result<Witness, ReductionError> {
    let mut seen = BTreeSet::new();
    for &i in subset {
        if i >= instance.values.len() {
            return Err(ReductionError::SubsetIndexOutOfRange { index: i });
        }
        if !seen.insert(i) {
            return Err(ReductionError::SubsetDuplicateIndex { index: i });
        }
    }
    let m = instance.block_count;
    let got: u64 = subset.iter().map(|&i| instance.values[i]).sum();
    if got != m / 2 {
        return Err(ReductionError::SubsetSumMismatch { got, want: m / 2 });
    }

    let all_blocks: Vec<u64> = (0..m).collect();
    let mut slots = Vec::new();
    slots.push(vec![GadgetTransfer {
        from: GadgetHostId::Server,
        to: GadgetHostId::Mirror,
        blocks: all_blocks.clone(),
    }]);
    for i in 0..instance.values.len() {
        slots.push(vec![GadgetTransfer {
            from: GadgetHostId::Mirror,
            to: GadgetHostId::Item(i as u32),
            blocks: all_blocks.clone(),
        }]);
    }
    let mut next_block = 0u64;
    for _ in 0..2 {
        let mut slot = Vec::new();
        for &i in subset {
            let x = instance.values[i];
            slot.push(GadgetTransfer {
                from: GadgetHostId::Item(i as u32),
                to: GadgetHostId::Sink,
                blocks: (next_block..next_block + x).collect(),
            });
            next_block += x;
        }
        slots.push(slot);
    }
    let schedule = GadgetSchedule { slots };
    let energy = schedule_energy(instance, &schedule);
    Ok(Witness { schedule, energy })
}

/// Exhaustively searches for a subset summing to `M / 2`, returning the
/// lexicographically first one (by index sequence) if any exists. Rejects
/// inputs with more than 24 values.
pub fn decide_small(input: &PartitionInput) -> Result<Option<Vec<usize>>, ReductionError> {
    const MAX_VALUES: u32 = 24;
    if input.len() > MAX_VALUES as usize {
        return Err(ReductionError::TooManyValues {
            max: MAX_VALUES,
            got: input.len(),
        });
    }
    let values = input.values();
    let target = input.target();
    let suffix_sums: Vec<u64> = {
        let mut sums = vec![0u64; values.len() + 1];
        for i in (0..values.len()).rev() {
            sums[i] = sums[i + 1] + values[i];
        }
        sums
    };
    // Depth-first, include-first search visits subsets in lexicographic
    // order of their index sequences.
    fn dfs(
        values: &[u64],
        suffix: &[u64],
        i: usize,
        remaining: u64,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if remaining == 0 {
            return !chosen.is_empty();
        }
        if i == values.len() || suffix[i] < remaining {
            return false;
        }
        if values[i] <= remaining {
            chosen.push(i);
            if dfs(values, suffix, i + 1, remaining - values[i], chosen) {
                return true;
            }
            chosen.pop();
        }
        dfs(values, suffix, i + 1, remaining, chosen)
    }
    let mut chosen = Vec::new();
    if dfs(values, &suffix_sums, 0, target, &mut chosen) {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

/// Checks both directions of the reduction for one input: when the oracle
/// finds a qualifying subset, the witness schedule must validate and land
/// strictly below the `3 P'` threshold; when it finds none, no subset over
/// all `2^k` candidates may qualify (so no witness of that shape exists).
pub fn check_iff(input: &PartitionInput, power: &BigRational) -> Result<bool, ReductionError> {
    let instance = build_instance(input, power)?;
    match decide_small(input)? {
        Some(subset) => {
            let witness = witness_schedule(&instance, &subset)?;
            let valid = validate_gadget_schedule(&instance, &witness.schedule).is_empty();
            Ok(valid && witness.energy < instance.threshold)
        }
        None => {
            let k = input.len();
            let target = input.target();
            for mask in 1u64..(1u64 << k) {
                let sum: u64 = (0..k)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| input.values()[i])
                    .sum();
                if sum == target {
                    return Ok(false); // oracle and enumeration disagree
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn input(values: &[u64]) -> PartitionInput {
        PartitionInput::new(values.to_vec()).unwrap()
    }

    #[test]
    fn instance_construction_matches_the_gadget() {
        let inst = build_instance(&input(&[1, 1, 2]), &rational::int(1)).unwrap();
        assert_eq!(inst.block_count, 4);
        assert_eq!(inst.sink_power, rational::int(15));
        assert_eq!(inst.threshold, rational::int(45));
        assert_eq!(inst.hosts.len(), 6); // S, T, R + 3 items
        assert_eq!(inst.host(GadgetHostId::Sink).download_blocks, 2);
        assert_eq!(inst.host(GadgetHostId::Item(2)).upload_blocks, 2);
    }

    #[test]
    fn smallest_instance_has_five_hosts() {
        let inst = build_instance(&input(&[1, 1]), &rational::int(1)).unwrap();
        let ids: Vec<GadgetHostId> = inst.hosts.iter().map(|h| h.id).collect();
        assert_eq!(
            ids,
            vec![
                GadgetHostId::Server,
                GadgetHostId::Mirror,
                GadgetHostId::Sink,
                GadgetHostId::Item(0),
                GadgetHostId::Item(1)
            ]
        );
    }

    #[test]
    fn odd_sums_are_rejected() {
        assert!(matches!(
            PartitionInput::new(vec![1, 2]),
            Err(ReductionError::OddSum { sum: 3 })
        ));
        assert!(matches!(
            PartitionInput::new(vec![4]),
            Err(ReductionError::TooFewValues)
        ));
        assert!(matches!(
            PartitionInput::new(vec![0, 2]),
            Err(ReductionError::ZeroValue)
        ));
    }

    #[test]
    fn witness_energies_match_the_formula() {
        let inst = build_instance(&input(&[1, 1, 2]), &rational::int(1)).unwrap();
        let w = witness_schedule(&inst, &[2]).unwrap();
        assert_eq!(w.energy, rational::int(40));
        assert!(w.energy < inst.threshold);
        assert!(validate_gadget_schedule(&inst, &w.schedule).is_empty());

        let w = witness_schedule(&inst, &[0, 1]).unwrap();
        assert_eq!(w.energy, rational::int(42));
        assert!(w.energy < inst.threshold);
        assert!(validate_gadget_schedule(&inst, &w.schedule).is_empty());
    }

    #[test]
    fn wrong_subsets_are_rejected() {
        let inst = build_instance(&input(&[1, 1, 2]), &rational::int(1)).unwrap();
        assert!(matches!(
            witness_schedule(&inst, &[0]),
            Err(ReductionError::SubsetSumMismatch { got: 1, want: 2 })
        ));
        assert!(matches!(
            witness_schedule(&inst, &[7]),
            Err(ReductionError::SubsetIndexOutOfRange { index: 7 })
        ));
        assert!(matches!(
            witness_schedule(&inst, &[2, 2]),
            Err(ReductionError::SubsetDuplicateIndex { index: 2 })
        ));
    }

    #[test]
    fn oracle_finds_lexicographically_first_subsets() {
        assert_eq!(decide_small(&input(&[1, 1, 2])).unwrap(), Some(vec![0, 1]));
        assert_eq!(decide_small(&input(&[3, 5])).unwrap(), None);
        assert_eq!(decide_small(&input(&[7, 7])).unwrap(), Some(vec![0]));
        assert_eq!(
            decide_small(&input(&[3, 5, 4, 2])).unwrap(),
            Some(vec![0, 2])
        );
        let big = PartitionInput::new(vec![2; 30]).unwrap();
        assert!(matches!(
            decide_small(&big),
            Err(ReductionError::TooManyValues { .. })
        ));
    }

    #[test]
    fn witness_energy_stays_under_the_chain_bound() {
        // 2P + 2Pk + 2(|A'| P + P') <= 2P(2k + 1) + 2P' < 3P'.
        for values in [vec![1u64, 3, 4, 6], vec![2, 2, 2, 2, 4], vec![9, 1, 6, 4]] {
            let inp = input(&values);
            let p = rational::int(3);
            let inst = build_instance(&inp, &p).unwrap();
            let subset = decide_small(&inp).unwrap().expect("solvable instance");
            let w = witness_schedule(&inst, &subset).unwrap();
            let k = rational::uint(inp.len() as u64);
            let chain = rational::int(2) * &p * (rational::int(2) * k + rational::int(1))
                + rational::int(2) * &inst.sink_power;
            assert!(w.energy <= chain);
            assert!(chain < inst.threshold);
        }
    }

    #[test]
    fn iff_holds_on_the_worked_examples() {
        let p = rational::int(1);
        assert!(check_iff(&input(&[1, 1, 2]), &p).unwrap());
        assert!(check_iff(&input(&[3, 5, 4, 2]), &p).unwrap());
        // {1, 3}: subsets sum to 1, 3 or 4, never 2.
        assert!(check_iff(&input(&[1, 3]), &p).unwrap());
    }

    #[test]
    fn iff_holds_on_random_instances() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 300 {
            let k = rng.gen_range(2..=10);
            let values: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=50)).collect();
            let Ok(inp) = PartitionInput::new(values) else {
                continue;
            };
            let p = rational::uint(rng.gen_range(1..=5));
            assert!(check_iff(&inp, &p).unwrap());
            checked += 1;
        }
    }
}
