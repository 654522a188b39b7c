//! Slotted peer-assisted file distribution with exact energy accounting.
//!
//! A server holds a file of `B` bits split into `beta` equal blocks and must
//! deliver every block to `n` clients over a fully connected network. Time is
//! slotted: every block transfer starts and completes within one slot of
//! duration `gamma = s/u` (block size over upload capacity). A host may upload
//! to at most one other host per slot and may download up to `k = d/u` blocks
//! in parallel. An active host burns `Delta_i = P_i * gamma + delta_i` joules
//! per slot.
//!
//! The crate provides:
//!
//! - [`model`]: schedule and host types, schedule validation, per-slot
//!   transfer-graph classification, state replay, and a line-oriented
//!   interchange format.
//! - [`energy`]: exact per-slot / per-block / whole-scheme energy accounting
//!   (all arithmetic in arbitrary-precision rationals), two-state and
//!   four-state power models, and the block-vs-slot consistency check.
//! - [`bounds`]: closed-form lower bounds, optimal-scheme energies and the
//!   optimal block count.
//! - [`schedulers`]: constructive generators for the optimal schemes, the
//!   `k = 2` near-optimal scheme, and the serial / parallel baselines.
//! - [`reduction`]: the Partition gadget showing the heterogeneous problem is
//!   NP-hard, with witness schedules and a brute-force oracle.
//! - [`sim`]: a seeded, reproducible simulator adding on/off switching costs,
//!   load-proportional power, heterogeneous hosts and link congestion.
//! - [`cli`]: the command-line front end used by the `joulecast` binary.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each one
//! demonstrates a single capability end to end.

pub mod bounds;
pub mod cli;
pub mod energy;
pub mod model;
pub mod rational;
pub mod reduction;
pub mod schedulers;
pub mod sim;
