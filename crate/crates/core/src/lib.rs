//! Blind interactive information reconciliation with rate-adaptive LDPC
//! codes.
//!
//! Two parties holding correlated bit strings reconcile them by syndrome
//! coding on a single mother code. The code rate starts at its maximum (all
//! modulation symbols punctured) and is lowered one step per failed decoding
//! attempt by revealing some punctured symbols, which turns them into
//! shortened symbols. No channel estimate is needed up front.
//!
//! Module map:
//!
//! * [`ldpc`]: parity-check matrices, PEG construction, alist I/O, syndromes
//! * [`decoder`]: syndrome sum-product decoding with punctured/shortened
//!   side information
//! * [`rate`]: puncturing/shortening algebra, round schedules and frames
//! * [`protocol`]: Alice/Bob state machines, wire codec and session driver
//! * [`channel`]: seeded binary symmetric channel
//! * [`metrics`]: entropy and reconciliation-efficiency bookkeeping
//! * [`rng`]: the pinned PRNG behind every random draw

pub mod channel;
pub mod decoder;
pub mod ldpc;
pub mod metrics;
pub mod protocol;
pub mod rate;
pub mod rng;
