//! Blind interactive reconciliation between Alice (holder of the reference
//! key) and Bob (holder of a noisy copy).
//!
//! 1. Alice lays her key out in a frame whose `⌊δn⌋` reserved symbols are
//!    all punctured with random filler, and sends `Start` with the frame's
//!    syndrome. Both sides derive the reserved positions from a seed carried
//!    in `Start`.
//! 2. Bob decodes. On a syndrome match he replies `Ack`; otherwise `Nack`.
//! 3. Each `Nack` makes Alice reveal the next batch of punctured symbols
//!    (`Reveal`), lowering the rate one schedule step, and Bob decodes again.
//! 4. If decoding still fails once every reserved symbol is shortened, Bob
//!    sends `Abort` and the session fails.

mod alice;
mod bob;
mod message;
mod session;
mod transport;

pub use alice::Alice;
pub use bob::Bob;
pub use message::{read_message, write_message, Message, Reveal, Start, WireError, MAX_PAYLOAD};
pub use session::{run_alice, run_bob, run_session, verification_tag, PartyOutcome, SessionResult};
pub use transport::{duplex, FramedPort, InProcessPort, MessagePort};

use thiserror::Error;

use crate::decoder::{DecodeError, DEFAULT_MAX_ITERS};
use crate::ldpc::LdpcError;
use crate::metrics::crossover_for_capacity;
use crate::rate::{ModulationParams, RateError};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("protocol violation: {0}")]
    Violation(String),
    #[error("peer aborted: {0}")]
    PeerAborted(String),
    #[error("transport closed")]
    Disconnected,
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Terminal state of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    Success,
    Failure,
}

/// Crossover the decoder assumes when turning Bob's bits into LLRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossoverPolicy {
    /// Solve `1 - h2(e) = R_j` for the current modulated rate, clamped to
    /// the configured error range when there is one.
    CapacityMatched,
    Fixed(f64),
}

/// Decoder-side settings. Bob needs only these; everything else arrives in
/// `Start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingSettings {
    /// Expected channel error range `[e0, e1]`.
    pub error_range: Option<(f64, f64)>,
    pub max_iters: usize,
    pub crossover: CrossoverPolicy,
}

impl Default for DecodingSettings {
    fn default() -> Self {
        DecodingSettings {
            error_range: None,
            max_iters: DEFAULT_MAX_ITERS,
            crossover: CrossoverPolicy::CapacityMatched,
        }
    }
}

impl DecodingSettings {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.max_iters == 0 {
            return Err(ProtocolError::Config("max_iters must be at least 1".into()));
        }
        if let CrossoverPolicy::Fixed(e) = self.crossover {
            if !(e > 0.0 && e < 0.5) {
                return Err(ProtocolError::Config(format!(
                    "assumed crossover {e} outside (0, 0.5)"
                )));
            }
        }
        if let Some((e0, e1)) = self.error_range {
            if !(0.0 <= e0 && e0 <= e1 && e1 < 0.5) {
                return Err(ProtocolError::Config(format!(
                    "error range [{e0}, {e1}] invalid"
                )));
            }
        }
        Ok(())
    }

    /// Decoder crossover for a round decoded at `rate`.
    pub fn assumed_crossover(&self, rate: f64) -> f64 {
        match self.crossover {
            CrossoverPolicy::Fixed(e) => e,
            CrossoverPolicy::CapacityMatched => {
                let mut e = crossover_for_capacity(rate);
                if let Some((e0, e1)) = self.error_range {
                    e = e.clamp(e0, e1);
                }
                e.clamp(1e-6, 0.5 - 1e-6)
            }
        }
    }
}

/// Everything Alice needs to open a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub modulation: ModulationParams,
    pub decoding: DecodingSettings,
    /// Check a 64-bit key tag after `Ack` (session driver only).
    pub verify_tag: bool,
}

impl SessionConfig {
    pub fn new(modulation: ModulationParams) -> Self {
        SessionConfig {
            modulation,
            decoding: DecodingSettings::default(),
            verify_tag: false,
        }
    }

    pub fn with_error_range(mut self, e0: f64, e1: f64) -> Self {
        self.decoding.error_range = Some((e0, e1));
        self
    }

    /// Decoding settings plus coverage of the error range by the modulated
    /// rates.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        self.decoding.validate()?;
        if let Some((e0, e1)) = self.decoding.error_range {
            let m = &self.modulation;
            if !crate::rate::range_check(m.r0(), m.delta(), e0, e1) {
                return Err(ProtocolError::Config(format!(
                    "rates for R0 = {}, delta = {} do not cover errors in [{e0}, {e1}]",
                    m.r0(),
                    m.delta()
                )));
            }
        }
        Ok(())
    }
}
