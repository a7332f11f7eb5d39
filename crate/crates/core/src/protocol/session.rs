use super::{Alice, Bob, Message, MessagePort, ProtocolError, SessionConfig, Status};
use crate::channel::hamming_distance;
use crate::ldpc::ParityCheckMatrix;
use crate::metrics::ExecutionRecord;
use crate::rate::Role;
use crate::rng::{derive_seed, Prng};

const STREAM_TAG: u64 = 3;

/// Everything observable about one completed session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub success: bool,
    /// Number of `Nack`s answered with a reveal.
    pub rounds_used: usize,
    pub n: usize,
    /// Punctured symbols at termination.
    pub punctured: usize,
    /// Shortened symbols at termination.
    pub shortened: usize,
    pub pi: f64,
    pub sigma: f64,
    /// Modulated rate of the last decoding attempt.
    pub rate: f64,
    /// Syndrome plus revealed symbols, `m + s`.
    pub disclosed_bits: usize,
    /// Information about the key actually leaked, `m - p`.
    pub leaked_bits: usize,
    pub decoded_key: Option<Vec<u8>>,
    /// Key bits where Bob's final estimate still differs from Alice.
    pub residual_errors: usize,
    pub decoder_iterations: usize,
    /// Outcome of the optional key-tag comparison.
    pub tag_match: Option<bool>,
    pub transcript: Vec<Message>,
}

impl SessionResult {
    pub fn record(&self, crossover: f64) -> ExecutionRecord {
        ExecutionRecord {
            n: self.n,
            punctured: self.punctured,
            shortened: self.shortened,
            rounds: self.rounds_used,
            success: self.success,
            crossover,
        }
    }
}

/// 64-bit GF(2)-linear hash of `key`: XOR of one seeded random word per set
/// bit. Two distinct keys collide with probability 2^-64.
pub fn verification_tag(key: &[u8], seed: u64) -> u64 {
    let mut rng = Prng::from_seed(seed);
    key.iter().fold(0, |acc, &bit| {
        let word = rng.next_u64();
        if bit & 1 == 1 {
            acc ^ word
        } else {
            acc
        }
    })
}

/// Runs a full session between an honest Alice and Bob in the current
/// thread. Decoding failure is reported in the result; only configuration
/// problems and protocol violations are errors.
pub fn run_session(
    alice_key: &[u8],
    bob_observed: &[u8],
    code: &ParityCheckMatrix,
    config: &SessionConfig,
    seed: u64,
) -> Result<SessionResult, ProtocolError> {
    let (mut alice, start) = Alice::start(alice_key, code, config, seed)?;
    if bob_observed.len() != alice_key.len() {
        return Err(ProtocolError::Config(format!(
            "Bob holds {} bits, Alice {}",
            bob_observed.len(),
            alice_key.len()
        )));
    }
    let mut bob = Bob::new(code, bob_observed.to_vec(), config.decoding)?;

    let mut transcript = Vec::new();
    let mut to_bob = Some(start);
    while let Some(msg) = to_bob.take() {
        transcript.push(msg.clone());
        let Some(reply) = bob.on_message(msg)? else {
            break;
        };
        transcript.push(reply.clone());
        to_bob = alice.on_message(reply)?;
    }

    let frame = alice.frame();
    let punctured = frame.count(Role::Punctured);
    let shortened = frame.count(Role::Shortened);
    let n = code.n();
    let mut success = alice.status() == Status::Success && bob.status() == Status::Success;
    let estimate = bob.estimated_key();
    let residual_errors = match &estimate {
        Some(k) => hamming_distance(alice_key, k),
        None => hamming_distance(alice_key, bob_observed),
    };

    let tag_match = if config.verify_tag && success {
        let tag_seed = derive_seed(seed, STREAM_TAG, 0);
        let bob_key = bob.decoded_key().expect("Bob succeeded");
        let matched = verification_tag(alice_key, tag_seed) == verification_tag(&bob_key, tag_seed);
        success = matched;
        Some(matched)
    } else {
        None
    };

    Ok(SessionResult {
        success,
        rounds_used: alice.round(),
        n,
        punctured,
        shortened,
        pi: punctured as f64 / n as f64,
        sigma: shortened as f64 / n as f64,
        rate: alice.schedule().rows()[alice.round()].rate,
        disclosed_bits: alice.disclosed_bits(),
        leaked_bits: code.m() - punctured,
        decoded_key: if success { bob.decoded_key() } else { None },
        residual_errors,
        decoder_iterations: bob.total_iterations(),
        tag_match,
        transcript,
    })
}

/// What one endpoint saw of a session run over a [`MessagePort`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartyOutcome {
    pub status: Status,
    pub rounds_used: usize,
    /// Messages sent and received, in order.
    pub transcript: Vec<Message>,
}

/// Drives Alice over `port` until the session ends. On a protocol violation
/// the peer is sent `Abort` before the error is returned.
pub fn run_alice<P: MessagePort>(
    port: &mut P,
    alice: &mut Alice,
    start: Message,
) -> Result<PartyOutcome, ProtocolError> {
    let mut transcript = vec![start.clone()];
    port.send(&start)?;
    while alice.status() == Status::Running {
        let msg = port.recv()?;
        transcript.push(msg.clone());
        match alice.on_message(msg) {
            Ok(Some(reply)) => {
                port.send(&reply)?;
                transcript.push(reply);
            }
            Ok(None) => {}
            Err(e) => {
                let _ = port.send(&Message::Abort(e.to_string()));
                return Err(e);
            }
        }
    }
    Ok(PartyOutcome {
        status: alice.status(),
        rounds_used: alice.round(),
        transcript,
    })
}

/// Drives Bob over `port` until the session ends.
pub fn run_bob<P: MessagePort>(port: &mut P, bob: &mut Bob) -> Result<PartyOutcome, ProtocolError> {
    let mut transcript = Vec::new();
    while bob.status() == Status::Running {
        let msg = port.recv()?;
        transcript.push(msg.clone());
        match bob.on_message(msg) {
            Ok(Some(reply)) => {
                port.send(&reply)?;
                transcript.push(reply);
            }
            Ok(None) => {}
            Err(e) => {
                let _ = port.send(&Message::Abort(e.to_string()));
                return Err(e);
            }
        }
    }
    Ok(PartyOutcome {
        status: bob.status(),
        rounds_used: bob.round(),
        transcript,
    })
}
