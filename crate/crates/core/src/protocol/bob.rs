use std::collections::BTreeMap;

use super::{DecodingSettings, Message, ProtocolError, Reveal, Start, Status};
use crate::decoder::{decode_syndrome, init_llrs, DecodeResult};
use crate::ldpc::{ParityCheckMatrix, Syndrome};
use crate::rate::{
    build_schedule, key_positions, select_reserved_positions, ModulationParams, RoundSchedule,
};

/// Bob's side: holds the noisy key and decodes after every message from
/// Alice.
#[derive(Debug, Clone)]
pub struct Bob<'a> {
    code: &'a ParityCheckMatrix,
    observed: Vec<u8>,
    settings: DecodingSettings,
    session: Option<Session>,
    status: Status,
    abort_reason: Option<String>,
}

#[derive(Debug, Clone)]
struct Session {
    schedule: RoundSchedule,
    target: Syndrome,
    key_positions: Vec<usize>,
    // Observed key bits in place, zeros in reserved positions.
    word: Vec<u8>,
    punctured: Vec<bool>,
    shortened: BTreeMap<usize, u8>,
    round: usize,
    awaiting_reveal: bool,
    last: Option<DecodeResult>,
    iterations: usize,
}

impl<'a> Bob<'a> {
    pub fn new(
        code: &'a ParityCheckMatrix,
        observed_key: Vec<u8>,
        settings: DecodingSettings,
    ) -> Result<Self, ProtocolError> {
        settings.validate()?;
        Ok(Bob {
            code,
            observed: observed_key,
            settings,
            session: None,
            status: Status::Running,
            abort_reason: None,
        })
    }

    /// Processes one message from Alice and returns the reply, if any.
    ///
    /// Any message that breaks the protocol ends the session as a failure
    /// and comes back as `ProtocolError::Violation`.
    pub fn on_message(&mut self, msg: Message) -> Result<Option<Message>, ProtocolError> {
        if self.status != Status::Running {
            return Err(ProtocolError::Violation(format!(
                "{} received after the session ended",
                msg.kind()
            )));
        }
        let reply = match msg {
            Message::Start(start) => self.on_start(start),
            Message::Reveal(reveal) => self.on_reveal(reveal),
            Message::Abort(reason) => {
                self.status = Status::Failure;
                self.abort_reason = Some(reason);
                return Ok(None);
            }
            other => Err(ProtocolError::Violation(format!(
                "Bob cannot handle {}",
                other.kind()
            ))),
        };
        if reply.is_err() {
            self.status = Status::Failure;
        }
        reply.map(Some)
    }

    fn on_start(&mut self, start: Start) -> Result<Message, ProtocolError> {
        if self.session.is_some() {
            return Err(ProtocolError::Violation("second Start".into()));
        }
        let (n, m) = (start.n as usize, start.m as usize);
        if n != self.code.n() || m != self.code.m() {
            return Err(ProtocolError::Violation(format!(
                "Start describes a {m}x{n} code, Bob holds {}x{}",
                self.code.m(),
                self.code.n()
            )));
        }
        if start.syndrome.len() != m || start.syndrome.iter().any(|&b| b > 1) {
            return Err(ProtocolError::Violation("bad syndrome in Start".into()));
        }
        let params = ModulationParams::new(n, start.r0, start.delta, start.q_rounds as usize)
            .map_err(|e| ProtocolError::Violation(format!("bad parameters in Start: {e}")))?;
        if params.syndrome_length() != m {
            return Err(ProtocolError::Violation(format!(
                "R0 = {} is inconsistent with {m} checks",
                start.r0
            )));
        }
        if self.observed.len() != params.key_length() {
            return Err(ProtocolError::Violation(format!(
                "Bob holds {} key bits, frame carries {}",
                self.observed.len(),
                params.key_length()
            )));
        }

        let reserved = select_reserved_positions(n, params.reserved(), start.position_seed);
        let key_positions = key_positions(n, &reserved);
        let mut word = vec![0u8; n];
        for (&pos, &bit) in key_positions.iter().zip(&self.observed) {
            word[pos] = bit & 1;
        }
        let mut punctured = vec![false; n];
        for &r in &reserved {
            punctured[r] = true;
        }
        self.session = Some(Session {
            schedule: build_schedule(&params),
            target: Syndrome::new(start.syndrome),
            key_positions,
            word,
            punctured,
            shortened: BTreeMap::new(),
            round: 0,
            awaiting_reveal: false,
            last: None,
            iterations: 0,
        });
        self.attempt()
    }

    fn on_reveal(&mut self, reveal: Reveal) -> Result<Message, ProtocolError> {
        let session = self
            .session
            .as_mut()
            .ok_or_else(|| ProtocolError::Violation("Reveal before Start".into()))?;
        if !session.awaiting_reveal {
            return Err(ProtocolError::Violation("Reveal without a pending Nack".into()));
        }
        let round = reveal.round as usize;
        if round != session.round + 1 || round > session.schedule.last_round() {
            return Err(ProtocolError::Violation(format!(
                "Reveal for round {round}, expected {}",
                session.round + 1
            )));
        }
        let expected = session.schedule.conversions_into(round);
        if reveal.entries.len() != expected {
            return Err(ProtocolError::Violation(format!(
                "round {round} reveals {} symbols, schedule says {expected}",
                reveal.entries.len()
            )));
        }
        if !reveal.entries.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(ProtocolError::Violation("Reveal positions not ascending".into()));
        }
        for &(pos, bit) in &reveal.entries {
            let pos = pos as usize;
            if pos >= session.punctured.len() || !session.punctured[pos] || bit > 1 {
                return Err(ProtocolError::Violation(format!(
                    "invalid reveal entry ({pos}, {bit})"
                )));
            }
        }
        for (pos, bit) in reveal.entries {
            session.punctured[pos as usize] = false;
            session.shortened.insert(pos as usize, bit);
        }
        session.round = round;
        session.awaiting_reveal = false;
        self.attempt()
    }

    fn attempt(&mut self) -> Result<Message, ProtocolError> {
        let session = self.session.as_mut().expect("attempt follows Start");
        let rate = session.schedule.rows()[session.round].rate;
        let e = self.settings.assumed_crossover(rate);
        let punctured: Vec<usize> = (0..session.punctured.len())
            .filter(|&i| session.punctured[i])
            .collect();
        let llrs = init_llrs(&session.word, e, &punctured, &session.shortened)?;
        let result = decode_syndrome(self.code, &llrs, &session.target, self.settings.max_iters)?;
        session.iterations += result.iterations;
        let converged = result.converged();
        session.last = Some(result);

        if converged {
            self.status = Status::Success;
            Ok(Message::Ack)
        } else if session.round < session.schedule.last_round() {
            session.awaiting_reveal = true;
            Ok(Message::Nack)
        } else {
            self.status = Status::Failure;
            let reason = "decoding failed at the minimum rate".to_string();
            self.abort_reason = Some(reason.clone());
            Ok(Message::Abort(reason))
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn abort_reason(&self) -> Option<&str> {
        self.abort_reason.as_deref()
    }

    /// Current round; 0 until the first `Reveal`.
    pub fn round(&self) -> usize {
        self.session.as_ref().map_or(0, |s| s.round)
    }

    pub fn schedule(&self) -> Option<&RoundSchedule> {
        self.session.as_ref().map(|s| &s.schedule)
    }

    /// Hard decision of the most recent decoding attempt.
    pub fn last_word(&self) -> Option<&[u8]> {
        self.session.as_ref()?.last.as_ref().map(|r| r.word.as_slice())
    }

    /// Key bits of the most recent attempt, whether or not it converged.
    pub fn estimated_key(&self) -> Option<Vec<u8>> {
        let session = self.session.as_ref()?;
        let word = &session.last.as_ref()?.word;
        Some(session.key_positions.iter().map(|&p| word[p]).collect())
    }

    /// Reconciled key, available once decoding has converged.
    pub fn decoded_key(&self) -> Option<Vec<u8>> {
        if self.status == Status::Success {
            self.estimated_key()
        } else {
            None
        }
    }

    /// Decoder iterations summed over all attempts.
    pub fn total_iterations(&self) -> usize {
        self.session.as_ref().map_or(0, |s| s.iterations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_key_pair, BscParams};
    use crate::ldpc::{build_peg_code, DegreeDistribution};
    use crate::protocol::{Alice, SessionConfig};

    fn setup() -> (ParityCheckMatrix, SessionConfig) {
        let code = build_peg_code(400, &DegreeDistribution::default_rate_0_6(), 2).unwrap();
        let params = ModulationParams::new(400, code.rate(), 0.1, 4).unwrap();
        (code, SessionConfig::new(params))
    }

    #[test]
    fn identical_keys_ack_immediately() {
        let (code, config) = setup();
        let (x, _) = generate_key_pair(360, &BscParams::new(0.0, 1).unwrap()).unwrap();
        let (_, start) = Alice::start(&x, &code, &config, 3).unwrap();
        let mut bob = Bob::new(&code, x.clone(), DecodingSettings::default()).unwrap();
        assert_eq!(bob.on_message(start).unwrap(), Some(Message::Ack));
        assert_eq!(bob.status(), Status::Success);
        assert_eq!(bob.decoded_key().unwrap(), x);
        assert!(bob.on_message(Message::Nack).is_err());
    }

    #[test]
    fn rejects_out_of_order_messages() {
        let (code, config) = setup();
        let mut bob = Bob::new(&code, vec![0; 360], DecodingSettings::default()).unwrap();
        let reveal = Message::Reveal(Reveal {
            round: 1,
            entries: vec![],
        });
        assert!(matches!(bob.on_message(reveal), Err(ProtocolError::Violation(_))));
        assert_eq!(bob.status(), Status::Failure);

        let mut bob = Bob::new(&code, vec![0; 359], DecodingSettings::default()).unwrap();
        let (_, start) = Alice::start(&[0; 360], &code, &config, 3).unwrap();
        assert!(bob.on_message(start).is_err());
    }

    #[test]
    fn validates_reveal_contents() {
        let (code, config) = setup();
        let (x, y) = generate_key_pair(360, &BscParams::new(0.2, 4).unwrap()).unwrap();
        let (mut alice, start) = Alice::start(&x, &code, &config, 3).unwrap();
        let mut bob = Bob::new(&code, y, DecodingSettings::default()).unwrap();
        assert_eq!(bob.on_message(start).unwrap(), Some(Message::Nack));
        let Message::Reveal(mut reveal) = alice.on_nack().unwrap() else {
            panic!()
        };
        reveal.entries.pop();
        let mut short = bob.clone();
        assert!(short.on_message(Message::Reveal(reveal.clone())).is_err());
        reveal.round = 2;
        assert!(bob.on_message(Message::Reveal(reveal)).is_err());
    }
}
