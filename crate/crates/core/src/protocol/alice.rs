use super::{Message, ProtocolError, Reveal, SessionConfig, Start, Status};
use crate::ldpc::{syndrome, ParityCheckMatrix};
use crate::rate::{build_schedule, select_reserved_positions, Frame, RoundSchedule};
use crate::rng::{derive_seed, Prng};

// Sub-streams of Alice's session seed.
const STREAM_POSITIONS: u64 = 0;
const STREAM_FILLER: u64 = 1;
const STREAM_CONVERSION: u64 = 2;

/// Alice's side: owns the reference key and answers `Nack`s with reveals.
#[derive(Debug, Clone)]
pub struct Alice {
    config: SessionConfig,
    schedule: RoundSchedule,
    frame: Frame,
    round: usize,
    disclosed: usize,
    status: Status,
    abort_reason: Option<String>,
    rng: Prng,
}

impl Alice {
    /// Lays out the frame with every reserved symbol punctured and builds the
    /// `Start` message.
    pub fn start(
        key: &[u8],
        code: &ParityCheckMatrix,
        config: &SessionConfig,
        seed: u64,
    ) -> Result<(Self, Message), ProtocolError> {
        config.validate()?;
        let params = &config.modulation;
        if code.n() != params.n() || code.m() != params.syndrome_length() {
            return Err(ProtocolError::Config(format!(
                "code is {}x{}, parameters expect {}x{}",
                code.m(),
                code.n(),
                params.syndrome_length(),
                params.n()
            )));
        }
        if key.len() != params.key_length() {
            return Err(ProtocolError::Config(format!(
                "key has {} bits, frame carries {}",
                key.len(),
                params.key_length()
            )));
        }
        let position_seed = derive_seed(seed, STREAM_POSITIONS, 0);
        let reserved = select_reserved_positions(params.n(), params.reserved(), position_seed);
        let mut filler_rng = Prng::from_seed(derive_seed(seed, STREAM_FILLER, 0));
        let frame = Frame::assemble_random(params, key, &reserved, &mut filler_rng)?;
        let z = syndrome(code, frame.values())?;

        let start = Message::Start(Start {
            n: params.n() as u32,
            m: code.m() as u32,
            r0: params.r0(),
            delta: params.delta(),
            q_rounds: params.q_rounds() as u16,
            position_seed,
            syndrome: z.into_bits(),
        });
        let alice = Alice {
            config: *config,
            schedule: build_schedule(params),
            frame,
            round: 0,
            disclosed: code.m(),
            status: Status::Running,
            abort_reason: None,
            rng: Prng::from_seed(derive_seed(seed, STREAM_CONVERSION, 0)),
        };
        Ok((alice, start))
    }

    /// Handles Bob's reply; returns the next message to send, if any.
    pub fn on_message(&mut self, msg: Message) -> Result<Option<Message>, ProtocolError> {
        if self.status != Status::Running {
            return Err(ProtocolError::Violation(format!(
                "{} received after the session ended",
                msg.kind()
            )));
        }
        match msg {
            Message::Ack => {
                self.status = Status::Success;
                Ok(None)
            }
            Message::Nack => self.on_nack().map(Some),
            Message::Abort(reason) => {
                self.status = Status::Failure;
                self.abort_reason = Some(reason);
                Ok(None)
            }
            other => {
                self.status = Status::Failure;
                Err(ProtocolError::Violation(format!(
                    "Alice cannot handle {}",
                    other.kind()
                )))
            }
        }
    }

    /// Moves one schedule step down in rate, or gives up at the last round.
    pub fn on_nack(&mut self) -> Result<Message, ProtocolError> {
        if self.status != Status::Running {
            return Err(ProtocolError::Violation("Nack after the session ended".into()));
        }
        if self.round >= self.schedule.last_round() {
            self.status = Status::Failure;
            let reason = "decoding failed at the minimum rate".to_string();
            self.abort_reason = Some(reason.clone());
            return Ok(Message::Abort(reason));
        }
        let next = self.round + 1;
        let count = self.schedule.conversions_into(next);
        let reveal = self.frame.convert_to_shortened(count, &mut self.rng)?;
        self.round = next;
        self.disclosed += reveal.len();
        Ok(Message::Reveal(Reveal {
            round: next as u16,
            entries: reveal.into_iter().map(|(p, b)| (p as u32, b)).collect(),
        }))
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn abort_reason(&self) -> Option<&str> {
        self.abort_reason.as_deref()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn schedule(&self) -> &RoundSchedule {
        &self.schedule
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// Syndrome bits plus every revealed symbol so far.
    pub fn disclosed_bits(&self) -> usize {
        self.disclosed
    }

    pub fn key(&self) -> Vec<u8> {
        self.frame.key()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{build_peg_code, DegreeDistribution};
    use crate::rate::{ModulationParams, Role};

    fn setup() -> (ParityCheckMatrix, SessionConfig) {
        let code = build_peg_code(400, &DegreeDistribution::default_rate_0_6(), 1).unwrap();
        let params = ModulationParams::new(400, code.rate(), 0.1, 4).unwrap();
        (code, SessionConfig::new(params))
    }

    #[test]
    fn start_punctures_every_reserved_symbol() {
        let (code, config) = setup();
        let key = Prng::from_seed(1).bits(360);
        let (alice, start) = Alice::start(&key, &code, &config, 5).unwrap();
        assert_eq!(alice.frame().count(Role::Punctured), 40);
        assert_eq!(alice.frame().count(Role::Shortened), 0);
        assert_eq!(alice.key(), key);
        let Message::Start(s) = start else { panic!() };
        assert_eq!(s.syndrome.len(), 160);
        assert_eq!(s.syndrome, syndrome(&code, alice.frame().values()).unwrap().into_bits());
        assert_eq!(alice.disclosed_bits(), 160);
    }

    #[test]
    fn nacks_walk_the_schedule_then_abort() {
        let (code, config) = setup();
        let key = vec![0u8; 360];
        let (mut alice, _) = Alice::start(&key, &code, &config, 5).unwrap();
        let mut revealed = 0;
        for j in 1..=4 {
            let Message::Reveal(r) = alice.on_message(Message::Nack).unwrap().unwrap() else {
                panic!("expected reveal");
            };
            assert_eq!(r.round as usize, j);
            assert_eq!(r.entries.len(), 10);
            revealed += r.entries.len();
            assert!(r.entries.windows(2).all(|w| w[0].0 < w[1].0));
        }
        assert_eq!(alice.frame().count(Role::Punctured), 0);
        assert_eq!(alice.disclosed_bits(), 160 + revealed);
        assert!(matches!(alice.on_message(Message::Nack).unwrap(), Some(Message::Abort(_))));
        assert_eq!(alice.status(), Status::Failure);
        assert!(alice.on_message(Message::Nack).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let (code, config) = setup();
        assert!(matches!(
            Alice::start(&[0; 359], &code, &config, 0),
            Err(ProtocolError::Config(_))
        ));
        let out_of_range = config.with_error_range(0.01, 0.02);
        assert!(Alice::start(&[0; 360], &code, &out_of_range, 0).is_err());
        let (mut alice, start) = Alice::start(&[0; 360], &code, &config, 0).unwrap();
        assert!(matches!(alice.on_message(start), Err(ProtocolError::Violation(_))));
    }

    #[test]
    fn large_frame_first_round() {
        // schedule side only; no code of this length is built
        let params = ModulationParams::new(200_000, 0.6, 0.1, 6).unwrap();
        let schedule = build_schedule(&params);
        let row = schedule.row(0).unwrap();
        assert_eq!((row.punctured, row.shortened), (20_000, 0));
        assert_eq!(format!("{:.2}", row.rate), "0.67");
        assert_eq!(schedule.conversions_into(1), 3334);
    }
}
