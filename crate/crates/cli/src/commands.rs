use std::fmt;
use std::fmt::Write as _;
use std::net::{TcpListener, TcpStream};
use std::path::Path;

use blindrec::channel::{generate_key_pair, BscParams};
use blindrec::ldpc::{
    build_peg_code, design_rate, load_alist, save_alist, DegreeDistribution, ParityCheckMatrix,
};
use blindrec::metrics::execution_efficiency;
use blindrec::protocol::{
    run_alice, run_bob, run_session, Alice, Bob, DecodingSettings, FramedPort, PartyOutcome,
    SessionConfig, SessionResult,
};
use blindrec::rate::{build_schedule, ModulationParams};
use blindrec::rng::derive_seed;

use crate::{CliError, RunConfig};

// Sub-streams of a trial seed.
const STREAM_KEYS: u64 = 0;
const STREAM_SESSION: u64 = 1;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_distribution(config: &RunConfig) -> Result<DegreeDistribution, CliError> {
    match &config.distribution {
        Some(path) => Ok(DegreeDistribution::parse(&read_file(path)?)?),
        None => Ok(DegreeDistribution::default_rate_0_6()),
    }
}

/// The configured alist, or a freshly built PEG code.
pub fn load_code(config: &RunConfig) -> Result<ParityCheckMatrix, CliError> {
    match &config.code {
        Some(path) => Ok(load_alist(&read_file(path)?)?),
        None => Ok(build_peg_code(config.n, &load_distribution(config)?, config.code_seed)?),
    }
}

/// Session settings for `code`, with the error range enforced whenever the
/// rate is modulated.
pub fn session_config(config: &RunConfig, code: &ParityCheckMatrix) -> Result<SessionConfig, CliError> {
    let params = ModulationParams::new(code.n(), code.rate(), config.delta, config.rounds)?;
    let decoding = DecodingSettings {
        error_range: (params.reserved() > 0).then_some((config.e0, config.e1)),
        max_iters: config.max_iters,
        crossover: config.assumed_crossover,
    };
    let session = SessionConfig {
        modulation: params,
        decoding,
        verify_tag: false,
    };
    session.validate()?;
    Ok(session)
}

/// Alice's key, Bob's noisy copy and the session seed for one trial.
pub fn trial_inputs(
    master_seed: u64,
    crossover: f64,
    trial: u64,
    key_length: usize,
) -> Result<(Vec<u8>, Vec<u8>, u64), CliError> {
    let trial_seed = derive_seed(master_seed, crossover.to_bits(), trial);
    let channel = BscParams::new(crossover, derive_seed(trial_seed, STREAM_KEYS, 0))?;
    let (x, y) = generate_key_pair(key_length, &channel)?;
    Ok((x, y, derive_seed(trial_seed, STREAM_SESSION, 0)))
}

pub struct BuiltCode {
    pub code: ParityCheckMatrix,
    pub alist: String,
}

impl fmt::Display for BuiltCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = &self.code;
        writeln!(f, "n = {}, m = {}, rate = {:.6}", code.n(), code.m(), code.rate())?;
        writeln!(f, "girth = {}", code.girth().map_or("inf".into(), |g| g.to_string()))?;
        for (deg, count) in code.column_degree_histogram() {
            writeln!(f, "variable degree {deg}: {count}")?;
        }
        for (deg, count) in code.row_degree_histogram() {
            writeln!(f, "check degree {deg}: {count}")?;
        }
        Ok(())
    }
}

pub fn cmd_build_code(config: &RunConfig) -> Result<BuiltCode, CliError> {
    let dist = load_distribution(config)?;
    let code = build_peg_code(config.n, &dist, config.code_seed)?;
    let alist = save_alist(&code);
    if let Some(path) = &config.output {
        write_file(path, &alist)?;
    }
    Ok(BuiltCode { code, alist })
}

/// Round schedule as CSV. Needs no code: `R0` comes from `r0`, the code
/// file, or the distribution's design rate, in that order.
pub fn cmd_schedule(config: &RunConfig) -> Result<String, CliError> {
    let r0 = match (config.r0, &config.code) {
        (Some(r0), _) => r0,
        (None, Some(_)) => load_code(config)?.rate(),
        (None, None) => design_rate(&load_distribution(config)?),
    };
    let params = ModulationParams::new(config.n, r0, config.delta, config.rounds)?;
    Ok(build_schedule(&params).to_csv())
}

pub struct RunReport {
    pub crossover: f64,
    pub key_length: usize,
    pub r0: f64,
    pub delta: f64,
    pub result: SessionResult,
}

impl RunReport {
    /// Efficiency of a successful session; undefined for `e = 0`.
    pub fn efficiency(&self) -> Option<f64> {
        if !self.result.success || self.crossover == 0.0 {
            return None;
        }
        execution_efficiency(self.r0, self.delta, self.result.pi, self.crossover).ok()
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.result;
        let mut out = String::new();
        let _ = writeln!(out, "status = {}", if r.success { "success" } else { "failure" });
        let _ = writeln!(out, "crossover = {}", self.crossover);
        let _ = writeln!(out, "key_length = {}", self.key_length);
        let _ = writeln!(out, "rounds = {}", r.rounds_used);
        let _ = writeln!(out, "punctured = {}", r.punctured);
        let _ = writeln!(out, "shortened = {}", r.shortened);
        let _ = writeln!(out, "pi = {:.6}", r.pi);
        let _ = writeln!(out, "sigma = {:.6}", r.sigma);
        let _ = writeln!(out, "rate = {:.6}", r.rate);
        let _ = writeln!(out, "disclosed_bits = {}", r.disclosed_bits);
        let _ = writeln!(out, "leaked_bits = {}", r.leaked_bits);
        let eff = self.efficiency().map(|f| format!("{f:.5}")).unwrap_or_default();
        let _ = writeln!(out, "efficiency = {eff}");
        let _ = writeln!(out, "residual_errors = {}", r.residual_errors);
        let _ = writeln!(out, "decoder_iterations = {}", r.decoder_iterations);
        f.write_str(&out)
    }
}

/// One seeded session at crossover `e`; same inputs as trial 0 of a sweep
/// point at `e`.
pub fn cmd_run(config: &RunConfig) -> Result<RunReport, CliError> {
    let code = load_code(config)?;
    let session = session_config(config, &code)?;
    let key_length = session.modulation.key_length();
    let (x, y, seed) = trial_inputs(config.seed, config.e, 0, key_length)?;
    let result = run_session(&x, &y, &code, &session, seed)?;
    Ok(RunReport {
        crossover: config.e,
        key_length,
        r0: code.rate(),
        delta: session.modulation.delta(),
        result,
    })
}

fn io_error(what: &str, e: std::io::Error) -> CliError {
    CliError::Io(format!("{what}: {e}"))
}

/// Bob's endpoint: accepts one TCP connection on `listen` and reconciles
/// the noisy half of the key pair derived from `seed` and `e`.
pub fn cmd_serve(config: &RunConfig, listen: &str) -> Result<PartyOutcome, CliError> {
    let code = load_code(config)?;
    let session = session_config(config, &code)?;
    let (_, y, _) = trial_inputs(config.seed, config.e, 0, session.modulation.key_length())?;
    let listener = TcpListener::bind(listen).map_err(|e| io_error(listen, e))?;
    let (stream, _) = listener.accept().map_err(|e| io_error("accept", e))?;
    let mut port = FramedPort::new(stream);
    let mut bob = Bob::new(&code, y, session.decoding)?;
    Ok(run_bob(&mut port, &mut bob)?)
}

/// Alice's endpoint: connects to `peer` and runs the session.
pub fn cmd_connect(config: &RunConfig, peer: &str) -> Result<PartyOutcome, CliError> {
    let code = load_code(config)?;
    let session = session_config(config, &code)?;
    let (x, _, seed) = trial_inputs(config.seed, config.e, 0, session.modulation.key_length())?;
    let (mut alice, start) = Alice::start(&x, &code, &session, seed)?;
    let stream = TcpStream::connect(peer).map_err(|e| io_error(peer, e))?;
    let mut port = FramedPort::new(stream);
    Ok(run_alice(&mut port, &mut alice, start)?)
}
