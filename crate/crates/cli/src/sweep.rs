//! Monte-Carlo sweeps over a grid of crossover probabilities.
//!
//! Trial `t` at crossover `e` draws everything from
//! `derive_seed(seed, bits(e), t)`, so results do not depend on execution
//! order, thread count or the rest of the grid.

use std::fmt::Write as _;

use rayon::prelude::*;

use blindrec::ldpc::ParityCheckMatrix;
use blindrec::metrics::{aggregate, AggregateStats, ExecutionRecord};
use blindrec::protocol::{run_session, SessionConfig};

use crate::commands::{load_code, session_config, trial_inputs, write_file};
use crate::{CliError, RunConfig};

pub const CSV_HEADER: &str = "e,M,N_hat,p_hat,s_hat,pi_hat,sigma_hat,f_hat,FER";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub crossover: f64,
    pub stats: AggregateStats,
}

/// Runs `trials` sessions at `crossover`, ordered by trial index.
pub fn run_trials(
    code: &ParityCheckMatrix,
    session: &SessionConfig,
    master_seed: u64,
    crossover: f64,
    trials: usize,
    parallel: bool,
) -> Result<Vec<ExecutionRecord>, CliError> {
    let key_length = session.modulation.key_length();
    let one = |t: usize| -> Result<ExecutionRecord, CliError> {
        let (x, y, seed) = trial_inputs(master_seed, crossover, t as u64, key_length)?;
        Ok(run_session(&x, &y, code, session, seed)?.record(crossover))
    };
    if parallel {
        (0..trials).into_par_iter().map(one).collect()
    } else {
        (0..trials).map(one).collect()
    }
}

pub fn sweep_points(
    code: &ParityCheckMatrix,
    config: &RunConfig,
) -> Result<Vec<SweepPoint>, CliError> {
    let session = session_config(config, code)?;
    config
        .grid
        .iter()
        .map(|&e| {
            let records = run_trials(code, &session, config.seed, e, config.trials, config.parallel)?;
            let stats = aggregate(&records, code.rate(), session.modulation.delta())?;
            Ok(SweepPoint { crossover: e, stats })
        })
        .collect()
}

pub fn to_csv(points: &[SweepPoint]) -> String {
    let opt = |v: Option<f64>, prec: usize| v.map(|x| format!("{x:.prec$}")).unwrap_or_default();
    let mut out = format!("{CSV_HEADER}\n");
    for p in points {
        let s = &p.stats;
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.2},{:.2},{},{},{},{:.4}",
            p.crossover,
            s.m,
            s.n_hat,
            s.p_hat,
            s.s_hat,
            opt(s.pi_hat, 6),
            opt(s.sigma_hat, 6),
            opt(s.f_hat, 5),
            s.fer
        );
    }
    out
}

/// Builds or loads the code, runs the grid and returns the CSV, also
/// writing it to `output` when configured.
pub fn cmd_sweep(config: &RunConfig) -> Result<String, CliError> {
    let code = load_code(config)?;
    let csv = to_csv(&sweep_points(&code, config)?);
    if let Some(path) = &config.output {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::cmd_run;

    fn small() -> RunConfig {
        let mut config = RunConfig::default();
        config.set("n", "1000").unwrap();
        config.set("trials", "6").unwrap();
        config.set("grid", "0.06,0.075").unwrap();
        config
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let mut config = small();
        config.set("grid", "").unwrap();
        assert_eq!(cmd_sweep(&config).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn single_trial_matches_run() {
        let mut config = small();
        config.set("trials", "1").unwrap();
        config.set("grid", "0.07").unwrap();
        let csv = cmd_sweep(&config).unwrap();
        let report = cmd_run(&config).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[2], format!("{:.4}", report.result.rounds_used as f64));
        assert_eq!(row[4], format!("{:.2}", report.result.shortened as f64));
        let fer = if report.result.success { "0.0000" } else { "1.0000" };
        assert_eq!(row[8], fer);
        if report.result.success {
            assert_eq!(row[7], format!("{:.5}", report.efficiency().unwrap()));
        } else {
            assert_eq!(row[7], "");
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut config = small();
        let parallel = cmd_sweep(&config).unwrap();
        config.set("parallel", "false").unwrap();
        assert_eq!(cmd_sweep(&config).unwrap(), parallel);
    }
}
