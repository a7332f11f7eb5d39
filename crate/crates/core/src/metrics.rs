//! Binary entropy and reconciliation efficiency.
//!
//! Efficiency is disclosed information per key bit over the Slepian-Wolf
//! bound `h2(e)`; `f = 1` is optimal. For a session ending with punctured
//! fraction `π` on a code of rate `R0` modulated by `δ`:
//!
//! ```text
//! f = (1 - R0 - π) / ((1 - δ) h2(e))
//! ```

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("efficiency undefined for crossover {0}")]
    Crossover(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no execution records")]
    NoRecords,
    #[error("records mix different {0}")]
    MixedRecords(&'static str),
}

/// Binary Shannon entropy in bits, with `h2(0) = h2(1) = 0`.
pub fn binary_entropy(e: f64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&e) {
        return Err(MetricsError::Probability(e));
    }
    if e == 0.0 || e == 1.0 {
        return Ok(0.0);
    }
    Ok(-e * e.log2() - (1.0 - e) * (1.0 - e).log2())
}

/// Crossover `e` in `[0, 0.5]` with `1 - h2(e) = capacity`, by bisection.
pub fn crossover_for_capacity(capacity: f64) -> f64 {
    if capacity >= 1.0 {
        return 0.0;
    }
    if capacity <= 0.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // 1 - h2 decreases on [0, 0.5]
        if 1.0 - binary_entropy(mid).unwrap() > capacity {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn crossover_entropy(e: f64) -> Result<f64, MetricsError> {
    if !(e > 0.0 && e < 0.5) {
        return Err(MetricsError::Crossover(e));
    }
    binary_entropy(e)
}

fn check_modulation(r0: f64, delta: f64) -> Result<(), MetricsError> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(MetricsError::Parameter(format!("rate {r0} outside (0, 1)")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(MetricsError::Parameter(format!("delta {delta} outside [0, 1)")));
    }
    Ok(())
}

/// Efficiency of a session that finished with punctured fraction `pi_final`.
/// Also valid for averaged `π̂`, being linear in `π`.
pub fn execution_efficiency(r0: f64, delta: f64, pi_final: f64, e: f64) -> Result<f64, MetricsError> {
    check_modulation(r0, delta)?;
    let h = crossover_entropy(e)?;
    Ok((1.0 - r0 - pi_final) / ((1.0 - delta) * h))
}

/// Per-round efficiency model `f_j = f0 + j * epsilon` for a fixed
/// conversion step `q` per round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundEfficiency {
    pub f0: f64,
    pub epsilon: f64,
}

impl RoundEfficiency {
    pub fn at(&self, round: usize) -> f64 {
        self.f0 + round as f64 * self.epsilon
    }
}

pub fn round_efficiency_params(
    r0: f64,
    delta: f64,
    q_step: f64,
    e: f64,
) -> Result<RoundEfficiency, MetricsError> {
    check_modulation(r0, delta)?;
    if !(q_step > 0.0 && q_step <= delta) {
        return Err(MetricsError::Parameter(format!(
            "step {q_step} outside (0, delta]"
        )));
    }
    let scale = (1.0 - delta) * crossover_entropy(e)?;
    Ok(RoundEfficiency {
        f0: (1.0 - r0 - delta) / scale,
        epsilon: q_step / scale,
    })
}

/// Efficiency from raw counts: `(disclosed / key_length) / h2(e)`.
///
/// `disclosed_bits` is the information leaked about the key: syndrome bits
/// minus the punctured symbols still hidden at termination. Revealed
/// shortened values are independent random bits and leak nothing.
pub fn raw_efficiency(disclosed_bits: usize, key_length: usize, e: f64) -> Result<f64, MetricsError> {
    if key_length == 0 {
        return Err(MetricsError::Parameter("key length must be positive".into()));
    }
    let h = crossover_entropy(e)?;
    Ok(disclosed_bits as f64 / key_length as f64 / h)
}

/// Outcome of one reconciliation, as far as the statistics need it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecutionRecord {
    /// Mother-code length.
    pub n: usize,
    /// Punctured symbols at termination.
    pub punctured: usize,
    /// Shortened symbols at termination.
    pub shortened: usize,
    /// Extra rounds beyond the first attempt.
    pub rounds: usize,
    pub success: bool,
    /// True channel crossover.
    pub crossover: f64,
}

impl ExecutionRecord {
    pub fn pi(&self) -> f64 {
        self.punctured as f64 / self.n as f64
    }

    pub fn sigma(&self) -> f64 {
        self.shortened as f64 / self.n as f64
    }
}

/// Averages over `M` executions at one crossover.
///
/// `n_hat`, `p_hat`, `s_hat` and `fer` cover every execution. `pi_hat` and
/// `sigma_hat` are `p_hat / n` and `s_hat / n`, reported only when at least
/// one execution succeeded; `f_hat` uses the mean `π` of the successful
/// executions alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub m: usize,
    pub n_hat: f64,
    pub p_hat: f64,
    pub s_hat: f64,
    pub pi_hat: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub f_hat: Option<f64>,
    pub fer: f64,
}

pub fn aggregate(records: &[ExecutionRecord], r0: f64, delta: f64) -> Result<AggregateStats, MetricsError> {
    let first = records.first().ok_or(MetricsError::NoRecords)?;
    if records.iter().any(|r| r.crossover != first.crossover) {
        return Err(MetricsError::MixedRecords("crossovers"));
    }
    if records.iter().any(|r| r.n != first.n) {
        return Err(MetricsError::MixedRecords("code lengths"));
    }
    let m = records.len();
    let count = m as f64;
    let n = first.n as f64;
    let n_hat = records.iter().map(|r| r.rounds as f64).sum::<f64>() / count;
    let p_hat = records.iter().map(|r| r.punctured as f64).sum::<f64>() / count;
    let s_hat = records.iter().map(|r| r.shortened as f64).sum::<f64>() / count;
    let successes: Vec<&ExecutionRecord> = records.iter().filter(|r| r.success).collect();
    let fer = (m - successes.len()) as f64 / count;

    let (pi_hat, sigma_hat, f_hat) = if successes.is_empty() {
        (None, None, None)
    } else {
        let pi_ok = successes.iter().map(|r| r.pi()).sum::<f64>() / successes.len() as f64;
        let f = execution_efficiency(r0, delta, pi_ok, first.crossover)?;
        (Some(p_hat / n), Some(s_hat / n), Some(f))
    };

    Ok(AggregateStats {
        m,
        n_hat,
        p_hat,
        s_hat,
        pi_hat,
        sigma_hat,
        f_hat,
        fer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_reference_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 0.4021791902022728 from an independent float64 evaluation
        assert!((binary_entropy(0.08).unwrap() - 0.402179).abs() < 1e-6);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn capacity_inversion() {
        for e in [0.01, 0.0615, 0.08, 0.2] {
            let cap = 1.0 - binary_entropy(e).unwrap();
            assert!((crossover_for_capacity(cap) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn efficiency_against_reported_rows() {
        let f = execution_efficiency(0.6, 0.1, 0.0167, 0.08).unwrap();
        assert!((f - 1.05895).abs() < 5e-4, "{f}");
        let f = execution_efficiency(0.6, 0.1, 0.0813, 0.06).unwrap();
        assert!((f - 1.08144).abs() < 5e-4, "{f}");
    }

    #[test]
    fn unit_efficiency_fixed_point() {
        let (r0, delta, e) = (0.6, 0.1, 0.07);
        let pi = 1.0 - r0 - (1.0 - delta) * binary_entropy(e).unwrap();
        assert!((execution_efficiency(r0, delta, pi, e).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_undefined_without_errors() {
        assert_eq!(
            execution_efficiency(0.6, 0.1, 0.0, 0.0),
            Err(MetricsError::Crossover(0.0))
        );
        assert!(raw_efficiency(100, 10, 0.0).is_err());
        assert!(round_efficiency_params(0.6, 0.1, 0.01, 0.0).is_err());
    }

    #[test]
    fn round_model_matches_reported_row() {
        let model = round_efficiency_params(0.6, 0.1, 0.1 / 6.0, 0.08).unwrap();
        assert!((model.f0 - 0.8289).abs() < 1e-4, "{}", model.f0);
        assert!((model.epsilon - 0.04605).abs() < 1e-5, "{}", model.epsilon);
        assert!((model.at(5) - 1.0591).abs() < 1e-4);
        assert!(model.epsilon > 0.0);
        let last = execution_efficiency(0.6, 0.1, 0.0, 0.08).unwrap();
        assert!((model.at(6) - last).abs() < 1e-12);
    }

    #[test]
    fn raw_efficiency_cases() {
        let e = 0.08;
        let h = binary_entropy(e).unwrap();
        let key = 180_000;
        let disclosed = (key as f64 * h).round() as usize;
        assert!((raw_efficiency(disclosed, key, e).unwrap() - 1.0).abs() < 1e-4);
        assert_eq!(raw_efficiency(0, key, e).unwrap(), 0.0);

        // n = 200000, R0 = 0.6, delta = 0.1, s = 16667, so p = 3333 of the
        // syndrome bits are absorbed by punctured symbols
        let f = raw_efficiency(80_000 - 3_333, 180_000, e).unwrap();
        assert!((f - 1.0590).abs() < 1e-3, "{f}");
        let pi = (20_000.0 - 16_667.0) / 200_000.0;
        assert!((f - execution_efficiency(0.6, 0.1, pi, e).unwrap()).abs() < 1e-9);
    }

    fn record(punctured: usize, shortened: usize, rounds: usize, success: bool, e: f64) -> ExecutionRecord {
        ExecutionRecord {
            n: 200_000,
            punctured,
            shortened,
            rounds,
            success,
            crossover: e,
        }
    }

    #[test]
    fn aggregate_single_record() {
        let r = record(9_600, 10_400, 3, true, 0.07);
        let stats = aggregate(&[r], 0.6, 0.1).unwrap();
        assert_eq!(stats.m, 1);
        assert_eq!(stats.n_hat, 3.0);
        assert_eq!(stats.p_hat, 9_600.0);
        assert_eq!(stats.s_hat, 10_400.0);
        assert_eq!(stats.pi_hat, Some(r.pi()));
        assert_eq!(stats.sigma_hat, Some(r.sigma()));
        assert_eq!(stats.fer, 0.0);
        let f = stats.f_hat.unwrap();
        assert!((f - 1.06883).abs() < 5e-4, "{f}");
    }

    #[test]
    fn aggregate_means() {
        let stats = aggregate(
            &[record(4_000, 16_000, 4, true, 0.07), record(8_000, 12_000, 2, true, 0.07)],
            0.6,
            0.1,
        )
        .unwrap();
        assert!((stats.pi_hat.unwrap() - 0.03).abs() < 1e-15);
        assert_eq!(stats.n_hat, 3.0);
    }

    #[test]
    fn aggregate_failures() {
        let all_failed = [record(0, 20_000, 6, false, 0.09), record(0, 20_000, 6, false, 0.09)];
        let stats = aggregate(&all_failed, 0.6, 0.1).unwrap();
        assert_eq!(stats.fer, 1.0);
        assert_eq!(stats.n_hat, 6.0);
        assert_eq!(stats.s_hat, 20_000.0);
        assert_eq!((stats.pi_hat, stats.sigma_hat, stats.f_hat), (None, None, None));

        let mixed = [record(10_000, 10_000, 3, true, 0.07), record(0, 20_000, 6, false, 0.07)];
        let stats = aggregate(&mixed, 0.6, 0.1).unwrap();
        assert_eq!(stats.fer, 0.5);
        let f_ok = execution_efficiency(0.6, 0.1, 0.05, 0.07).unwrap();
        assert_eq!(stats.f_hat, Some(f_ok));
    }

    #[test]
    fn aggregate_rejects_bad_input() {
        assert_eq!(aggregate(&[], 0.6, 0.1), Err(MetricsError::NoRecords));
        let mixed = [record(0, 0, 0, true, 0.07), record(0, 0, 0, true, 0.08)];
        assert!(aggregate(&mixed, 0.6, 0.1).is_err());
    }
}
