//! Rate modulation by simultaneous puncturing and shortening.
//!
//! A fixed fraction `δ` of the `n` mother-code symbols carries no key
//! material. Of those `⌊δn⌋` symbols, `p` are punctured (unknown to the
//! decoder) and `s` are shortened (known to it), with `p + s = ⌊δn⌋`
//! throughout. The modulated rate is
//!
//! ```text
//! R = (R0 - σ) / (1 - π - σ),   π = p/n, σ = s/n
//! ```
//!
//! ranging from `R0 / (1 - δ)` (all punctured) down to
//! `(R0 - δ) / (1 - δ)` (all shortened).

mod frame;

pub use frame::{key_positions, select_reserved_positions, Frame, Role};

use thiserror::Error;

use crate::metrics::binary_entropy;

// Absorbs representation error in products like 0.1 * 200000.
const COUNT_SLACK: f64 = 1e-9;
const RATE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("invalid modulation parameters: {0}")]
    Params(String),
    #[error("modulated rate undefined: {0}")]
    Rate(String),
    #[error("target rate {target} outside [{min}, {max}]")]
    OutOfBounds { target: f64, min: f64, max: f64 },
    #[error("frame error: {0}")]
    Frame(String),
}

/// Mother-code length and rate plus the modulation plan: `δ` and the
/// maximum number of extra rounds `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    n: usize,
    r0: f64,
    delta: f64,
    q_rounds: usize,
}

impl ModulationParams {
    /// `δ = 0` is accepted and describes a single-shot, unmodulated code; in
    /// that case `q_rounds` is forced to zero.
    pub fn new(n: usize, r0: f64, delta: f64, q_rounds: usize) -> Result<Self, RateError> {
        if n == 0 {
            return Err(RateError::Params("code length must be positive".into()));
        }
        if !(r0 > 0.0 && r0 < 1.0) {
            return Err(RateError::Params(format!("rate {r0} outside (0, 1)")));
        }
        if !(delta >= 0.0 && delta < 1.0 - r0) {
            return Err(RateError::Params(format!(
                "delta {delta} outside [0, 1 - R0 = {})",
                1.0 - r0
            )));
        }
        if delta > r0 {
            return Err(RateError::Params(format!(
                "delta {delta} exceeds R0 {r0}"
            )));
        }
        let reserved = reserved_count(n, delta);
        let q_rounds = if reserved == 0 { 0 } else { q_rounds };
        if reserved > 0 && q_rounds == 0 {
            return Err(RateError::Params("modulated code needs Q >= 1".into()));
        }
        if reserved < q_rounds {
            return Err(RateError::Params(format!(
                "floor(delta n) = {reserved} is smaller than Q = {q_rounds}"
            )));
        }
        Ok(ModulationParams {
            n,
            r0,
            delta,
            q_rounds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn q_rounds(&self) -> usize {
        self.q_rounds
    }

    /// Per-round conversion fraction `q = δ / Q` (zero when unmodulated).
    pub fn q_step(&self) -> f64 {
        if self.q_rounds == 0 {
            0.0
        } else {
            self.delta / self.q_rounds as f64
        }
    }

    /// `⌊δn⌋`, the number of punctured plus shortened symbols.
    pub fn reserved(&self) -> usize {
        reserved_count(self.n, self.delta)
    }

    /// Key symbols carried per frame, `n - ⌊δn⌋`.
    pub fn key_length(&self) -> usize {
        self.n - self.reserved()
    }

    /// Syndrome length `n (1 - R0)`, rounded to the nearest integer.
    pub fn syndrome_length(&self) -> usize {
        (self.n as f64 * (1.0 - self.r0)).round() as usize
    }
}

fn reserved_count(n: usize, delta: f64) -> usize {
    (delta * n as f64 + COUNT_SLACK).floor() as usize
}

/// `(R0 - σ) / (1 - π - σ)`.
pub fn modulated_rate(r0: f64, pi: f64, sigma: f64) -> Result<f64, RateError> {
    if pi < 0.0 || sigma < 0.0 {
        return Err(RateError::Rate("negative fraction".into()));
    }
    let denom = 1.0 - pi - sigma;
    if denom <= 0.0 {
        return Err(RateError::Rate(format!("pi + sigma = {} >= 1", pi + sigma)));
    }
    let rate = (r0 - sigma) / denom;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(RateError::Rate(format!("rate {rate} outside (0, 1)")));
    }
    Ok(rate)
}

/// `(R_min, R_max) = ((R0 - δ)/(1 - δ), R0/(1 - δ))`.
pub fn rate_bounds(r0: f64, delta: f64) -> Result<(f64, f64), RateError> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(RateError::Params(format!("rate {r0} outside (0, 1]")));
    }
    if !(0.0..1.0).contains(&delta) || delta > r0 {
        return Err(RateError::Params(format!(
            "delta {delta} outside [0, min(R0, 1))"
        )));
    }
    Ok(((r0 - delta) / (1.0 - delta), r0 / (1.0 - delta)))
}

/// Whether the modulated rates cover the error range `[e0, e1]`:
/// `R_min <= 1 - h2(e1)` and `R_max >= 1 - h2(e0)`.
pub fn range_check(r0: f64, delta: f64, e0: f64, e1: f64) -> bool {
    let Ok((r_min, r_max)) = rate_bounds(r0, delta) else {
        return false;
    };
    if !(0.0 <= e0 && e0 <= e1 && e1 < 0.5) {
        return false;
    }
    let cap = |e: f64| 1.0 - binary_entropy(e).expect("e checked above");
    r_min <= cap(e1) && r_max >= cap(e0)
}

/// Punctured and shortened counts realizing `target_rate`:
/// `s = ⌈(R0 - R(1 - δ)) n⌉`, `p = ⌊δn⌋ - s`.
pub fn symbols_for_rate(
    n: usize,
    r0: f64,
    delta: f64,
    target_rate: f64,
) -> Result<(usize, usize), RateError> {
    let (min, max) = rate_bounds(r0, delta)?;
    if !(target_rate >= min - RATE_SLACK && target_rate <= max + RATE_SLACK) {
        return Err(RateError::OutOfBounds {
            target: target_rate,
            min,
            max,
        });
    }
    let reserved = reserved_count(n, delta);
    let exact = (r0 - target_rate * (1.0 - delta)) * n as f64;
    let s = ((exact - COUNT_SLACK).ceil().max(0.0) as usize).min(reserved);
    Ok((reserved - s, s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub round: usize,
    pub punctured: usize,
    pub shortened: usize,
    pub rate: f64,
}

/// Per-round `(p_j, s_j, R_j)` for rounds `0..=Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSchedule {
    params: ModulationParams,
    rows: Vec<ScheduleRow>,
}

impl RoundSchedule {
    pub fn params(&self) -> &ModulationParams {
        &self.params
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    pub fn row(&self, round: usize) -> Option<&ScheduleRow> {
        self.rows.get(round)
    }

    pub fn last_round(&self) -> usize {
        self.rows.len() - 1
    }

    /// Symbols converted from punctured to shortened when entering `round`.
    pub fn conversions_into(&self, round: usize) -> usize {
        match round {
            0 => 0,
            j => self.rows[j].shortened - self.rows[j - 1].shortened,
        }
    }

    /// CSV with header `round,delta,pi_star,sigma_star,p,s,R0,R`, where the
    /// starred fractions are normalized by `⌊δn⌋`.
    pub fn to_csv(&self) -> String {
        let reserved = self.params.reserved();
        let norm = |x: usize| {
            if reserved == 0 {
                0.0
            } else {
                x as f64 / reserved as f64
            }
        };
        let mut out = String::from("round,delta,pi_star,sigma_star,p,s,R0,R\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.4},{:.4},{},{},{},{:.4}\n",
                row.round,
                self.params.delta,
                norm(row.punctured),
                norm(row.shortened),
                row.punctured,
                row.shortened,
                self.params.r0,
                row.rate
            ));
        }
        out
    }
}

/// Cumulative-ceiling schedule `s_j = ⌈j ⌊δn⌋ / Q⌉`, `p_j = ⌊δn⌋ - s_j`.
pub fn build_schedule(params: &ModulationParams) -> RoundSchedule {
    let n = params.n as f64;
    let reserved = params.reserved();
    let q = params.q_rounds;
    let rows = (0..=q)
        .map(|j| {
            let shortened = if q == 0 { 0 } else { (j * reserved).div_ceil(q) };
            let punctured = reserved - shortened;
            let rate = modulated_rate(params.r0, punctured as f64 / n, shortened as f64 / n)
                .expect("validated parameters give a rate in (0, 1)");
            ScheduleRow {
                round: j,
                punctured,
                shortened,
                rate,
            }
        })
        .collect();
    RoundSchedule {
        params: *params,
        rows,
    }
}
