//! Syndrome-based sum-product decoding.
//!
//! The decoder searches for a word whose syndrome equals a target received
//! from the other party, starting from per-symbol log-likelihood ratios
//! (natural log, positive means 0 is more likely). Each check node's
//! outgoing message is sign-flipped when its target syndrome bit is 1.
//! Messages are clamped to `±L_SAT`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ldpc::{syndrome, ParityCheckMatrix, Syndrome};

/// Saturation magnitude for LLRs and messages.
pub const L_SAT: f64 = 30.0;

pub const DEFAULT_MAX_ITERS: usize = 100;

// keeps 2 atanh(x) finite; 2 atanh(1 - 1e-15) ≈ 35.2 > L_SAT
const TANH_LIMIT: f64 = 1.0 - 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("assumed crossover {0} outside (0, 0.5)")]
    Crossover(f64),
    #[error("position {0} is both punctured and shortened")]
    Overlap(usize),
    #[error("position {position} out of range for length {n}")]
    Position { position: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite input LLR at position {0}")]
    NonFinite(usize),
    #[error("max_iters must be at least 1")]
    NoIterations,
}

/// Channel LLRs as seen by the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Self {
        LlrVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// LLRs for a word observed through a BSC with crossover
/// `assumed_crossover`: punctured positions get 0, shortened positions get
/// `±L_SAT` from the revealed bit, everything else `±ln((1-e)/e)` from the
/// observed bit.
pub fn init_llrs(
    observed: &[u8],
    assumed_crossover: f64,
    punctured: &[usize],
    shortened: &BTreeMap<usize, u8>,
) -> Result<LlrVector, DecodeError> {
    if !(assumed_crossover > 0.0 && assumed_crossover < 0.5) {
        return Err(DecodeError::Crossover(assumed_crossover));
    }
    let n = observed.len();
    let magnitude = ((1.0 - assumed_crossover) / assumed_crossover).ln();
    let signed = |bit: u8, mag: f64| if bit & 1 == 0 { mag } else { -mag };
    let mut values: Vec<f64> = observed.iter().map(|&b| signed(b, magnitude)).collect();

    let mut is_punctured = vec![false; n];
    for &p in punctured {
        if p >= n {
            return Err(DecodeError::Position { position: p, n });
        }
        is_punctured[p] = true;
        values[p] = 0.0;
    }
    for (&s, &bit) in shortened {
        if s >= n {
            return Err(DecodeError::Position { position: s, n });
        }
        if is_punctured[s] {
            return Err(DecodeError::Overlap(s));
        }
        values[s] = signed(bit, L_SAT);
    }
    Ok(LlrVector(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    MaxItersReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Hard decision after the last iteration run.
    pub word: Vec<u8>,
    pub iterations: usize,
    pub syndrome_matched: bool,
}

impl DecodeResult {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }
}

/// Flooding sum-product decoding towards `target`. Stops at the first
/// iteration whose hard decision matches the target syndrome.
pub fn decode_syndrome(
    h: &ParityCheckMatrix,
    llrs: &LlrVector,
    target: &Syndrome,
    max_iters: usize,
) -> Result<DecodeResult, DecodeError> {
    let n = h.n();
    if llrs.len() != n {
        return Err(DecodeError::Dimension(format!(
            "{} LLRs for a length-{n} code",
            llrs.len()
        )));
    }
    if target.len() != h.m() {
        return Err(DecodeError::Dimension(format!(
            "{}-bit syndrome for {} checks",
            target.len(),
            h.m()
        )));
    }
    if max_iters == 0 {
        return Err(DecodeError::NoIterations);
    }
    if let Some(i) = llrs.values().iter().position(|x| !x.is_finite()) {
        return Err(DecodeError::NonFinite(i));
    }

    let channel: Vec<f64> = llrs.values().iter().map(|&x| clamp(x)).collect();
    let edges = h.num_edges();
    let mut var_to_check = vec![0.0f64; edges];
    for (c, &llr) in channel.iter().enumerate() {
        for &e in h.col_edges(c) {
            var_to_check[e] = llr;
        }
    }
    let mut check_to_var = vec![0.0f64; edges];
    let mut tanh_buf = Vec::new();
    let mut suffix = Vec::new();
    let mut word = vec![0u8; n];

    for iteration in 1..=max_iters {
        for r in 0..h.m() {
            let range = h.row_edge_range(r);
            let flip = target.bits()[r] & 1 == 1;
            check_update(
                &var_to_check[range.clone()],
                &mut check_to_var[range],
                flip,
                &mut tanh_buf,
                &mut suffix,
            );
        }

        for c in 0..n {
            let incoming = h.col_edges(c);
            let total = channel[c] + incoming.iter().map(|&e| check_to_var[e]).sum::<f64>();
            for &e in incoming {
                var_to_check[e] = clamp(total - check_to_var[e]);
            }
            word[c] = u8::from(total < 0.0);
        }

        let matched = syndrome(h, &word).expect("length checked").bits() == target.bits();
        if matched {
            return Ok(DecodeResult {
                outcome: Outcome::Converged,
                word,
                iterations: iteration,
                syndrome_matched: true,
            });
        }
    }

    Ok(DecodeResult {
        outcome: Outcome::MaxItersReached,
        word,
        iterations: max_iters,
        syndrome_matched: false,
    })
}

#[inline]
fn clamp(x: f64) -> f64 {
    x.clamp(-L_SAT, L_SAT)
}

// tanh rule with leave-one-out products via prefix/suffix scans, so zero
// (punctured) inputs need no special casing.
fn check_update(
    incoming: &[f64],
    outgoing: &mut [f64],
    flip: bool,
    tanh_buf: &mut Vec<f64>,
    suffix: &mut Vec<f64>,
) {
    let degree = incoming.len();
    tanh_buf.clear();
    tanh_buf.extend(incoming.iter().map(|&q| (0.5 * q).tanh()));
    suffix.clear();
    suffix.resize(degree + 1, 1.0);
    for i in (0..degree).rev() {
        suffix[i] = suffix[i + 1] * tanh_buf[i];
    }
    let sign = if flip { -1.0 } else { 1.0 };
    let mut prefix = 1.0;
    for i in 0..degree {
        let product = (prefix * suffix[i + 1]).clamp(-TANH_LIMIT, TANH_LIMIT);
        outgoing[i] = clamp(sign * 2.0 * product.atanh());
        prefix *= tanh_buf[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{build_peg_code, DegreeDistribution};
    use crate::rng::Prng;

    #[test]
    fn init_llr_values() {
        let shortened = BTreeMap::from([(3usize, 1u8), (4, 0)]);
        let llrs = init_llrs(&[0, 1, 0, 0, 1], 0.1, &[2], &shortened).unwrap();
        let v = llrs.values();
        assert!((v[0] - 9f64.ln()).abs() < 1e-15);
        assert!((v[0] - 2.1972).abs() < 1e-4);
        assert!((v[1] + 9f64.ln()).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
        assert_eq!(v[3], -L_SAT);
        assert_eq!(v[4], L_SAT);
    }

    #[test]
    fn init_llr_errors() {
        let none = BTreeMap::new();
        assert_eq!(init_llrs(&[0; 4], 0.5, &[], &none), Err(DecodeError::Crossover(0.5)));
        assert_eq!(init_llrs(&[0; 4], 0.0, &[], &none), Err(DecodeError::Crossover(0.0)));
        let overlap = BTreeMap::from([(1usize, 0u8)]);
        assert_eq!(init_llrs(&[0; 4], 0.1, &[1], &overlap), Err(DecodeError::Overlap(1)));
        assert!(init_llrs(&[0; 4], 0.1, &[4], &none).is_err());
    }

    #[test]
    fn noiseless_input_converges_in_one_iteration() {
        let h = build_peg_code(256, &DegreeDistribution::regular(3, 6).unwrap(), 3).unwrap();
        let x = Prng::from_seed(8).bits(256);
        let llrs = init_llrs(&x, 0.05, &[], &BTreeMap::new()).unwrap();
        let result = decode_syndrome(&h, &llrs, &syndrome(&h, &x).unwrap(), 50).unwrap();
        assert_eq!(result.outcome, Outcome::Converged);
        assert_eq!(result.iterations, 1);
        assert_eq!(result.word, x);
        assert!(result.syndrome_matched);
    }

    #[test]
    fn dimension_errors() {
        let h = build_peg_code(128, &DegreeDistribution::regular(3, 6).unwrap(), 3).unwrap();
        let llrs = LlrVector::new(vec![1.0; 128]);
        let target = Syndrome::new(vec![0; 64]);
        assert!(decode_syndrome(&h, &LlrVector::new(vec![1.0; 127]), &target, 10).is_err());
        assert!(decode_syndrome(&h, &llrs, &Syndrome::new(vec![0; 63]), 10).is_err());
        assert_eq!(decode_syndrome(&h, &llrs, &target, 0), Err(DecodeError::NoIterations));
        let mut bad = vec![1.0; 128];
        bad[5] = f64::NAN;
        assert_eq!(
            decode_syndrome(&h, &LlrVector::new(bad), &target, 10),
            Err(DecodeError::NonFinite(5))
        );
    }

    #[test]
    fn check_update_handles_erasures_and_saturation() {
        let mut out = vec![0.0; 3];
        let (mut a, mut b) = (Vec::new(), Vec::new());
        check_update(&[0.0, 2.0, 3.0], &mut out, false, &mut a, &mut b);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
        assert!(out[0] > 0.0);
        check_update(&[L_SAT, L_SAT, -L_SAT], &mut out, true, &mut a, &mut b);
        assert!(out.iter().all(|x| x.is_finite() && x.abs() <= L_SAT));
        assert!(out[2] < 0.0 && out[0] > 0.0);
    }
}
