use std::collections::BTreeMap;

use blindrec::channel::{generate_key_pair, hamming_distance, BscParams};
use blindrec::decoder::{decode_syndrome, init_llrs, Outcome, DEFAULT_MAX_ITERS};
use blindrec::ldpc::{build_peg_code, syndrome, DegreeDistribution, ParityCheckMatrix};
use blindrec::rng::Prng;

/// 6 x 12 fragment of a (3,6)-regular code: six complementary pairs of
/// 3-subsets of the rows, so every column is distinct.
pub fn tiny_code() -> ParityCheckMatrix {
    ParityCheckMatrix::from_rows(
        12,
        vec![
            vec![0, 2, 4, 6, 8, 10],
            vec![0, 2, 4, 6, 9, 11],
            vec![0, 3, 5, 7, 8, 10],
            vec![1, 2, 5, 7, 8, 11],
            vec![1, 3, 4, 7, 9, 10],
            vec![1, 3, 5, 6, 9, 11],
        ],
    )
    .unwrap()
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut e = vec![0u8; n];
    e[i] = 1;
    e
}

// Every error pattern of weight <= 2, by enumeration.
fn low_weight_patterns(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; n]];
    for i in 0..n {
        out.push(unit(n, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(xor(&unit(n, i), &unit(n, j)));
        }
    }
    out
}

#[test]
fn single_flip_on_tiny_code_matches_exhaustive_search() {
    let h = tiny_code();
    let n = h.n();
    let patterns = low_weight_patterns(n);
    let mut rng = Prng::from_seed(2024);
    for trial in 0..32 {
        let x = rng.bits(n);
        let flipped = trial % n;
        let y = xor(&x, &unit(n, flipped));
        let target = syndrome(&h, &x).unwrap();

        // brute force: the weight <= 2 pattern e with H(y ^ e) = target of
        // minimum weight is the single flip
        let best = patterns
            .iter()
            .filter(|e| syndrome(&h, &xor(&y, e)).unwrap() == target)
            .min_by_key(|e| e.iter().filter(|&&b| b == 1).count())
            .unwrap();
        assert_eq!(xor(&y, best), x);

        let llrs = init_llrs(&y, 0.05, &[], &BTreeMap::new()).unwrap();
        let result = decode_syndrome(&h, &llrs, &target, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(result.outcome, Outcome::Converged, "trial {trial}");
        assert_eq!(result.word, x, "trial {trial}");
    }
}

#[test]
fn converged_results_are_truthful() {
    let dist = DegreeDistribution::default_rate_0_6();
    let h = build_peg_code(400, &dist, 5).unwrap();
    for seed in 0..40u64 {
        let (x, y) = generate_key_pair(400, &BscParams::new(0.06, seed).unwrap()).unwrap();
        let target = syndrome(&h, &x).unwrap();
        let llrs = init_llrs(&y, 0.06, &[], &BTreeMap::new()).unwrap();
        let result = decode_syndrome(&h, &llrs, &target, 60).unwrap();
        assert_eq!(result.converged(), result.syndrome_matched);
        if result.converged() {
            assert_eq!(syndrome(&h, &result.word).unwrap(), target);
        } else {
            assert_ne!(syndrome(&h, &result.word).unwrap(), target);
        }
    }
}

#[test]
fn complementing_inputs_complements_output() {
    let h = build_peg_code(200, &DegreeDistribution::regular(3, 6).unwrap(), 9).unwrap();
    let ones = vec![1u8; 200];
    for seed in 0..10u64 {
        let (x, y) = generate_key_pair(200, &BscParams::new(0.05, seed).unwrap()).unwrap();
        let (xc, yc) = (xor(&x, &ones), xor(&y, &ones));
        let run = |x: &[u8], y: &[u8]| {
            let llrs = init_llrs(y, 0.05, &[], &BTreeMap::new()).unwrap();
            decode_syndrome(&h, &llrs, &syndrome(&h, x).unwrap(), 40).unwrap()
        };
        let plain = run(&x, &y);
        let complemented = run(&xc, &yc);
        assert_eq!(plain.outcome, complemented.outcome);
        assert_eq!(plain.iterations, complemented.iterations);
        assert_eq!(xor(&plain.word, &ones), complemented.word);
    }
}

#[test]
fn frame_error_rate_grows_with_crossover() {
    // rate 0.6 mother code, no modulation, 200 trials per point
    let h = build_peg_code(1000, &DegreeDistribution::default_rate_0_6(), 1).unwrap();
    let trials = 200;
    let crossovers = [0.02, 0.05, 0.08, 0.11];
    let fer: Vec<f64> = crossovers
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let failures = (0..trials)
                .filter(|&t| {
                    let seed = blindrec::rng::derive_seed(77, k as u64, t as u64);
                    let (x, y) = generate_key_pair(1000, &BscParams::new(e, seed).unwrap()).unwrap();
                    let llrs = init_llrs(&y, 0.0946, &[], &BTreeMap::new()).unwrap();
                    let target = syndrome(&h, &x).unwrap();
                    !decode_syndrome(&h, &llrs, &target, 50).unwrap().converged()
                })
                .count();
            failures as f64 / trials as f64
        })
        .collect();
    let sigma = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
    let inversions = fer
        .windows(2)
        .filter(|w| w[1] < w[0] - 2.0 * sigma(w[0]).max(sigma(w[1])))
        .count();
    assert!(inversions <= 1, "{fer:?}");
    assert!(fer[0] < fer[3], "{fer:?}");
}

#[test]
fn punctured_high_rate_fails_beyond_range() {
    // n = 2000 desk code at its maximum modulated rate (all 200 reserved
    // symbols punctured, R = 2/3) cannot follow a 0.12 channel
    let n = 2000;
    let h = build_peg_code(n, &DegreeDistribution::default_rate_0_6(), 1).unwrap();
    let mut failures = 0;
    let trials = 20;
    for t in 0..trials {
        let mut rng = Prng::from_seed(1000 + t);
        let punctured = blindrec::rate::select_reserved_positions(n, 200, t);
        let (key, y) = generate_key_pair(n, &BscParams::new(0.12, t).unwrap()).unwrap();
        let mut x = key.clone();
        for &p in &punctured {
            x[p] = (rng.next_u64() & 1) as u8;
        }
        let llrs = init_llrs(&y, 0.0615, &punctured, &BTreeMap::new()).unwrap();
        let result = decode_syndrome(&h, &llrs, &syndrome(&h, &x).unwrap(), 100).unwrap();
        if !result.syndrome_matched {
            failures += 1;
            assert_eq!(result.outcome, Outcome::MaxItersReached);
        }
        assert!(hamming_distance(&result.word, &x) > 0 || result.syndrome_matched);
    }
    assert!(failures * 10 >= trials * 9, "{failures}/{trials}");
}
