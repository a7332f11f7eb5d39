use blindrec::ldpc::{
    build_peg_code, design_rate, load_alist, save_alist, syndrome, DegreeDistribution,
};
use blindrec::rng::Prng;

#[test]
fn default_distribution_desk_code() {
    let dist = DegreeDistribution::default_rate_0_6();
    assert!((design_rate(&dist) - 0.6).abs() < 1e-12);
    let code = build_peg_code(2000, &dist, 1).unwrap();
    assert_eq!((code.n(), code.m()), (2000, 800));
    assert!((code.rate() - design_rate(&dist)).abs() <= 2.0 / 2000.0);
    assert_eq!(code.num_edges(), 6000);
}

#[test]
fn peg_is_deterministic_per_seed() {
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let a = build_peg_code(600, &dist, 42).unwrap();
    let b = build_peg_code(600, &dist, 42).unwrap();
    assert_eq!(save_alist(&a), save_alist(&b));
}

#[test]
fn regular_code_girth() {
    let code = build_peg_code(1200, &DegreeDistribution::regular(3, 6).unwrap(), 7).unwrap();
    assert!(code.girth().unwrap() >= 6);
    assert_eq!(code.column_degree_histogram().into_iter().collect::<Vec<_>>(), vec![(3, 1200)]);
    assert_eq!(code.row_degree_histogram().into_iter().collect::<Vec<_>>(), vec![(6, 600)]);
}

#[test]
fn alist_round_trip_preserves_syndromes() {
    let code = build_peg_code(500, &DegreeDistribution::default_rate_0_6(), 3).unwrap();
    let back = load_alist(&save_alist(&code)).unwrap();
    assert_eq!(back, code);
    let word = Prng::from_seed(5).bits(500);
    assert_eq!(syndrome(&code, &word).unwrap(), syndrome(&back, &word).unwrap());
}

#[test]
fn syndrome_is_linear() {
    let code = build_peg_code(300, &DegreeDistribution::regular(3, 6).unwrap(), 9).unwrap();
    let mut rng = Prng::from_seed(1);
    let (a, b) = (rng.bits(300), rng.bits(300));
    let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
    let (sa, sb, ss) = (
        syndrome(&code, &a).unwrap(),
        syndrome(&code, &b).unwrap(),
        syndrome(&code, &sum).unwrap(),
    );
    let xor: Vec<u8> = sa.bits().iter().zip(sb.bits()).map(|(x, y)| x ^ y).collect();
    assert_eq!(ss.bits(), xor.as_slice());
}
