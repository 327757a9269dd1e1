//! Robustness checked against a brute-force evaluator on a grid ten times
//! finer than the trace, plus exact duality laws.

mod common;

use std::time::Instant;

use common::oracle::{check_dualities, check_random_pairs, random_walk, trace, H};
use hyrepair::stl::{parse, robustness};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = common::oracle::SAMPLES;

#[test]
fn thousand_random_pairs_match_the_dense_oracle() {
    let start = Instant::now();
    let exact = check_random_pairs(7, 1000).unwrap();
    assert!(exact > 100, "too few formulas exercised the exact case ({exact})");
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn de_morgan_holds_bit_for_bit() {
    assert!(check_dualities(11, 300).unwrap() > 500);
}

#[test]
fn unbounded_globally_matches_a_bounded_window_to_the_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tr = trace(&random_walk(&mut rng), &random_walk(&mut rng));
    let end = (SAMPLES - 1) as f64 * H;
    let a = robustness(&parse("G[0, inf] (x - y > 0)").unwrap(), &tr).unwrap();
    let b = robustness(&parse(&format!("G[0, {end}] (x - y > 0)")).unwrap(), &tr).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn negation_flips_the_sign(xs in prop::collection::vec(-10.0f64..10.0, 2..30), c in -5.0f64..5.0) {
        let tr = trace(&xs, &xs);
        let f = parse(&format!("F[0, 0.1] x > {c}")).unwrap();
        let r = robustness(&f, &tr).unwrap().value;
        let n = robustness(&!f.clone(), &tr).unwrap().value;
        prop_assert_eq!(r, -n);
    }

    #[test]
    fn globally_from_zero_is_at_most_the_present(xs in prop::collection::vec(-10.0f64..10.0, 2..30), b in 0usize..10) {
        let tr = trace(&xs, &xs);
        let b = (b as f64 * H).min((xs.len() - 1) as f64 * H);
        let g = robustness(&parse(&format!("G[0, {b}] x > 0")).unwrap(), &tr).unwrap().value;
        let now = robustness(&parse("x > 0").unwrap(), &tr).unwrap().value;
        prop_assert!(g <= now);
        let f = robustness(&parse(&format!("F[0, {b}] x > 0")).unwrap(), &tr).unwrap().value;
        prop_assert!(f >= now);
    }
}
