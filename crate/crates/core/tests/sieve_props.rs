//! Cross-validation and invariants of the representation sieves.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::represented_set_bruteforce;
use tqf_core::arith::isqrt;
use tqf_core::sieve::{represents, sieve_all, sieve_progression, BlockPlan};
use tqf_core::{Form, Progression};

fn random_form(rng: &mut ChaCha8Rng, max: u64) -> Form {
    Form::new(
        rng.gen_range(1..=max),
        rng.gen_range(1..=max),
        rng.gen_range(1..=max),
    )
    .unwrap()
}

#[test]
fn sieve_matches_per_value_tests_on_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let plan = BlockPlan::default();
    for _ in 0..50 {
        let q = random_form(&mut rng, 30);
        let bm = sieve_all(&q, 10_000, &plan).unwrap();
        for n in 0..=10_000u64 {
            assert_eq!(
                bm.contains(n),
                represents(&q, n).is_some(),
                "{q} at {n}"
            );
        }
    }
}

#[test]
fn sieve_matches_bruteforce_triple_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    let plan = BlockPlan::default();
    for _ in 0..20 {
        let q = random_form(&mut rng, 25);
        let bm = sieve_all(&q, 20_000, &plan).unwrap();
        let brute = represented_set_bruteforce(&q, 20_000);
        for n in 0..=20_000u64 {
            assert_eq!(bm.contains(n), brute[n as usize], "{q} at {n}");
        }
    }
}

#[test]
fn progression_scan_equals_filtered_bitmap() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0012);
    let plan = BlockPlan::default();
    for _ in 0..50 {
        let q = random_form(&mut rng, 30);
        let bm = sieve_all(&q, 10_000, &plan).unwrap();
        for k in 1..=12u64 {
            for l in 1..=k {
                let gaps = sieve_progression(&q, k, l, 10_000, &plan).unwrap();
                let s = Progression::new(k, l).unwrap();
                let expected: Vec<u64> =
                    s.elements_upto(10_000).filter(|&n| !bm.contains(n)).collect();
                assert_eq!(gaps, expected, "{q} k={k} l={l}");
            }
        }
    }
}

#[test]
fn unrepresented_lists_are_prefix_consistent() {
    let plan = BlockPlan::default();
    for (a, b, c) in [(1, 1, 1), (2, 3, 7), (1, 5, 10), (4, 9, 25)] {
        let q = Form::new(a, b, c).unwrap();
        let small = sieve_all(&q, 3_000, &plan).unwrap();
        let large = sieve_all(&q, 9_000, &plan).unwrap();
        let from_small: Vec<u64> = small.unrepresented().collect();
        let from_large: Vec<u64> =
            large.unrepresented().take_while(|&n| n <= 3_000).collect();
        assert_eq!(from_small, from_large, "{q}");
        let gaps_small = sieve_progression(&q, 7, 3, 3_000, &plan).unwrap();
        let gaps_large = sieve_progression(&q, 7, 3, 9_000, &plan).unwrap();
        assert_eq!(
            gaps_small,
            gaps_large.iter().cloned().take_while(|&n| n <= 3_000).collect::<Vec<_>>()
        );
    }
}

#[test]
fn scaled_coefficient_forms_represent_a_subset() {
    // <a d^2, b, c> represents a subset of what <a, b, c> does
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0013);
    let plan = BlockPlan::default();
    for _ in 0..100 {
        let a = rng.gen_range(1..=12u64);
        let b = rng.gen_range(1..=12u64);
        let c = rng.gen_range(1..=12u64);
        let d = rng.gen_range(2..=4u64);
        let scaled = Form::new(a * d * d, b, c).unwrap();
        let base = Form::new(a, b, c).unwrap();
        let bm_scaled = sieve_all(&scaled, 10_000, &plan).unwrap();
        let bm_base = sieve_all(&base, 10_000, &plan).unwrap();
        for n in 0..=10_000u64 {
            if bm_scaled.contains(n) {
                assert!(bm_base.contains(n), "{scaled} represents {n}, {base} must too");
            }
        }
    }
}

#[test]
fn isqrt_is_exact_in_bulk() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0014);
    for _ in 0..100_000 {
        let n = rng.gen_range(0..=10_000_000_000_000u64);
        let r = isqrt(n);
        assert!(r * r <= n);
        assert!((r + 1) * (r + 1) > n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_size_does_not_change_the_bitmap(
        a in 1u64..20,
        b in 1u64..20,
        c in 1u64..20,
        block_words in 1u64..80,
        bound in 1u64..6000,
    ) {
        let q = Form::new(a, b, c).unwrap();
        let reference = sieve_all(&q, bound, &BlockPlan::default()).unwrap();
        let blocked = sieve_all(&q, bound, &BlockPlan::new(block_words * 64, 1 << 30)).unwrap();
        let lhs: Vec<u64> = reference.unrepresented().collect();
        let rhs: Vec<u64> = blocked.unrepresented().collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn block_size_does_not_change_progression_gaps(
        a in 1u64..15,
        b in 1u64..15,
        c in 1u64..15,
        k in 2u64..14,
        block_words in 1u64..40,
        bound in 1u64..6000,
    ) {
        let q = Form::new(a, b, c).unwrap();
        let l = 1 + (a + b) % k;
        let reference = sieve_progression(&q, k, l, bound, &BlockPlan::default()).unwrap();
        let blocked =
            sieve_progression(&q, k, l, bound, &BlockPlan::new(block_words * 64, 1 << 30)).unwrap();
        prop_assert_eq!(reference, blocked);
    }

    #[test]
    fn normalize_squarefree_is_idempotent(a in 1u64..5000, b in 1u64..5000, c in 1u64..5000) {
        let q = Form::new(a, b, c).unwrap();
        let n1 = q.normalize_squarefree();
        prop_assert_eq!(n1, n1.normalize_squarefree());
        prop_assert!(n1.has_squarefree_coefficients());
    }

    #[test]
    fn witnesses_always_evaluate_back(a in 1u64..30, b in 1u64..30, c in 1u64..30, n in 0u64..5000) {
        let q = Form::new(a, b, c).unwrap();
        if let Some((x, y, z)) = represents(&q, n) {
            prop_assert_eq!(q.eval(x, y, z), n);
        }
    }
}
