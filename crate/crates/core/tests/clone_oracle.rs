mod common;

use langsuit::clone::{count_in_streams, detect_in_streams, CloneParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn as_tuples(v: &[langsuit::clone::IndexedPair]) -> Vec<(usize, usize, usize, usize, usize)> {
    v.iter()
        .map(|p| (p.a_doc, p.a_start, p.b_doc, p.b_start, p.len))
        .collect()
}

#[test]
fn fifty_small_documents_per_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    use rand::Rng;
    let mut doc = || -> Vec<String> {
        let n = rng.gen_range(0..12);
        (0..n).map(|_| format!("w{}", rng.gen_range(0..3))).collect()
    };
    let a: Vec<_> = (0..50).map(|_| doc()).collect();
    let b: Vec<_> = (0..50).map(|_| doc()).collect();
    let params = CloneParams::with_min_tokens(5);
    let expected = common::naive_clone_pairs(&a, &b, 5);
    assert!(!expected.is_empty());
    let got = detect_in_streams(&a, &b, &params).unwrap();
    assert_eq!(as_tuples(&got), expected);
    assert_eq!(
        count_in_streams(&a, &b, &params).unwrap().count,
        expected.len() as u64
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_naive_oracle(seed in any::<u64>(), m in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = common::random_clone_corpora(&mut rng, 600);
        let params = CloneParams::with_min_tokens(m);
        let got = detect_in_streams(&a, &b, &params).unwrap();
        prop_assert_eq!(as_tuples(&got), common::naive_clone_pairs(&a, &b, m));
        prop_assert_eq!(count_in_streams(&a, &b, &params).unwrap().count, got.len() as u64);
    }

    #[test]
    fn symmetric_under_swap(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = common::random_clone_corpora(&mut rng, 400);
        let params = CloneParams::with_min_tokens(m);
        let ab = detect_in_streams(&a, &b, &params).unwrap();
        let mut ba: Vec<_> = detect_in_streams(&b, &a, &params)
            .unwrap()
            .into_iter()
            .map(|p| (p.b_doc, p.b_start, p.a_doc, p.a_start, p.len))
            .collect();
        ba.sort_unstable();
        prop_assert_eq!(as_tuples(&ab), ba);
    }

    #[test]
    fn raising_min_tokens_never_adds_clones(seed in any::<u64>(), m in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = common::random_clone_corpora(&mut rng, 400);
        let lo = count_in_streams(&a, &b, &CloneParams::with_min_tokens(m)).unwrap().count;
        let hi = count_in_streams(&a, &b, &CloneParams::with_min_tokens(m + 1)).unwrap().count;
        prop_assert!(hi <= lo);
    }

    #[test]
    fn reported_pairs_are_equal_and_maximal(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = common::random_clone_corpora(&mut rng, 400);
        for p in detect_in_streams(&a, &b, &CloneParams::with_min_tokens(m)).unwrap() {
            let (ta, tb) = (&a[p.a_doc], &b[p.b_doc]);
            prop_assert!(p.len >= m);
            prop_assert_eq!(&ta[p.a_start..p.a_start + p.len], &tb[p.b_start..p.b_start + p.len]);
            let left_ok = p.a_start == 0 || p.b_start == 0
                || ta[p.a_start - 1] != tb[p.b_start - 1];
            let (ea, eb) = (p.a_start + p.len, p.b_start + p.len);
            let right_ok = ea == ta.len() || eb == tb.len() || ta[ea] != tb[eb];
            prop_assert!(left_ok && right_ok);
        }
    }
}
