use angelsim_datagen::similarity::{dedup_by, dedup_texts, edit_similarity, levenshtein};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook recursive definition with memoisation; no shared code with the fast path.
fn oracle(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], memo: &mut Vec<Vec<Option<usize>>>) -> usize {
        if let Some(v) = memo[a.len()][b.len()] {
            return v;
        }
        let v = match (a.split_last(), b.split_last()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => {
                let sub = go(ra, rb, memo) + usize::from(x != y);
                sub.min(go(ra, b, memo) + 1).min(go(a, rb, memo) + 1)
            }
        };
        memo[a.len()][b.len()] = Some(v);
        v
    }
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    go(a, b, &mut memo)
}

fn oracle_similarity(a: &[u8], b: &[u8]) -> f64 {
    let m = a.len().max(b.len());
    if m == 0 {
        1.0
    } else {
        1.0 - oracle(a, b) as f64 / m as f64
    }
}

#[test]
fn matches_brute_force_on_ten_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..10_000 {
        let alphabet = rng.random_range(1..=6u8);
        let seq = |rng: &mut ChaCha8Rng| -> Vec<u8> {
            let n = rng.random_range(0..=12);
            (0..n).map(|_| rng.random_range(0..alphabet)).collect()
        };
        let a = seq(&mut rng);
        let b = seq(&mut rng);
        assert_eq!(levenshtein(&a, &b), oracle(&a, &b), "case {case}: {a:?} {b:?}");
        assert_eq!(edit_similarity(&a, &b), oracle_similarity(&a, &b), "case {case}");
    }
}

#[test]
fn dedup_is_idempotent_on_a_hundred_corpora() {
    let vocab = ["go", "to", "the", "kitchen", "office", "pick", "apple", "ask", "alice", "bring", "it", "back"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.random_range(0..40);
        let corpus: Vec<String> = (0..n)
            .map(|_| {
                let len = rng.random_range(1..8);
                (0..len).map(|_| vocab[rng.random_range(0..vocab.len())]).collect::<Vec<_>>().join(" ")
            })
            .collect();
        let once = dedup_texts(corpus.clone(), 0.6);
        let twice = dedup_texts(once.clone(), 0.6);
        assert_eq!(once, twice);
        assert!(once.len() <= corpus.len());
    }
}

proptest! {
    #[test]
    fn similarity_is_symmetric_and_bounded(a in prop::collection::vec(0u8..5, 0..15), b in prop::collection::vec(0u8..5, 0..15)) {
        let s = edit_similarity(&a, &b);
        prop_assert_eq!(s, edit_similarity(&b, &a));
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn kept_items_are_pairwise_dissimilar(corpus in prop::collection::vec("[a-c]( [a-c]){0,5}", 0..20)) {
        let kept = dedup_by(corpus, 0.6, |s| s.as_str());
        for (i, x) in kept.iter().enumerate() {
            for y in &kept[..i] {
                prop_assert!(angelsim_datagen::similarity::text_similarity(x, y) <= 0.6);
            }
        }
    }
}
