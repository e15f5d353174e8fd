//! Token-level edit similarity, near-duplicate removal and decontamination.

/// Lowercased runs of alphanumerics; every other non-space character is its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Levenshtein distance over token slices, two-row dynamic programme.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(a, b) / max(|a|, |b|)`, and 1 when both are empty.
pub fn edit_similarity<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

pub fn text_similarity(a: &str, b: &str) -> f64 {
    edit_similarity(&tokenize(a), &tokenize(b))
}

/// Greedy scan in input order: an item is dropped when its similarity to any
/// earlier kept item exceeds `threshold`.
pub fn dedup_by<T, F>(items: Vec<T>, threshold: f64, key: F) -> Vec<T>
where
    F: Fn(&T) -> &str,
{
    let mut kept: Vec<T> = Vec::new();
    let mut kept_tokens: Vec<Vec<String>> = Vec::new();
    for item in items {
        let tokens = tokenize(key(&item));
        if kept_tokens.iter().any(|k| edit_similarity(k, &tokens) > threshold) {
            continue;
        }
        kept_tokens.push(tokens);
        kept.push(item);
    }
    kept
}

/// Drops every item whose similarity to some benchmark text exceeds `threshold`.
pub fn decontaminate_by<T, F>(items: Vec<T>, benchmark: &[String], threshold: f64, key: F) -> Vec<T>
where
    F: Fn(&T) -> &str,
{
    let bench: Vec<Vec<String>> = benchmark.iter().map(|b| tokenize(b)).collect();
    items
        .into_iter()
        .filter(|item| {
            let tokens = tokenize(key(item));
            !bench.iter().any(|b| edit_similarity(b, &tokens) > threshold)
        })
        .collect()
}

pub fn dedup_texts(texts: Vec<String>, threshold: f64) -> Vec<String> {
    dedup_by(texts, threshold, |s| s.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn tokenizer() {
        assert_eq!(tokenize("Go to Arjun's office, NOW!"), ["go", "to", "arjun", "'", "s", "office", ",", "now", "!"]);
        assert!(tokenize("  ").is_empty());
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(edit_similarity(&words("a b c"), &words("a b c")), 1.0);
        let s = edit_similarity(&words("go to kitchen"), &words("go to office"));
        assert!((s - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(edit_similarity(&words("a b c"), &words("x y z")), 0.0);
        assert_eq!(edit_similarity::<String>(&[], &[]), 1.0);
        assert_eq!(levenshtein(&words("kitten"), &words("")), 1);
    }

    #[test]
    fn dedup_examples() {
        let same = vec!["Go to the lab".to_string(), "go to the lab".to_string()];
        assert_eq!(dedup_texts(same, 0.6).len(), 1);
        let disjoint = vec!["alpha beta".to_string(), "gamma delta".to_string(), "epsilon".to_string()];
        assert_eq!(dedup_texts(disjoint.clone(), 0.6), disjoint);
    }

    #[test]
    fn greedy_triple_keeps_a_and_c() {
        // B has 40 tokens. A is its first 30 with two substitutions outside
        // the overlap with C; C is its last 30 with one substitution inside
        // the overlap and one outside.
        let b: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
        let mut a = b[..30].to_vec();
        a[0] = "xa".into();
        a[1] = "xb".into();
        let mut c = b[10..].to_vec();
        c[10] = "xc".into();
        c[25] = "xd".into();
        let (a, b, c) = (a.join(" "), b.join(" "), c.join(" "));
        assert!((text_similarity(&a, &b) - 0.7).abs() < 1e-12);
        assert!((text_similarity(&b, &c) - 0.7).abs() < 1e-12);
        assert!((text_similarity(&a, &c) - 0.3).abs() < 1e-12);
        let kept = dedup_texts(vec![a.clone(), b, c.clone()], 0.6);
        assert_eq!(kept, vec![a, c]);
    }

    #[test]
    fn decontamination_examples() {
        let items = vec!["Bring me an apple".to_string(), "Count the chairs".to_string()];
        let bench = vec!["bring me an apple".to_string()];
        assert_eq!(decontaminate_by(items.clone(), &bench, 0.6, |s| s.as_str()), vec!["Count the chairs".to_string()]);
        assert_eq!(decontaminate_by(items.clone(), &[], 0.6, |s| s.as_str()), items);

        // 20 tokens, 7 substituted: similarity 0.65
        let orig: Vec<String> = (0..20).map(|i| format!("t{i}")).collect();
        let mut para = orig.clone();
        for p in para.iter_mut().take(7) {
            p.push('x');
        }
        let (orig, para) = (orig.join(" "), para.join(" "));
        assert!((text_similarity(&orig, &para) - 0.65).abs() < 1e-12);
        assert!(decontaminate_by(vec![para], &[orig], 0.6, |s| s.as_str()).is_empty());
    }
}
