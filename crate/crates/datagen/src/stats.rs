//! Corpus diversity statistics.

use std::collections::BTreeSet;

use angelsim_core::world::{Category, CategorySet, START_LOCATION};
use angelsim_core::{parse_for, run_program, DomainSpec, Limits, SeededChoices, World};
use serde::{Deserialize, Serialize};

use crate::record::PairRecord;
use crate::similarity::tokenize;

pub const NGRAM_NOTE: &str = "ngram4_score = distinct token 4-grams / total token 4-grams, counted within each instruction";
pub const TOKENIZER_NOTE: &str = "tokens: lowercased alphanumeric runs; each other non-space character is one token";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub size: usize,
    pub ngram4_score: f64,
    pub distinct_synth_locations: usize,
    pub distinct_synth_objects: usize,
}

/// Distinct over total 4-grams; 0 when no text has four tokens.
pub fn ngram4_score<'a>(texts: impl IntoIterator<Item = &'a str>) -> f64 {
    let mut distinct = BTreeSet::new();
    let mut total = 0usize;
    for t in texts {
        let tokens = tokenize(t);
        for w in tokens.windows(4) {
            total += 1;
            distinct.insert(w.to_vec());
        }
    }
    if total == 0 {
        0.0
    } else {
        distinct.len() as f64 / total as f64
    }
}

fn synthesized_room(name: &str) -> bool {
    name == START_LOCATION
        || name
            .strip_prefix("room_")
            .is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
}

/// Location and object names a program binds across its verification worlds.
pub fn program_entities(
    source: &str,
    domain: &DomainSpec,
    n_worlds: usize,
    base_seed: u64,
    limits: &Limits,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut locations = BTreeSet::new();
    let mut objects = BTreeSet::new();
    let Ok(program) = parse_for(source, domain) else {
        return (locations, objects);
    };
    let location = CategorySet::of(&[Category::Location]);
    for i in 0..n_worlds {
        let mut world = World::new(
            Box::new(SeededChoices::new(base_seed.wrapping_add(i as u64))),
            domain.config.clone(),
        );
        run_program(&program, domain, &mut world, limits);
        for (name, e) in world.entities() {
            if synthesized_room(name) {
                continue;
            }
            if e.categories == location {
                locations.insert(name.clone());
            } else if e.categories.contains(Category::Object) {
                objects.insert(name.clone());
            }
        }
    }
    (locations, objects)
}

pub fn corpus_stats(records: &[PairRecord], domain: &DomainSpec, limits: &Limits) -> CorpusStats {
    let mut locations = BTreeSet::new();
    let mut objects = BTreeSet::new();
    for r in records {
        let (l, o) = program_entities(&r.program, domain, r.verdict_meta.n_worlds, r.verdict_meta.base_seed, limits);
        locations.extend(l);
        objects.extend(o);
    }
    CorpusStats {
        size: records.len(),
        ngram4_score: ngram4_score(records.iter().map(|r| r.aligned_instruction.as_str())),
        distinct_synth_locations: locations.len(),
        distinct_synth_objects: objects.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ngram_examples() {
        assert_eq!(ngram4_score(["go to the kitchen"]), 1.0);
        let ten = vec!["go to the kitchen"; 10];
        assert!((ngram4_score(ten) - 0.1).abs() < 1e-12);
        assert_eq!(ngram4_score(["too short"]), 0.0);
        assert_eq!(ngram4_score(std::iter::empty()), 0.0);
    }

    #[test]
    fn synthesized_rooms_are_excluded() {
        let src = "def task_program():\n    rooms = get_all_rooms()\n    for r in rooms:\n        go_to(r)\n    go_to(\"kitchen\")\n    if is_in_room(\"apple\"):\n        pick(\"apple\")\n    ask(\"Alice\", \"hi?\", [\"yes\"])\n";
        let (locs, objs) = program_entities(src, &DomainSpec::robot(), 20, 0, &Limits::default());
        assert_eq!(locs.into_iter().collect::<Vec<_>>(), ["kitchen"]);
        assert_eq!(objs.into_iter().collect::<Vec<_>>(), ["apple"]);
        assert!(synthesized_room("room_12"));
        assert!(!synthesized_room("room_"));
        assert!(!synthesized_room("living room"));
    }
}
