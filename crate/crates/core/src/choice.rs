//! The randomness channel every nondeterministic decision flows through.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Source of the boolean and indexed draws made while a world grows.
pub trait ChoiceSource: Send + fmt::Debug {
    /// Returns `true` with probability `p_true` (ignored by scripted sources).
    fn next_bool(&mut self, p_true: f64) -> bool;
    /// Returns an index in `0..n`; `n` is at least 1.
    fn next_index(&mut self, n: usize) -> usize;
}

/// Reproducible pseudo-random choices from a 64-bit seed.
#[derive(Debug, Clone)]
pub struct SeededChoices {
    rng: ChaCha8Rng,
}

impl SeededChoices {
    pub fn new(seed: u64) -> Self {
        SeededChoices {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl ChoiceSource for SeededChoices {
    fn next_bool(&mut self, p_true: f64) -> bool {
        self.rng.random_bool(p_true.clamp(0.0, 1.0))
    }

    fn next_index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n.max(1))
    }
}

/// Replays a prescribed sequence of choices. Booleans are encoded as
/// `0 = false`, `1 = true`; once the script runs out every draw yields 0.
#[derive(Debug, Clone, Default)]
pub struct ScriptedChoices {
    script: Vec<usize>,
    consumed: usize,
}

impl ScriptedChoices {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptedChoices { script, consumed: 0 }
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        Self::new(bools.iter().map(|&b| usize::from(b)).collect())
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    fn next_raw(&mut self) -> usize {
        let v = self.script.get(self.consumed).copied().unwrap_or(0);
        self.consumed += 1;
        v
    }
}

impl ChoiceSource for ScriptedChoices {
    fn next_bool(&mut self, _p_true: f64) -> bool {
        self.next_raw() != 0
    }

    fn next_index(&mut self, n: usize) -> usize {
        self.next_raw().min(n.max(1) - 1)
    }
}

/// One recorded draw: how many alternatives there were and which was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub arity: usize,
    pub value: usize,
}
