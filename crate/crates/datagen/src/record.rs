//! Dataset records and their JSONL encoding.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use ulid::Ulid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub raw_instruction: String,
    pub aligned_instruction: String,
    pub program: String,
    pub verdict_meta: VerdictMeta,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictMeta {
    pub n_worlds: usize,
    pub base_seed: u64,
    pub resample_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model_id: String,
    pub gen_temperature: f64,
    pub gen_top_p: f64,
    pub align_temperature: f64,
    pub max_resamples: u32,
    pub n_worlds: usize,
    pub dedup_threshold: f64,
    /// Set when the aligned instruction could not be extracted and the raw one was kept.
    pub alignment_fallback: bool,
    pub timestamps: Timestamps,
}

/// Milliseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub generated_at_ms: u64,
    pub aligned_at_ms: u64,
}

pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64)
    }
}

/// Always reports the same instant; used for reproducible datasets.
pub struct FixedClock(pub u64);

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.0
    }
}

/// ULID whose time part is `timestamp_ms` and whose random part is derived
/// from `(base_seed, slot)`, so reruns under a fixed clock repeat ids.
pub fn record_id(timestamp_ms: u64, base_seed: u64, slot: usize) -> String {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update((slot as u64).to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 16];
    bytes[6..].copy_from_slice(&digest[..10]);
    Ulid::from_parts(timestamp_ms, u128::from_be_bytes(bytes)).to_string()
}

pub fn to_jsonl(records: &[PairRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {source}")]
pub struct JsonlError {
    pub line: usize,
    pub source: serde_json::Error,
}

pub fn from_jsonl(text: &str) -> Result<Vec<PairRecord>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| JsonlError { line: i + 1, source }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample(slot: usize) -> PairRecord {
        PairRecord {
            id: record_id(1_700_000_000_000, 7, slot),
            raw_instruction: "Go to the lab".into(),
            aligned_instruction: "Go to the lab.".into(),
            program: "def task_program():\n    go_to(\"lab\")\n".into(),
            verdict_meta: VerdictMeta {
                n_worlds: 100,
                base_seed: 7,
                resample_count: 0,
            },
            provenance: Provenance {
                model_id: "m".into(),
                gen_temperature: 1.0,
                gen_top_p: 0.95,
                align_temperature: 0.3,
                max_resamples: 3,
                n_worlds: 100,
                dedup_threshold: 0.6,
                alignment_fallback: false,
                timestamps: Timestamps {
                    generated_at_ms: 1,
                    aligned_at_ms: 2,
                },
            },
        }
    }

    #[test]
    fn ids_are_reproducible_ulids() {
        let a = record_id(1_700_000_000_000, 7, 3);
        assert_eq!(a, record_id(1_700_000_000_000, 7, 3));
        assert_ne!(a, record_id(1_700_000_000_000, 7, 4));
        let u: Ulid = a.parse().unwrap();
        assert_eq!(u.timestamp_ms(), 1_700_000_000_000);
    }

    #[test]
    fn jsonl_round_trip_and_key_order() {
        let recs = vec![sample(0), sample(1)];
        let text = to_jsonl(&recs);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(from_jsonl(&text).unwrap(), recs);
        let line = text.lines().next().unwrap();
        let order = ["\"id\"", "\"raw_instruction\"", "\"aligned_instruction\"", "\"program\"", "\"verdict_meta\"", "\"provenance\""];
        let pos: Vec<usize> = order.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(from_jsonl("{not json}\n").is_err());
    }
}
