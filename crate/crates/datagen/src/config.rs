//! Pipeline configuration, loaded from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub llm: LlmConfig,
    pub gen: GenConfig,
    pub verify: VerifyConfig,
    pub align: AlignConfig,
    pub dedup: DedupConfig,
    pub pipeline: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: "http://localhost:8000/v1".into(),
            model: "codellama-7b-python".into(),
            api_key_env: "LLM_API_KEY".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub max_resamples: u32,
    pub max_tokens: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            temperature: 1.0,
            top_p: 0.95,
            max_resamples: 3,
            max_tokens: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub n_worlds: usize,
    pub base_seed: u64,
    pub max_steps: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_worlds: 100,
            base_seed: 0,
            max_steps: angelsim_core::Limits::default().max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            temperature: 0.3,
            top_p: 1.0,
            max_tokens: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupConfig {
    pub threshold: f64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig { threshold: 0.6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub target_records: usize,
    pub parallelism: usize,
    /// Instructions to try before giving up; 0 means `4 * target_records`.
    pub max_instructions: usize,
    pub output: PathBuf,
    pub report: Option<PathBuf>,
    /// Newline-separated benchmark instructions to decontaminate against.
    pub benchmark: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            target_records: 100,
            parallelism: 4,
            max_instructions: 0,
            output: PathBuf::from("dataset.jsonl"),
            report: None,
            benchmark: None,
        }
    }
}

impl RunConfig {
    pub fn instruction_budget(&self) -> usize {
        if self.max_instructions == 0 {
            self.target_records.saturating_mul(4)
        } else {
            self.max_instructions
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(0.0..=2.0).contains(&self.gen.temperature) || !(0.0..=2.0).contains(&self.align.temperature) {
            return bad("temperatures must lie in [0, 2]");
        }
        if !(self.gen.top_p > 0.0 && self.gen.top_p <= 1.0) || !(self.align.top_p > 0.0 && self.align.top_p <= 1.0) {
            return bad("top_p must lie in (0, 1]");
        }
        if self.verify.n_worlds == 0 {
            return bad("verify.n_worlds must be positive");
        }
        if !(0.0..=1.0).contains(&self.dedup.threshold) {
            return bad("dedup.threshold must lie in [0, 1]");
        }
        if self.pipeline.parallelism == 0 {
            return bad("pipeline.parallelism must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_published_settings() {
        let c = PipelineConfig::default();
        assert_eq!((c.gen.temperature, c.gen.top_p, c.gen.max_resamples), (1.0, 0.95, 3));
        assert_eq!(c.verify.n_worlds, 100);
        assert_eq!(c.align.temperature, 0.3);
        assert_eq!(c.dedup.threshold, 0.6);
        assert_eq!(c.pipeline.parallelism, 4);
        assert_eq!(c.llm.api_key_env, "LLM_API_KEY");
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let c = PipelineConfig::from_toml(
            "[llm]\nendpoint = \"http://h/v1\"\nmodel = \"m\"\n[verify]\nbase_seed = 9\n[pipeline]\ntarget_records = 5\n",
        )
        .unwrap();
        assert_eq!(c.llm.model, "m");
        assert_eq!(c.verify.base_seed, 9);
        assert_eq!(c.verify.n_worlds, 100);
        assert_eq!(c.pipeline.instruction_budget(), 20);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(PipelineConfig::from_toml("[gen]\ntemprature = 1.0\n").is_err());
        assert!(PipelineConfig::from_toml("[dedup]\nthreshold = 1.5\n").is_err());
        assert!(PipelineConfig::from_toml("[pipeline]\nparallelism = 0\n").is_err());
    }
}
