//! Synthetic instruction/program pairs for the robot domain: sample
//! candidates from an LLM, keep programs that pass angelic verification,
//! rewrite instructions to match them, then filter and persist.

pub mod config;
pub mod llm;
pub mod pipeline;
pub mod prompt;
pub mod record;
pub mod similarity;
pub mod stats;

pub use config::{ConfigError, PipelineConfig};
pub use llm::{ChatMessage, ChatRequest, FnLlm, LlmClient, LlmError, MockLlm, OpenAiClient, RecordingLlm};
pub use pipeline::{
    align_instruction, generate_candidate, rejection_sample, run_pipeline, run_to_files, PipelineContext,
    PipelineError, PipelineReport, PipelineRun, SampleOutcome, Script,
};
pub use record::{Clock, FixedClock, PairRecord, SystemClock};
pub use similarity::{edit_similarity, tokenize};
pub use stats::{corpus_stats, CorpusStats};
