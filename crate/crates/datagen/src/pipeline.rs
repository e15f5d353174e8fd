//! Generate, verify, align, filter and persist instruction/program pairs.

use std::collections::BTreeMap;
use std::path::Path;

use angelsim_core::parser::extract_program_block;
use angelsim_core::{parse_for, verify_monte_carlo, DomainSpec, Limits, VerifyOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::llm::{ChatMessage, ChatRequest, LlmClient, LlmError, MockLlm};
use crate::prompt::{alignment_prompt, extract_aligned_instruction, generation_prompt, resample_prompt};
use crate::record::{record_id, to_jsonl, Clock, PairRecord, Provenance, Timestamps, VerdictMeta};
use crate::similarity::{decontaminate_by, dedup_by};
use crate::stats::{corpus_stats, CorpusStats, NGRAM_NOTE, TOKENIZER_NOTE};

pub const EXTRACT_ERROR: &str = "ExtractError";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

/// Everything a pipeline run needs besides its configuration.
pub struct PipelineContext<'a> {
    pub client: &'a dyn LlmClient,
    pub clock: &'a dyn Clock,
    pub domain: DomainSpec,
    pub seed_tasks: Vec<&'a str>,
    pub benchmark: Vec<String>,
}

/// The six shipped seed tasks, in prompt order.
pub fn seed_list() -> Vec<&'static str> {
    angelsim_core::corpus::SEED_TASKS.iter().map(|f| f.source).collect()
}

/// Request seed for generation attempt `attempt` of instruction slot `slot`.
pub fn request_seed(cfg: &PipelineConfig, slot: usize, attempt: u32) -> u64 {
    let per_slot = u64::from(cfg.gen.max_resamples) + 1;
    cfg.verify
        .base_seed
        .wrapping_add((slot as u64).wrapping_mul(per_slot))
        .wrapping_add(u64::from(attempt))
}

pub fn generation_request(cfg: &PipelineConfig, seed_tasks: &[&str], pinned: Option<&str>, seed: u64) -> ChatRequest {
    let content = match pinned {
        Some(instruction) => resample_prompt(seed_tasks, instruction),
        None => generation_prompt(seed_tasks),
    };
    ChatRequest {
        model: cfg.llm.model.clone(),
        messages: vec![ChatMessage::user(content)],
        temperature: cfg.gen.temperature,
        top_p: cfg.gen.top_p,
        max_tokens: cfg.gen.max_tokens,
        seed: Some(seed),
    }
}

pub fn alignment_request(cfg: &PipelineConfig, instruction: &str, program: &str, seed: u64) -> ChatRequest {
    ChatRequest {
        model: cfg.llm.model.clone(),
        messages: vec![ChatMessage::user(alignment_prompt(instruction, program))],
        temperature: cfg.align.temperature,
        top_p: cfg.align.top_p,
        max_tokens: cfg.align.max_tokens,
        seed: Some(seed),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub instruction: String,
    pub program: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CandidateError {
    #[error("unusable completion: {0}")]
    Extract(String),
    #[error(transparent)]
    Llm(#[from] LlmError),
}

/// One generation call. With `pinned` set the instruction is fixed and only
/// the program is taken from the completion.
pub fn generate_candidate(
    client: &dyn LlmClient,
    cfg: &PipelineConfig,
    seed_tasks: &[&str],
    pinned: Option<&str>,
    seed: u64,
) -> Result<Candidate, CandidateError> {
    let completion = client.complete(&generation_request(cfg, seed_tasks, pinned, seed))?;
    let block = extract_program_block(&completion).map_err(|e| CandidateError::Extract(e.to_string()))?;
    let instruction = match pinned {
        Some(p) => p.to_string(),
        None if block.instruction.is_empty() => {
            return Err(CandidateError::Extract("completion has no instruction".into()));
        }
        None => block.instruction,
    };
    Ok(Candidate {
        instruction,
        program: block.source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleOutcome {
    Accepted {
        instruction: String,
        program: String,
        resample_count: u32,
    },
    Exhausted {
        instruction: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub outcome: SampleOutcome,
    /// Programs requested for this instruction, accepted one included.
    pub candidates: u32,
    /// Failure class of each rejected attempt, in order.
    pub rejections: Vec<String>,
}

fn verify_options(cfg: &PipelineConfig) -> VerifyOptions {
    VerifyOptions {
        n_worlds: cfg.verify.n_worlds,
        base_seed: cfg.verify.base_seed,
        limits: Limits {
            max_steps: cfg.verify.max_steps,
        },
        threads: 0,
    }
}

/// Rejection class of a program, or `None` when it verifies.
pub fn check_program(source: &str, domain: &DomainSpec, cfg: &PipelineConfig) -> Option<String> {
    let program = match parse_for(source, domain) {
        Ok(p) => p,
        Err(_) => return Some("ParseError".into()),
    };
    let verdict = verify_monte_carlo(&program, domain, &verify_options(cfg));
    verdict
        .first_failure
        .map(|f| f.error_class().as_str().to_string())
}

/// Samples programs for one instruction until one verifies or
/// `1 + max_resamples` attempts have failed.
pub fn rejection_sample(
    client: &dyn LlmClient,
    cfg: &PipelineConfig,
    seed_tasks: &[&str],
    domain: &DomainSpec,
    slot: usize,
) -> Result<SampleResult, LlmError> {
    let mut pinned: Option<String> = None;
    let mut rejections = Vec::new();
    for attempt in 0..=cfg.gen.max_resamples {
        let seed = request_seed(cfg, slot, attempt);
        let candidate = match generate_candidate(client, cfg, seed_tasks, pinned.as_deref(), seed) {
            Ok(c) => c,
            Err(CandidateError::Llm(e)) => return Err(e),
            Err(CandidateError::Extract(msg)) => {
                log::debug!("slot {slot} attempt {attempt}: {msg}");
                rejections.push(EXTRACT_ERROR.to_string());
                continue;
            }
        };
        pinned.get_or_insert_with(|| candidate.instruction.clone());
        match check_program(&candidate.program, domain, cfg) {
            None => {
                return Ok(SampleResult {
                    outcome: SampleOutcome::Accepted {
                        instruction: candidate.instruction,
                        program: candidate.program,
                        resample_count: attempt,
                    },
                    candidates: attempt + 1,
                    rejections,
                })
            }
            Some(class) => {
                log::debug!("slot {slot} attempt {attempt}: rejected ({class})");
                rejections.push(class);
            }
        }
    }
    Ok(SampleResult {
        outcome: SampleOutcome::Exhausted { instruction: pinned },
        candidates: cfg.gen.max_resamples + 1,
        rejections,
    })
}

/// Aligned instruction, or the raw one plus `true` when none could be extracted.
pub fn align_instruction(
    client: &dyn LlmClient,
    cfg: &PipelineConfig,
    instruction: &str,
    program: &str,
    seed: u64,
) -> Result<(String, bool), LlmError> {
    let completion = client.complete(&alignment_request(cfg, instruction, program, seed))?;
    Ok(match extract_aligned_instruction(&completion) {
        Some(aligned) => (aligned, false),
        None => (instruction.to_string(), true),
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineReport {
    pub notes: Vec<String>,
    pub slots: usize,
    pub accepted: usize,
    pub exhausted: usize,
    pub candidates: usize,
    pub rejections_by_class: BTreeMap<String, usize>,
    /// Rejected programs over generated programs.
    pub program_rejection_rate: f64,
    /// Exhausted instructions over instructions tried.
    pub instruction_discard_rate: f64,
    pub alignment_fallbacks: usize,
    pub dedup_dropped: usize,
    pub decontaminated: usize,
    pub written: usize,
    pub stats: Option<CorpusStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

#[derive(Debug)]
pub struct PipelineRun {
    /// Records surviving dedup and decontamination, in slot order.
    pub records: Vec<PairRecord>,
    pub report: PipelineReport,
    /// Transport failure that stopped the run early, if any.
    pub error: Option<LlmError>,
}

impl PipelineRun {
    pub fn jsonl(&self) -> String {
        to_jsonl(&self.records)
    }
}

struct SlotResult {
    sample: SampleResult,
    record: Option<PairRecord>,
}

fn run_slot(ctx: &PipelineContext<'_>, cfg: &PipelineConfig, slot: usize) -> Result<SlotResult, LlmError> {
    let sample = rejection_sample(ctx.client, cfg, &ctx.seed_tasks, &ctx.domain, slot)?;
    let SampleOutcome::Accepted {
        instruction,
        program,
        resample_count,
    } = &sample.outcome
    else {
        return Ok(SlotResult { sample, record: None });
    };
    let generated_at_ms = ctx.clock.now_ms();
    let seed = request_seed(cfg, slot, *resample_count);
    let (aligned, fallback) = align_instruction(ctx.client, cfg, instruction, program, seed)?;
    let aligned_at_ms = ctx.clock.now_ms();
    let record = PairRecord {
        id: record_id(generated_at_ms, cfg.verify.base_seed, slot),
        raw_instruction: instruction.clone(),
        aligned_instruction: aligned,
        program: program.clone(),
        verdict_meta: VerdictMeta {
            n_worlds: cfg.verify.n_worlds,
            base_seed: cfg.verify.base_seed,
            resample_count: *resample_count,
        },
        provenance: Provenance {
            model_id: cfg.llm.model.clone(),
            gen_temperature: cfg.gen.temperature,
            gen_top_p: cfg.gen.top_p,
            align_temperature: cfg.align.temperature,
            max_resamples: cfg.gen.max_resamples,
            n_worlds: cfg.verify.n_worlds,
            dedup_threshold: cfg.dedup.threshold,
            alignment_fallback: fallback,
            timestamps: Timestamps {
                generated_at_ms,
                aligned_at_ms,
            },
        },
    };
    Ok(SlotResult {
        sample,
        record: Some(record),
    })
}

/// Runs instruction slots in waves of `parallelism` until `target_records`
/// pairs are accepted or the instruction budget is spent. Results are taken
/// in slot order, so the output does not depend on the parallelism.
pub fn run_pipeline(cfg: &PipelineConfig, ctx: &PipelineContext<'_>) -> PipelineRun {
    let target = cfg.pipeline.target_records;
    let budget = cfg.pipeline.instruction_budget();
    let k = cfg.pipeline.parallelism.max(1);
    let mut report = PipelineReport {
        notes: vec![TOKENIZER_NOTE.to_string(), NGRAM_NOTE.to_string()],
        ..Default::default()
    };
    let mut accepted: Vec<PairRecord> = Vec::new();
    let mut error = None;
    let mut next = 0usize;

    'waves: while accepted.len() < target && next < budget {
        let wave: Vec<usize> = (next..budget.min(next + k)).collect();
        next += wave.len();
        let results: Vec<Result<SlotResult, LlmError>> = std::thread::scope(|s| {
            let handles: Vec<_> = wave.iter().map(|&slot| s.spawn(move || run_slot(ctx, cfg, slot))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("pipeline worker panicked"))
                .collect()
        });
        for result in results {
            if accepted.len() >= target {
                break 'waves;
            }
            let slot = match result {
                Ok(s) => s,
                Err(e) => {
                    log::error!("aborting: {e}");
                    report.aborted = Some(e.to_string());
                    error = Some(e);
                    break 'waves;
                }
            };
            report.slots += 1;
            report.candidates += slot.sample.candidates as usize;
            for class in slot.sample.rejections {
                *report.rejections_by_class.entry(class).or_default() += 1;
            }
            match slot.record {
                Some(r) => {
                    report.alignment_fallbacks += usize::from(r.provenance.alignment_fallback);
                    accepted.push(r);
                }
                None => report.exhausted += 1,
            }
        }
    }

    report.accepted = accepted.len();
    let rejected: usize = report.rejections_by_class.values().sum();
    report.program_rejection_rate = ratio(rejected, report.candidates);
    report.instruction_discard_rate = ratio(report.exhausted, report.slots);

    let threshold = cfg.dedup.threshold;
    let deduped = dedup_by(accepted, threshold, |r| r.aligned_instruction.as_str());
    report.dedup_dropped = report.accepted - deduped.len();
    let kept = decontaminate_by(deduped, &ctx.benchmark, threshold, |r| r.aligned_instruction.as_str());
    report.decontaminated = report.accepted - report.dedup_dropped - kept.len();
    report.written = kept.len();
    if report.slots > 0 {
        let limits = Limits {
            max_steps: cfg.verify.max_steps,
        };
        report.stats = Some(corpus_stats(&kept, &ctx.domain, &limits));
    }
    PipelineRun {
        records: kept,
        report,
        error,
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs the pipeline and writes the dataset (and report, if configured).
/// Output is written even when a transport failure cut the run short.
pub fn run_to_files(cfg: &PipelineConfig, ctx: &PipelineContext<'_>) -> Result<PipelineRun, PipelineError> {
    let run = run_pipeline(cfg, ctx);
    write_file(&cfg.pipeline.output, &run.jsonl())?;
    if let Some(path) = &cfg.pipeline.report {
        let json = serde_json::to_string_pretty(&run.report).expect("reports always serialize");
        write_file(path, &(json + "\n"))?;
    }
    Ok(run)
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    std::fs::write(path, contents).map_err(|source| PipelineError::Io {
        context: format!("cannot write {}", path.display()),
        source,
    })
}

pub fn load_benchmark(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        context: format!("cannot read {}", path.display()),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Canned completions for each instruction slot, in request order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub slots: Vec<ScriptedSlot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedSlot {
    /// Generation completions, one per attempt.
    pub attempts: Vec<String>,
    /// Alignment completion, for slots whose last attempt verifies.
    #[serde(default)]
    pub alignment: Option<String>,
}

impl Script {
    /// Keys every completion by the request the pipeline will send for it
    /// under `cfg`, replaying the instruction pinning the pipeline does.
    pub fn to_mock(&self, cfg: &PipelineConfig, seed_tasks: &[&str]) -> MockLlm {
        let mut mock = MockLlm::new();
        for (slot, s) in self.slots.iter().enumerate() {
            let mut pinned: Option<String> = None;
            let mut last = None;
            for (attempt, text) in s.attempts.iter().enumerate() {
                let seed = request_seed(cfg, slot, attempt as u32);
                mock.insert(&generation_request(cfg, seed_tasks, pinned.as_deref(), seed), text.clone());
                if let Ok(block) = extract_program_block(text) {
                    if pinned.is_none() && !block.instruction.is_empty() {
                        pinned = Some(block.instruction);
                    }
                    last = Some((attempt as u32, block.source));
                }
            }
            if let (Some(alignment), Some((attempt, program)), Some(instruction)) = (&s.alignment, last, &pinned) {
                let seed = request_seed(cfg, slot, attempt);
                mock.insert(&alignment_request(cfg, instruction, &program, seed), alignment.clone());
            }
        }
        mock
    }
}
