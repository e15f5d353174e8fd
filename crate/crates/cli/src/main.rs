//! `angelsim`: verify robot programs and build instruction/program datasets.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use angelsim_core::interp::RunOutcome;
use angelsim_core::{
    parse_for, replay, verify_exhaustive, verify_monte_carlo, DomainSpec, ExhaustiveCaps, Limits, Origin,
    VerifyOptions,
};
use angelsim_datagen::pipeline::{load_benchmark, run_to_files, seed_list, Script};
use angelsim_datagen::record::{from_jsonl, to_jsonl};
use angelsim_datagen::similarity::{decontaminate_by, dedup_by};
use angelsim_datagen::{
    align_instruction, corpus_stats, Clock, FixedClock, LlmClient, MockLlm, OpenAiClient, PipelineConfig,
    PipelineContext, SystemClock,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TRANSPORT: u8 = 3;

#[derive(Parser)]
#[command(name = "angelsim", version, about = "Angelic verification of robot task programs")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on success; rely on the exit code.
    #[arg(long, global = true)]
    quiet: bool,
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program against randomly grown worlds.
    Verify(VerifyArgs),
    /// Run the generation pipeline and write a JSONL dataset.
    Generate(GenerateArgs),
    /// Rewrite one instruction to match a verified program.
    Align(AlignArgs),
    /// Remove near-duplicates (and benchmark lookalikes) from a dataset.
    Dedup(DedupArgs),
    /// Diversity statistics of a dataset.
    Stats(StatsArgs),
}

#[derive(Args)]
struct VerifyArgs {
    program: PathBuf,
    #[arg(long, default_value = "robot", value_parser = clap::builder::PossibleValuesParser::new(DomainSpec::NAMES))]
    domain: String,
    #[arg(long, default_value_t = 100)]
    worlds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate every choice sequence instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Include the event trace of the failing (or first) world.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct LlmSource {
    /// Replay canned completions from a scripted pipeline file instead of calling an endpoint.
    #[arg(long, conflicts_with = "replay")]
    mock: Option<PathBuf>,
    /// Replay completions keyed by request digest (a recorded mock).
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    llm: LlmSource,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Instructions to try before stopping; defaults to the script length under --mock.
    #[arg(long)]
    max_instructions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stamp records with this time (ms since epoch) instead of the wall clock.
    #[arg(long)]
    fixed_clock: Option<u64>,
}

#[derive(Args)]
struct AlignArgs {
    /// File holding the original instruction.
    instruction: PathBuf,
    /// File holding the verified program.
    program: PathBuf,
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DedupArgs {
    input: PathBuf,
    #[arg(long)]
    threshold: Option<f64>,
    /// Newline-separated benchmark instructions to decontaminate against.
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Write kept records here; otherwise they go to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
}

/// A failure that ends the command with an exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }
}

/// What a command wants printed, and how it ends.
struct Output {
    code: u8,
    json: Value,
    text: String,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let json_requested = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if json_requested {
                println!("{}", json!({"error": "usage", "message": e.kind().to_string()}));
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let level = if cli.quiet { "off" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Generate(a) => generate(&cli, a),
        Command::Align(a) => align(&cli, a),
        Command::Dedup(a) => dedup(&cli, a),
        Command::Stats(a) => stats(&cli, a),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("values serialize"));
            } else if !cli.quiet && !out.text.is_empty() {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            if cli.json {
                println!("{}", json!({"error": f.kind, "message": f.message}));
            }
            eprintln!("angelsim: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    match &cli.config {
        Some(p) => PipelineConfig::load(p).map_err(|e| Failure::usage(e.to_string())),
        None => Ok(PipelineConfig::default()),
    }
}

fn verify(a: &VerifyArgs) -> Result<Output, Failure> {
    let source = read(&a.program)?;
    let domain = DomainSpec::by_name(&a.domain).expect("clap restricts domain names");
    let program = match parse_for(&source, &domain) {
        Ok(p) => p,
        Err(e) => {
            return Err(Failure {
                code: EXIT_USAGE,
                kind: "ParseError",
                message: format!("{}: {e}", a.program.display()),
            })
        }
    };
    let mut limits = Limits::default();
    if let Some(k) = a.max_steps {
        limits.max_steps = k;
    }
    let verdict = if a.exhaustive {
        verify_exhaustive(
            &program,
            &domain,
            &ExhaustiveCaps {
                limits,
                ..Default::default()
            },
        )
    } else {
        verify_monte_carlo(
            &program,
            &domain,
            &VerifyOptions {
                n_worlds: a.worlds,
                base_seed: a.seed,
                limits,
                threads: 0,
            },
        )
    };

    let summary = verdict.summary();
    let mut json = serde_json::to_value(&summary).expect("verdicts serialize");
    let mut text = if verdict.valid {
        format!("valid ({:?}, {} worlds)\n", verdict.mode, verdict.worlds_run)
    } else if let Some(reason) = &verdict.abstain_reason {
        format!("abstained: {reason}\n")
    } else {
        let f = summary.first_failure.as_ref().expect("invalid verdicts carry a failure");
        let origin = match (&f.seed, &f.choices) {
            (Some(s), _) => format!("seed {s}"),
            (_, Some(c)) => format!("choices {c:?}"),
            _ => String::new(),
        };
        format!(
            "invalid: {} at line {}: {} (world {}, {origin})\n",
            f.error_class, f.line, f.message, f.world_index
        )
    };
    if a.trace {
        let outcome: RunOutcome = match &verdict.first_failure {
            Some(f) => f.outcome.clone(),
            None if a.exhaustive => replay(&program, &domain, &Origin::Choices(vec![]), &limits),
            None => replay(&program, &domain, &Origin::Seed(a.seed), &limits),
        };
        for e in &outcome.events {
            text.push_str("  ");
            text.push_str(&serde_json::to_string(e).expect("events serialize"));
            text.push('\n');
        }
        json["trace"] = serde_json::to_value(&outcome.events).expect("events serialize");
    }
    Ok(Output {
        code: if verdict.valid { EXIT_OK } else { EXIT_NEGATIVE },
        json,
        text,
    })
}

fn load_script(path: &Path) -> Result<Script, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn client_for(cfg: &PipelineConfig, mock: Option<&Path>, replay: Option<&Path>) -> Result<Box<dyn LlmClient>, Failure> {
    if let Some(p) = mock {
        return Ok(Box::new(load_script(p)?.to_mock(cfg, &seed_list())));
    }
    if let Some(p) = replay {
        let mock = MockLlm::from_json(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
        return Ok(Box::new(mock));
    }
    Ok(Box::new(OpenAiClient::from_env(&cfg.llm.endpoint, &cfg.llm.api_key_env)))
}

fn transport(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_TRANSPORT,
        kind: "transport",
        message: e.to_string(),
    }
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Result<Output, Failure> {
    let mut cfg = load_config(cli)?;
    if let Some(o) = &a.output {
        cfg.pipeline.output = o.clone();
    }
    if let Some(r) = &a.report {
        cfg.pipeline.report = Some(r.clone());
    }
    if let Some(t) = a.target {
        cfg.pipeline.target_records = t;
    }
    if let Some(k) = a.parallelism {
        cfg.pipeline.parallelism = k;
    }
    if let Some(s) = a.seed {
        cfg.verify.base_seed = s;
    }
    if let Some(m) = a.max_instructions {
        cfg.pipeline.max_instructions = m;
    } else if let Some(p) = &a.llm.mock {
        cfg.pipeline.max_instructions = load_script(p)?.slots.len();
    }
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let benchmark = match &cfg.pipeline.benchmark {
        Some(p) => load_benchmark(p).map_err(|e| Failure::usage(e.to_string()))?,
        None => vec![],
    };
    let client = client_for(&cfg, a.llm.mock.as_deref(), a.llm.replay.as_deref())?;
    let clock: Box<dyn Clock> = match a.fixed_clock {
        Some(ms) => Box::new(FixedClock(ms)),
        None => Box::new(SystemClock),
    };
    let ctx = PipelineContext {
        client: client.as_ref(),
        clock: clock.as_ref(),
        domain: DomainSpec::robot(),
        seed_tasks: seed_list(),
        benchmark,
    };
    let run = run_to_files(&cfg, &ctx).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(e) = run.error {
        return Err(transport(format!(
            "{e} ({} records written to {})",
            run.report.written,
            cfg.pipeline.output.display()
        )));
    }
    let r = &run.report;
    let mut text = format!(
        "wrote {} records to {}\ninstructions tried: {} (accepted {}, exhausted {})\nprograms generated: {} (rejection rate {:.3})\n",
        r.written,
        cfg.pipeline.output.display(),
        r.slots,
        r.accepted,
        r.exhausted,
        r.candidates,
        r.program_rejection_rate
    );
    for (class, n) in &r.rejections_by_class {
        text.push_str(&format!("  rejected {class}: {n}\n"));
    }
    text.push_str(&format!(
        "dedup dropped {}, decontaminated {}, alignment fallbacks {}\n",
        r.dedup_dropped, r.decontaminated, r.alignment_fallbacks
    ));
    Ok(Output {
        code: EXIT_OK,
        json: serde_json::to_value(r).expect("reports serialize"),
        text,
    })
}

fn align(cli: &Cli, a: &AlignArgs) -> Result<Output, Failure> {
    let cfg = load_config(cli)?;
    let instruction = read(&a.instruction)?;
    let program_text = read(&a.program)?;
    let domain = DomainSpec::robot();
    let program = parse_for(&program_text, &domain).map_err(|e| Failure {
        code: EXIT_USAGE,
        kind: "ParseError",
        message: format!("{}: {e}", a.program.display()),
    })?;
    let verdict = verify_monte_carlo(
        &program,
        &domain,
        &VerifyOptions {
            n_worlds: cfg.verify.n_worlds,
            base_seed: cfg.verify.base_seed,
            ..Default::default()
        },
    );
    if !verdict.valid {
        return Ok(Output {
            code: EXIT_NEGATIVE,
            json: json!({"error": "invalid_program", "verdict": verdict.summary()}),
            text: "program does not verify; only verified programs are aligned\n".into(),
        });
    }
    let client = client_for(&cfg, None, a.replay.as_deref())?;
    let (aligned, fallback) =
        align_instruction(client.as_ref(), &cfg, instruction.trim(), &program_text, a.seed).map_err(transport)?;
    Ok(Output {
        code: EXIT_OK,
        json: json!({"aligned_instruction": aligned, "alignment_fallback": fallback}),
        text: format!("{aligned}\n"),
    })
}

fn read_records(path: &Path) -> Result<Vec<angelsim_datagen::PairRecord>, Failure> {
    from_jsonl(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn dedup(cli: &Cli, a: &DedupArgs) -> Result<Output, Failure> {
    let cfg = load_config(cli)?;
    let threshold = a.threshold.unwrap_or(cfg.dedup.threshold);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Failure::usage("threshold must lie in [0, 1]"));
    }
    let records = read_records(&a.input)?;
    let total = records.len();
    let benchmark = match &a.benchmark {
        Some(p) => load_benchmark(p).map_err(|e| Failure::usage(e.to_string()))?,
        None => vec![],
    };
    let deduped = dedup_by(records, threshold, |r| r.aligned_instruction.as_str());
    let after_dedup = deduped.len();
    let kept = decontaminate_by(deduped, &benchmark, threshold, |r| r.aligned_instruction.as_str());
    let jsonl = to_jsonl(&kept);
    let text = match &a.output {
        Some(p) => {
            std::fs::write(p, &jsonl).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
            format!("kept {} of {total} records ({})\n", kept.len(), p.display())
        }
        None => jsonl,
    };
    Ok(Output {
        code: EXIT_OK,
        json: json!({
            "input": total,
            "dedup_dropped": total - after_dedup,
            "decontaminated": after_dedup - kept.len(),
            "kept": kept.len(),
            "threshold": threshold,
        }),
        text,
    })
}

fn stats(cli: &Cli, a: &StatsArgs) -> Result<Output, Failure> {
    let cfg = load_config(cli)?;
    let records = read_records(&a.input)?;
    let s = corpus_stats(
        &records,
        &DomainSpec::robot(),
        &Limits {
            max_steps: cfg.verify.max_steps,
        },
    );
    Ok(Output {
        code: EXIT_OK,
        text: format!(
            "records: {}\nngram4 score: {:.4}\nsynthesized locations: {}\nsynthesized objects: {}\n",
            s.size, s.ngram4_score, s.distinct_synth_locations, s.distinct_synth_objects
        ),
        json: serde_json::to_value(&s).expect("stats serialize"),
    })
}
