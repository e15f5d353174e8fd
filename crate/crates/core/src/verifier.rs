//! Program validity: Monte Carlo over seeded worlds, or exhaustive choice-tree search.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::choice::{ChoiceSource, ScriptedChoices, SeededChoices};
use crate::domain::DomainSpec;
use crate::error::ErrorClass;
use crate::interp::{run_program, ApiRecord, Limits, RunOutcome};
use crate::parser::{Span, TaskProgram};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerifyMode {
    MonteCarlo,
    Exhaustive,
    ExhaustiveAbstained,
}

/// How to rebuild the world a run happened in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Seed(u64),
    Choices(Vec<usize>),
}

impl Origin {
    pub fn choice_source(&self) -> Box<dyn ChoiceSource> {
        match self {
            Origin::Seed(s) => Box::new(SeededChoices::new(*s)),
            Origin::Choices(c) => Box::new(ScriptedChoices::new(c.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub world_index: usize,
    pub origin: Origin,
    pub outcome: RunOutcome,
}

impl FailureReport {
    pub fn error_class(&self) -> ErrorClass {
        classify_failure(&self.outcome).map_or(ErrorClass::RuntimeError, |c| c.error_class)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub valid: bool,
    pub mode: VerifyMode,
    /// Worlds (Monte Carlo) or choice paths (exhaustive) executed.
    pub worlds_run: usize,
    pub first_failure: Option<FailureReport>,
    /// Why the exhaustive search gave up, when it did.
    pub abstain_reason: Option<String>,
    /// Most draws made on any explored path (exhaustive mode only).
    pub deepest_path: usize,
}

impl Verdict {
    pub fn abstained(&self) -> bool {
        self.mode == VerifyMode::ExhaustiveAbstained
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n_worlds: usize,
    pub base_seed: u64,
    pub limits: Limits,
    /// Worker threads; 0 uses the shared pool, 1 runs inline.
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_worlds: 100,
            base_seed: 0,
            limits: Limits::default(),
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveCaps {
    pub max_choices_per_path: usize,
    pub max_paths: usize,
    pub limits: Limits,
}

impl Default for ExhaustiveCaps {
    fn default() -> Self {
        ExhaustiveCaps {
            max_choices_per_path: 24,
            max_paths: 65_536,
            limits: Limits::default(),
        }
    }
}

/// Runs `program` once in a fresh world built from `origin`.
pub fn replay(program: &TaskProgram, domain: &DomainSpec, origin: &Origin, limits: &Limits) -> RunOutcome {
    let mut world = World::new(origin.choice_source(), domain.config.clone());
    run_program(program, domain, &mut world, limits)
}

/// Valid iff the program completes in every one of `n_worlds` worlds seeded
/// `base_seed + i`. Stops at the first failure, reporting the lowest failing
/// index regardless of how runs were scheduled.
pub fn verify_monte_carlo(program: &TaskProgram, domain: &DomainSpec, opts: &VerifyOptions) -> Verdict {
    let seed_of = |i: usize| opts.base_seed.wrapping_add(i as u64);
    let run = |i: usize| replay(program, domain, &Origin::Seed(seed_of(i)), &opts.limits);

    let first = if opts.threads == 1 {
        (0..opts.n_worlds).find_map(|i| {
            let out = run(i);
            (!out.completed()).then_some((i, out))
        })
    } else {
        let lowest = AtomicUsize::new(usize::MAX);
        let found: Mutex<Option<(usize, RunOutcome)>> = Mutex::new(None);
        let work = || {
            (0..opts.n_worlds).into_par_iter().for_each(|i| {
                if i > lowest.load(Ordering::Relaxed) {
                    return;
                }
                let out = run(i);
                if !out.completed() {
                    lowest.fetch_min(i, Ordering::Relaxed);
                    let mut slot = found.lock().expect("no panics while holding the lock");
                    if slot.as_ref().is_none_or(|(j, _)| i < *j) {
                        *slot = Some((i, out));
                    }
                }
            })
        };
        if opts.threads == 0 {
            work();
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.threads)
                .build()
                .expect("thread pool")
                .install(work);
        }
        found.into_inner().expect("no panics while holding the lock")
    };

    match first {
        None => Verdict {
            valid: true,
            mode: VerifyMode::MonteCarlo,
            worlds_run: opts.n_worlds,
            first_failure: None,
            abstain_reason: None,
            deepest_path: 0,
        },
        Some((i, outcome)) => Verdict {
            valid: false,
            mode: VerifyMode::MonteCarlo,
            worlds_run: i + 1,
            first_failure: Some(FailureReport {
                world_index: i,
                origin: Origin::Seed(seed_of(i)),
                outcome,
            }),
            abstain_reason: None,
            deepest_path: 0,
        },
    }
}

/// Depth-first search over every sequence of choices the program can
/// observe. Returns an `ExhaustiveAbstained` verdict when a path needs more
/// than `max_choices_per_path` draws or the tree has more than `max_paths` leaves.
pub fn verify_exhaustive(program: &TaskProgram, domain: &DomainSpec, caps: &ExhaustiveCaps) -> Verdict {
    let abstain = |paths: usize, deepest: usize, reason: String| Verdict {
        valid: false,
        mode: VerifyMode::ExhaustiveAbstained,
        worlds_run: paths,
        first_failure: None,
        abstain_reason: Some(reason),
        deepest_path: deepest,
    };
    let mut prefix: Vec<usize> = Vec::new();
    let mut paths = 0;
    let mut deepest = 0;
    loop {
        if paths == caps.max_paths {
            return abstain(paths, deepest, format!("more than {} choice paths", caps.max_paths));
        }
        let origin = Origin::Choices(prefix.clone());
        let outcome = replay(program, domain, &origin, &caps.limits);
        paths += 1;
        let log = &outcome.choices;
        deepest = deepest.max(log.len());
        if log.len() > caps.max_choices_per_path {
            return abstain(
                paths,
                deepest,
                format!("a path needs more than {} choices", caps.max_choices_per_path),
            );
        }
        if !outcome.completed() {
            let path = log.iter().map(|c| c.value).collect();
            return Verdict {
                valid: false,
                mode: VerifyMode::Exhaustive,
                worlds_run: paths,
                first_failure: Some(FailureReport {
                    world_index: paths - 1,
                    origin: Origin::Choices(path),
                    outcome,
                }),
                abstain_reason: None,
                deepest_path: deepest,
            };
        }
        // advance to the next unexplored sibling, deepest first
        let Some(j) = log.iter().rposition(|c| c.value + 1 < c.arity) else {
            return Verdict {
                valid: true,
                mode: VerifyMode::Exhaustive,
                worlds_run: paths,
                first_failure: None,
                abstain_reason: None,
                deepest_path: deepest,
            };
        };
        prefix = log[..j].iter().map(|c| c.value).collect();
        prefix.push(log[j].value + 1);
    }
}

/// What went wrong in a run, for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureClass {
    pub error_class: ErrorClass,
    pub message: String,
    pub span: Span,
}

pub fn classify_failure(outcome: &RunOutcome) -> Option<FailureClass> {
    outcome.failure().map(|(error_class, message, span)| FailureClass {
        error_class,
        message,
        span,
    })
}

/// Flat JSON shape of a verdict for command-line output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictSummary {
    pub valid: bool,
    pub mode: VerifyMode,
    pub worlds_run: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abstain_reason: Option<String>,
    pub first_failure: Option<FailureSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureSummary {
    pub world_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<usize>>,
    pub error_class: ErrorClass,
    pub message: String,
    pub line: u32,
    pub api_trace: Vec<ApiRecord>,
}

impl Verdict {
    pub fn summary(&self) -> VerdictSummary {
        VerdictSummary {
            valid: self.valid,
            mode: self.mode,
            worlds_run: self.worlds_run,
            abstain_reason: self.abstain_reason.clone(),
            first_failure: self.first_failure.as_ref().map(|f| {
                let c = classify_failure(&f.outcome).expect("failure reports hold failed runs");
                let (seed, choices) = match &f.origin {
                    Origin::Seed(s) => (Some(*s), None),
                    Origin::Choices(c) => (None, Some(c.clone())),
                };
                FailureSummary {
                    world_index: f.world_index,
                    seed,
                    choices,
                    error_class: c.error_class,
                    message: c.message,
                    line: c.span.line,
                    api_trace: f.outcome.api_trace.clone(),
                }
            }),
        }
    }
}
