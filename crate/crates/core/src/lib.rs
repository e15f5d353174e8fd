//! Verification of robot task programs by angelic execution in worlds that
//! are synthesized while the program runs.

pub mod choice;
pub mod corpus;
pub mod domain;
pub mod error;
pub mod interp;
pub mod parser;
pub mod trace;
pub mod value;
pub mod verifier;
pub mod world;

pub use choice::{ChoiceRecord, ChoiceSource, ScriptedChoices, SeededChoices};
pub use domain::{DomainConfig, DomainSpec};
pub use error::{DomainError, ErrorClass};
pub use interp::{run_program, Limits, RunOutcome, RunStatus};
pub use parser::{parse_program, ParseError, TaskProgram};
pub use verifier::{
    classify_failure, replay, verify_exhaustive, verify_monte_carlo, ExhaustiveCaps, Origin, Verdict, VerifyMode,
    VerifyOptions,
};
pub use world::World;

/// Parses `source` against `domain`'s API names.
pub fn parse_for(source: &str, domain: &DomainSpec) -> Result<TaskProgram, ParseError> {
    parse_program(source, &domain.api_names())
}
