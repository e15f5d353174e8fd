//! Prompt assembly for candidate generation and instruction alignment.

const GENERATION_HEADER: &str = include_str!("../prompts/generation_header.txt");
const GENERATION_REQUEST: &str = include_str!("../prompts/generation_request.txt");
const ALIGNMENT: &str = include_str!("../prompts/alignment.txt");

/// Line the alignment prompt asks the model to finish with.
pub const ALIGNED_MARKER: &str = "Corrected Instruction:";

/// Few-shot generation prompt: capabilities, then each seed example preceded
/// by the generation request, then the request once more.
pub fn generation_prompt(seed_examples: &[&str]) -> String {
    let mut out = String::from(GENERATION_HEADER);
    for example in seed_examples {
        out.push_str(GENERATION_REQUEST);
        out.push_str(example.trim_end());
        out.push_str("\n\n");
    }
    out.push_str(GENERATION_REQUEST);
    out
}

/// Generation prompt with the instruction fixed, so only a new program is sampled.
pub fn resample_prompt(seed_examples: &[&str], instruction: &str) -> String {
    let mut out = generation_prompt(seed_examples);
    out.push_str(&instruction_comment(instruction));
    out
}

/// Renders an instruction as the `# Instruction:` comment block seed examples use.
pub fn instruction_comment(instruction: &str) -> String {
    format!("# Instruction: {}\n", instruction.trim())
}

pub fn alignment_prompt(instruction: &str, program: &str) -> String {
    let mut out = String::from(ALIGNMENT);
    out.push_str("End your answer with a single line of the form `");
    out.push_str(ALIGNED_MARKER);
    out.push_str(" <instruction>`.\n\n");
    out.push_str("Original Instruction\n");
    out.push_str("    ");
    out.push_str(instruction.trim());
    out.push_str("\nRobot Program\n");
    out.push_str(program.trim_end());
    out.push('\n');
    out
}

/// Pulls the rewritten instruction from an alignment completion: the text
/// after the last `instruction:` marker (any case), or the next non-empty
/// line when the marker ends its line.
pub fn extract_aligned_instruction(completion: &str) -> Option<String> {
    let lower = completion.to_lowercase();
    let at = lower.rfind("instruction:")?;
    let rest = &completion[at + "instruction:".len()..];
    let mut lines = rest.lines();
    let first = lines.next().unwrap_or_default();
    let text = if clean(first).is_empty() {
        lines.map(clean).find(|l| !l.is_empty()).unwrap_or_default()
    } else {
        clean(first)
    };
    (!text.is_empty()).then_some(text)
}

fn clean(line: &str) -> String {
    line.trim()
        .trim_matches(|c: char| c == '*' || c == '`' || c == '"' || c == '#')
        .trim()
        .to_string()
}
