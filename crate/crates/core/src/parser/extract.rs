//! Splitting raw LLM completions into an instruction and a program.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("no `def task_program` found in model output")]
    NoProgram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedProgram {
    /// Text of the `# Instruction:` comment block, joined into one line. Empty when absent.
    pub instruction: String,
    /// Program source starting at `def task_program():`.
    pub source: String,
}

/// Joins comment lines into a single instruction, dropping the `Instruction:` tag.
pub fn join_instruction_lines(block: &str) -> String {
    let joined = block
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    let trimmed = joined.trim();
    trimmed
        .strip_prefix("Instruction:")
        .map(str::trim)
        .unwrap_or(trimmed)
        .to_string()
}

fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(lines) => blocks.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    // an unterminated fence still counts
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
}

fn is_def_line(line: &str) -> bool {
    line.starts_with("def task_program")
}

/// Extracts the instruction comment and the `task_program` source from a completion.
pub fn extract_program_block(llm_output: &str) -> Result<ExtractedProgram, ExtractError> {
    let fenced = fenced_blocks(llm_output);
    let (code, preamble) = match fenced
        .iter()
        .position(|b| b.lines().any(is_def_line))
    {
        Some(i) => {
            // prose before the fence can still carry the instruction comment
            let before = llm_output
                .split("```")
                .next()
                .unwrap_or_default()
                .to_string();
            (fenced[i].clone(), before)
        }
        None => (llm_output.to_string(), String::new()),
    };

    let lines: Vec<&str> = code.lines().collect();
    let def_at = lines
        .iter()
        .position(|l| is_def_line(l))
        .ok_or(ExtractError::NoProgram)?;

    let mut end = def_at + 1;
    while end < lines.len() {
        let l = lines[end];
        if l.trim().is_empty() || l.starts_with([' ', '\t', '#']) {
            end += 1;
        } else {
            break;
        }
    }
    let source = lines[def_at..end].join("\n").trim_end().to_string();

    let instruction = instruction_before(&lines[..def_at])
        .or_else(|| {
            let pre: Vec<&str> = preamble.lines().collect();
            instruction_before(&pre)
        })
        .unwrap_or_default();

    Ok(ExtractedProgram { instruction, source })
}

/// Finds the last `# Instruction:` comment block in `lines` and joins it.
fn instruction_before(lines: &[&str]) -> Option<String> {
    let start = lines
        .iter()
        .rposition(|l| l.trim_start().starts_with('#') && l.contains("Instruction:"))?;
    let block: Vec<&str> = lines[start..]
        .iter()
        .take_while(|l| l.trim_start().starts_with('#'))
        .map(|l| l.trim_start().trim_start_matches('#'))
        .collect();
    let text = join_instruction_lines(&block.join("\n"));
    Some(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_task_three() {
        let text = include_str!("../../fixtures/seeds/task3.txt");
        let got = extract_program_block(text).unwrap();
        assert!(got
            .instruction
            .starts_with("Check if there is a red marker in the main office, and if so,"));
        assert!(got.source.starts_with("def task_program():"));
        assert!(got.source.ends_with("place(\"red marker\")"));
    }

    #[test]
    fn fence_stripping() {
        let got = extract_program_block("```python\ndef task_program():\n    pass\n```").unwrap();
        assert_eq!(got.instruction, "");
        assert_eq!(got.source, "def task_program():\n    pass");
    }

    #[test]
    fn no_program() {
        assert_eq!(extract_program_block("hello world"), Err(ExtractError::NoProgram));
    }

    #[test]
    fn trailing_prose_is_dropped() {
        let text = "# Instruction: Say hi\ndef task_program():\n    say(\"hi\")\n\nGenerate an interesting robot task that can be accomplished using the\n";
        let got = extract_program_block(text).unwrap();
        assert_eq!(got.instruction, "Say hi");
        assert_eq!(got.source, "def task_program():\n    say(\"hi\")");
    }

    #[test]
    fn instruction_outside_fence() {
        let text = "# Instruction: Go to the lab\n```python\ndef task_program():\n    go_to(\"lab\")\n```\n";
        let got = extract_program_block(text).unwrap();
        assert_eq!(got.instruction, "Go to the lab");
        assert_eq!(got.source, "def task_program():\n    go_to(\"lab\")");
    }
}
