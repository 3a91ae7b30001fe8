//! Turning a model response into a candidate program.

use crate::types::CandidateProgram;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("the response is empty")]
    Empty,
    #[error("no `solve` function found in the response")]
    NoEntryPoint,
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Fenced code blocks in order of appearance. An unterminated block runs to the end.
fn fenced_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        match (&mut current, is_fence(line)) {
            (None, true) => current = Some(Vec::new()),
            (None, false) => {}
            (Some(_), true) => blocks.push(current.take().unwrap().join("\n")),
            (Some(lines), false) => lines.push(line),
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
}

fn defines_solve(src: &str) -> bool {
    src.lines().any(|l| {
        let l = l.trim_start();
        let rest = l.strip_prefix("async def ").or_else(|| l.strip_prefix("def "));
        rest.is_some_and(|r| r.trim_start().strip_prefix("solve").is_some_and(|r| r.trim_start().starts_with('(')))
    })
}

/// The longest fenced block (by lines, first wins ties), or the whole
/// response when it has no fences.
pub fn extract_program(response: &str, iteration: u32, sample_index: u32) -> Result<CandidateProgram, ExtractError> {
    if response.trim().is_empty() {
        return Err(ExtractError::Empty);
    }
    let blocks = fenced_blocks(response);
    let mut source = match blocks.iter().enumerate().max_by_key(|(i, b)| (b.lines().count(), std::cmp::Reverse(*i))) {
        Some((_, b)) => b.clone(),
        None => response.to_string(),
    };
    if !defines_solve(&source) {
        return Err(ExtractError::NoEntryPoint);
    }
    if !source.ends_with('\n') {
        source.push('\n');
    }
    Ok(CandidateProgram {
        source,
        iteration,
        sample_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(n: usize) -> String {
        let mut s = String::from("def solve(input_file, solution_file):\n");
        for i in 1..n {
            s.push_str(&format!("    x{i} = {i}\n"));
        }
        s
    }

    #[test]
    fn single_block_verbatim() {
        let body = "import sys\n\ndef solve(a, b):\n    open(b, 'w').write(open(a).read())\n";
        let r = format!("Here you go:\n```python\n{body}```\nDone.");
        assert_eq!(extract_program(&r, 1, 0).unwrap().source, body);
    }

    #[test]
    fn longest_block_wins() {
        let r = format!("```python\n{}```\ntext\n```python\n{}```\n", block(80), block(300));
        let p = extract_program(&r, 2, 1).unwrap();
        assert_eq!(p.source.lines().count(), 300);
        assert_eq!((p.iteration, p.sample_index), (2, 1));
    }

    #[test]
    fn unfenced_response_is_taken_whole() {
        let r = "def solve(i, o):\n    pass";
        assert_eq!(extract_program(r, 1, 0).unwrap().source, "def solve(i, o):\n    pass\n");
    }

    #[test]
    fn prose_without_solve_is_rejected() {
        assert_eq!(extract_program("I cannot help with that.", 1, 0), Err(ExtractError::NoEntryPoint));
        assert_eq!(extract_program("   \n", 1, 0), Err(ExtractError::Empty));
        assert_eq!(extract_program("def solver(a, b): pass", 1, 0), Err(ExtractError::NoEntryPoint));
    }

    #[test]
    fn unterminated_fence() {
        let r = "```python\ndef solve(a, b):\n    pass\n";
        assert!(extract_program(r, 1, 0).unwrap().source.starts_with("def solve"));
    }
}
