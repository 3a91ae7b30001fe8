//! Prompt assembly: the fixed system prompt, the first-iteration user prompt
//! and the feedback prompt built from the previous iteration's records.

use std::fmt::Write as _;

use crate::log::{IterationLog, PromptTranscript};
use crate::types::{CampaignConfig, InstanceRef, StageTag};

const SYSTEM_TEMPLATE: &str = include_str!("../prompts/system.txt");
const PROGRAM_TEMPLATE: &str = include_str!("../prompts/template.py");

/// Demo inputs longer than this are cut in feedback prompts.
pub const MAX_INPUT_BYTES: usize = 6000;

const CASE1_GUIDANCE: &str = "\
The program failed to produce valid solutions for some test cases. Please fix the following issues:
1. Check for compilation errors or runtime exceptions.
2. Ensure the program handles all edge cases and meets the problem constraints correctly.
3. Verify that the input and output format match the expected format.
4. Make sure all required functions are implemented correctly, and no external forbidden libraries are used.
5. If the program is not able to produce valid solutions for any test case, please try to find the root cause and fix it.
6. If the program is able to produce valid solutions for some test cases, please try to improve the solution.
";

const CASE2_GUIDANCE: &str = "\
Please carefully observe the problem structure and improve upon this program by:
1. Addressing any weaknesses in the previous approach.
2. Introducing more advanced or efficient algorithms.
3. Focusing on improving performance for test cases.
Your goal is to improve the solution for as many test cases as possible, with special attention to those where the previous solution performed poorly.
";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("feedback needs at least one record from the previous iteration")]
    NoPriorRecords,
    #[error("record for unknown demo instance `{0}`")]
    UnknownInstance(String),
}

fn format_seconds(s: f64) -> String {
    if s.fract() == 0.0 && s.abs() < 1e15 {
        format!("{}", s as i64)
    } else {
        format!("{s}")
    }
}

pub fn system_prompt(config: &CampaignConfig) -> String {
    SYSTEM_TEMPLATE
        .replace("{NUM_CPU_CORES}", &config.cpu_cores.to_string())
        .replace("{TIMEOUT}", &format_seconds(config.timeout_s))
}

fn initial_user(description: &str) -> String {
    format!(
        "# Problem Information\n{}\n\n# Program Template\n```python\n{}```\n",
        description.trim_end(),
        PROGRAM_TEMPLATE
    )
}

/// First-iteration prompt pair.
pub fn assemble_initial_prompt(description: &str, config: &CampaignConfig) -> PromptTranscript {
    PromptTranscript {
        system: system_prompt(config),
        user: initial_user(description),
    }
}

fn clip(text: &str) -> String {
    if text.len() <= MAX_INPUT_BYTES {
        return text.trim_end().to_string();
    }
    let mut cut = MAX_INPUT_BYTES;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}\n... [{} more bytes not shown]", &text[..cut], text.len() - cut)
}

/// Prompt for the iteration after `prior`. The previous program(s) are
/// repeated so the request is self-contained.
pub fn assemble_feedback_prompt(
    description: &str,
    prior: &IterationLog,
    demos: &[InstanceRef],
    config: &CampaignConfig,
) -> Result<PromptTranscript, PromptError> {
    if prior.samples.iter().all(|s| s.records.is_empty()) {
        return Err(PromptError::NoPriorRecords);
    }
    let multi = prior.samples.len() > 1;
    let mut u = initial_user(description);

    for s in &prior.samples {
        u.push('\n');
        if multi {
            writeln!(u, "# Previous Program (Sample {})", s.sample_index).unwrap();
        } else {
            u.push_str("# Previous Program\n");
        }
        match (&s.program, &s.extraction_error) {
            (Some(p), _) => writeln!(u, "```python\n{}\n```", p.trim_end()).unwrap(),
            (None, err) => writeln!(
                u,
                "No program could be extracted from the response: {}",
                err.as_deref().unwrap_or("empty response")
            )
            .unwrap(),
        }
    }

    writeln!(u, "\n# Feedback from Previous Iteration (Iteration {})", prior.iteration).unwrap();
    u.push_str("These are the test cases and results from the previous iteration:\n");

    // Case order follows the first sample's records; all samples run the same demos.
    let order: Vec<&str> = prior
        .samples
        .iter()
        .find(|s| !s.records.is_empty())
        .map(|s| s.records.iter().map(|r| r.instance_id.as_str()).collect())
        .unwrap_or_default();
    for (k, id) in order.iter().enumerate() {
        let inst = demos
            .iter()
            .find(|d| d.instance_id == *id)
            .ok_or_else(|| PromptError::UnknownInstance(id.to_string()))?;
        writeln!(u, "\n## Test Case {}: {}", k + 1, id).unwrap();
        writeln!(u, "**Input File:**\n{}", clip(&inst.payload_text())).unwrap();
        for s in &prior.samples {
            let Some(r) = s.records.iter().find(|r| r.instance_id == *id) else {
                continue;
            };
            if multi {
                writeln!(u, "**Result (Sample {}):**", s.sample_index).unwrap();
            } else {
                u.push_str("**Result:**\n");
            }
            writeln!(u, "{}", r.outcome.detail.trim_end()).unwrap();
        }
    }

    let all_verified = prior
        .samples
        .iter()
        .flat_map(|s| &s.records)
        .all(|r| r.outcome.tag == StageTag::Verified);
    u.push_str("\n# Improvement Guidance\n");
    u.push_str(if all_verified { CASE2_GUIDANCE } else { CASE1_GUIDANCE });

    Ok(PromptTranscript {
        system: system_prompt(config),
        user: u,
    })
}

/// True if `text` still contains a `{UPPER_CASE}` style placeholder.
pub fn has_placeholder(text: &str) -> bool {
    let b = text.as_bytes();
    b.iter().enumerate().any(|(i, &c)| {
        c == b'{' && {
            let tok: Vec<u8> = b[i + 1..]
                .iter()
                .copied()
                .take_while(|c| c.is_ascii_uppercase() || *c == b'_' || c.is_ascii_digit())
                .collect();
            tok.first().is_some_and(|c| c.is_ascii_uppercase()) && b.get(i + 1 + tok.len()) == Some(&b'}')
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::{RunRecord, SampleLog};
    use crate::types::{ErrorCategory, ProblemId, Split, StageOutcome};

    fn cfg(p: ProblemId) -> CampaignConfig {
        CampaignConfig::new(p, "replay")
    }

    fn demo(id: &str) -> InstanceRef {
        InstanceRef {
            problem: ProblemId::OperatorScheduling,
            instance_id: id.into(),
            split: Split::Demo,
            payload: format!("payload of {id}").into_bytes(),
        }
    }

    fn iteration(outcomes: &[Vec<StageOutcome>]) -> IterationLog {
        IterationLog {
            iteration: 1,
            prompt: PromptTranscript {
                system: String::new(),
                user: String::new(),
            },
            usage: None,
            samples: outcomes
                .iter()
                .enumerate()
                .map(|(k, os)| SampleLog {
                    sample_index: k as u32,
                    program: Some(format!("def solve(a, b):\n    pass  # sample {k}")),
                    extraction_error: None,
                    records: os
                        .iter()
                        .enumerate()
                        .map(|(i, o)| RunRecord {
                            instance_id: format!("d{i}"),
                            outcome: o.clone(),
                            evidence: None,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn system_prompt_substitutes_limits() {
        let c = cfg(ProblemId::OperatorScheduling);
        let p = assemble_initial_prompt("desc", &c);
        assert!(p.system.contains("8 CPU cores"));
        assert!(p.system.contains("10 seconds"));
        assert!(!has_placeholder(&p.system) && !has_placeholder(&p.user));
        let p = assemble_initial_prompt("desc", &cfg(ProblemId::Pdptw));
        assert!(p.system.contains("60 seconds"));
    }

    #[test]
    fn user_prompt_carries_template() {
        let p = assemble_initial_prompt("Schedule things.", &cfg(ProblemId::OperatorScheduling));
        assert!(p.user.starts_with("# Problem Information\nSchedule things.\n\n# Program Template\n"));
        assert!(p.user.contains("def solve(input_file: str, solution_file: str):"));
    }

    #[test]
    fn placeholder_scan() {
        assert!(has_placeholder("x {TIMEOUT} y"));
        assert!(has_placeholder("{NUM_CPU_CORES}"));
        assert!(!has_placeholder("{\"name\": 1}"));
        assert!(!has_placeholder("{Timeout}"));
        assert!(!has_placeholder("{}"));
    }

    #[test]
    fn all_verified_uses_improvement_guidance() {
        let demos: Vec<_> = (0..5).map(|i| demo(&format!("d{i}"))).collect();
        let it = iteration(&[vec![StageOutcome::verified(3.0); 5]]);
        let p = assemble_feedback_prompt("d", &it, &demos, &cfg(ProblemId::OperatorScheduling)).unwrap();
        assert!(p.user.contains("Please carefully observe the problem structure"));
        assert!(!p.user.contains("The program failed to produce valid solutions"));
        assert!(p.user.contains("# Feedback from Previous Iteration (Iteration 1)"));
        assert!(p.user.contains("## Test Case 5: d4\n**Input File:**\npayload of d4\n**Result:**\nVerified. Cost: 3"));
    }

    #[test]
    fn any_failure_uses_fix_guidance() {
        let demos: Vec<_> = (0..5).map(|i| demo(&format!("d{i}"))).collect();
        let mut os = vec![StageOutcome::verified(3.0); 5];
        os[2] = StageOutcome::failure(StageTag::FailII, "no output", ErrorCategory::Logic);
        let p = assemble_feedback_prompt("d", &iteration(&[os]), &demos, &cfg(ProblemId::OperatorScheduling)).unwrap();
        assert!(p.user.contains("The program failed to produce valid solutions"));
    }

    #[test]
    fn samples_are_labelled() {
        let demos = vec![demo("d0")];
        let it = iteration(&[
            vec![StageOutcome::verified(1.0)],
            vec![StageOutcome::failure(StageTag::FailI, "boom", ErrorCategory::Other)],
        ]);
        let p = assemble_feedback_prompt("d", &it, &demos, &cfg(ProblemId::OperatorScheduling)).unwrap();
        assert!(p.user.contains("# Previous Program (Sample 0)"));
        assert!(p.user.contains("# Previous Program (Sample 1)"));
        assert!(p.user.contains("**Result (Sample 0):**\nVerified. Cost: 1"));
        assert!(p.user.contains("**Result (Sample 1):**\nboom"));
    }

    #[test]
    fn empty_records_are_rejected() {
        let it = iteration(&[vec![]]);
        assert_eq!(
            assemble_feedback_prompt("d", &it, &[], &cfg(ProblemId::OperatorScheduling)),
            Err(PromptError::NoPriorRecords)
        );
    }

    #[test]
    fn long_inputs_are_clipped() {
        let big = "x".repeat(MAX_INPUT_BYTES + 10);
        let c = clip(&big);
        assert!(c.ends_with("[10 more bytes not shown]"));
    }
}
