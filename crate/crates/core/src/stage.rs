//! Mapping execution evidence and checker results to a pipeline stage.

use crate::executor::{ExecutionEvidence, ExitState, LOAD_FAILURE_EXIT};
use crate::problems::{AssessError, Assessment, ProblemAdapter};
use crate::types::{ErrorCategory, StageOutcome, StageTag};

/// What the problem checker made of the output file.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// The output was never handed to the checker.
    NotRun,
    FormatError(String),
    Infeasible(Vec<String>),
    Feasible(f64),
}

const API_ERRORS: [&str; 4] = ["ModuleNotFoundError", "ImportError", "AttributeError", "NameError"];

/// Name of the exception on the last traceback line, if any.
fn last_exception(stderr: &str) -> Option<&str> {
    stderr.lines().rev().map(str::trim).find(|l| !l.is_empty()).map(|l| l.split(':').next().unwrap_or(l).trim())
}

pub fn error_category(stderr: &str) -> ErrorCategory {
    match last_exception(stderr) {
        Some(e) if API_ERRORS.iter().any(|a| e.ends_with(a)) => ErrorCategory::HallucinatedApi,
        Some(e) if e.ends_with("Error") || e.ends_with("Exception") => ErrorCategory::Logic,
        _ => ErrorCategory::Other,
    }
}

fn with_stderr(head: String, stderr: &str) -> String {
    let s = stderr.trim_end();
    if s.is_empty() {
        head
    } else {
        format!("{head}\n{s}")
    }
}

/// Ordered rules: launch/load problems and crashes without output are
/// Stage I; timeouts, missing or malformed output and late crashes are
/// Stage II; violations are Stage III; the rest is verified.
pub fn classify_stage(e: &ExecutionEvidence, check: &Check) -> StageOutcome {
    match &e.exit {
        ExitState::LaunchFailure { message } => {
            return StageOutcome::failure(StageTag::FailI, format!("The program could not be started: {message}"), ErrorCategory::Other)
        }
        ExitState::Exited { code } if *code == LOAD_FAILURE_EXIT => {
            return StageOutcome::failure(
                StageTag::FailI,
                with_stderr("The program failed to load:".into(), &e.stderr),
                error_category(&e.stderr),
            )
        }
        ExitState::TimedOut => {
            return StageOutcome::failure(
                StageTag::FailII,
                "Timeout: the program did not finish within the time limit.".to_string(),
                ErrorCategory::Timeout,
            )
        }
        _ => {}
    }
    let ended = match e.exit {
        ExitState::Exited { code } => format!("exit code {code}"),
        ExitState::Signaled { signal } => format!("signal {signal}"),
        _ => unreachable!(),
    };
    if e.crashed() {
        let tag = if e.output_created_before_crash { StageTag::FailII } else { StageTag::FailI };
        return StageOutcome::failure(
            tag,
            with_stderr(format!("Runtime error ({ended}):"), &e.stderr),
            error_category(&e.stderr),
        );
    }
    if e.oversized {
        return StageOutcome::failure(StageTag::FailII, "The output file exceeds the size limit.", ErrorCategory::Other);
    }
    match e.output.as_deref() {
        None => return StageOutcome::failure(StageTag::FailII, "No output file was produced.", ErrorCategory::Logic),
        Some(b) if b.iter().all(u8::is_ascii_whitespace) => {
            return StageOutcome::failure(StageTag::FailII, "The output file is empty.", ErrorCategory::Logic)
        }
        Some(_) => {}
    }
    match check {
        Check::NotRun => StageOutcome::failure(StageTag::FailII, "The output was not checked.", ErrorCategory::Other),
        Check::FormatError(msg) => {
            StageOutcome::failure(StageTag::FailII, format!("Output format error: {msg}"), ErrorCategory::Logic)
        }
        Check::Infeasible(v) if !v.is_empty() => StageOutcome::infeasible(v.clone()),
        Check::Infeasible(_) => StageOutcome::failure(StageTag::FailIII, "Infeasible solution.", ErrorCategory::Constraint),
        Check::Feasible(c) => StageOutcome::verified(*c),
    }
}

/// Run the problem checker on the evidence's output and classify.
pub fn judge(adapter: &dyn ProblemAdapter, instance: &str, e: &ExecutionEvidence) -> StageOutcome {
    let check = match e.output.as_deref() {
        Some(bytes) if !e.crashed() && !e.oversized => match std::str::from_utf8(bytes) {
            Err(_) => Check::FormatError("output is not valid UTF-8".into()),
            Ok(text) => match adapter.assess(instance, text) {
                Ok(Assessment::Feasible { cost }) => Check::Feasible(cost),
                Ok(Assessment::Infeasible { violations }) => {
                    Check::Infeasible(violations.iter().map(|v| v.to_string()).collect())
                }
                Err(AssessError::Solution(p)) => Check::FormatError(p.message),
                // Bundled instances always parse; treat anything else as unchecked.
                Err(_) => Check::NotRun,
            },
        },
        _ => Check::NotRun,
    };
    classify_stage(e, &check)
}
