//! The refinement loop: prompt, sample, execute on every demo instance,
//! classify, feed back; then run the best program once on the eval split.

use crate::error::ConfigError;
use crate::executor::{execute_candidate, ExecutorError, ResourceLimits, Runner};
use crate::extract::extract_program;
use crate::llm::{ChatTurn, EndpointError, ModelClient};
use crate::log::{CampaignLog, EvalLog, IterationLog, RunRecord, SampleLog};
use crate::metrics::{select_program, MetricsError};
use crate::problems::adapter;
use crate::prompt::{assemble_feedback_prompt, assemble_initial_prompt, PromptError};
use crate::refs::ReferenceCosts;
use crate::stage::judge;
use crate::suite::Suite;
use crate::types::{CampaignConfig, CandidateProgram, ErrorCategory, InstanceRef, StageOutcome, StageTag};

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model endpoint failed: {source}")]
    Endpoint {
        #[source]
        source: EndpointError,
        /// Everything logged before the failure, with `aborted` set.
        partial: Box<CampaignLog>,
    },
    #[error(transparent)]
    Executor(#[from] ExecutorError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Execute `program` on each instance, in order.
pub fn run_program(
    program: &CandidateProgram,
    instances: &[InstanceRef],
    limits: &ResourceLimits,
    runner: &Runner,
) -> Result<Vec<RunRecord>, ExecutorError> {
    instances
        .iter()
        .map(|inst| {
            let ev = execute_candidate(program, inst, limits, runner)?;
            let outcome = judge(adapter(inst.problem), &inst.payload_text(), &ev);
            log::debug!(
                "iteration {} sample {} on {}: {} ({:.2}s)",
                program.iteration,
                program.sample_index,
                inst.instance_id,
                outcome.tag,
                ev.wall_time_s
            );
            Ok(RunRecord {
                instance_id: inst.instance_id.clone(),
                outcome,
                evidence: Some(ev.digest()),
            })
        })
        .collect()
}

pub fn run_campaign(
    config: &CampaignConfig,
    client: &dyn ModelClient,
    suite: &Suite,
    refs: &ReferenceCosts,
    runner: &Runner,
) -> Result<CampaignLog, CampaignError> {
    config.validate()?;
    if suite.problem != config.problem || refs.problem != config.problem {
        return Err(ConfigError::Invalid(format!(
            "campaign for {} given suite for {} and references for {}",
            config.problem, suite.problem, refs.problem
        ))
        .into());
    }
    let demos = suite.select_demos(config.num_demos)?;
    for inst in demos.iter().chain(&suite.eval) {
        refs.get(&inst.instance_id)?;
    }
    let limits = ResourceLimits::new(config.cpu_cores, config.timeout_s);
    let mut log = CampaignLog::new(
        config.clone(),
        demos.iter().map(|d| d.instance_id.clone()).collect(),
        suite.eval.iter().map(|d| d.instance_id.clone()).collect(),
    );

    for t in 1..=config.iterations {
        let prompt = match log.iterations.last() {
            None => assemble_initial_prompt(&suite.description, config),
            Some(prev) => assemble_feedback_prompt(&suite.description, prev, &demos, config)?,
        };
        let turns = [ChatTurn::system(&prompt.system), ChatTurn::user(&prompt.user)];
        let completion = match client.complete(&turns, config.temperature, config.samples_per_iteration) {
            Ok(c) => c,
            Err(source) => {
                log.aborted = Some(format!("iteration {t}: {source}"));
                return Err(CampaignError::Endpoint {
                    source,
                    partial: Box::new(log),
                });
            }
        };
        let mut samples = Vec::with_capacity(completion.texts.len());
        for (k, text) in completion.texts.iter().enumerate() {
            let k = k as u32;
            samples.push(match extract_program(text, t, k) {
                Ok(program) => SampleLog {
                    sample_index: k,
                    records: run_program(&program, &demos, &limits, runner)?,
                    program: Some(program.source),
                    extraction_error: None,
                },
                Err(e) => SampleLog {
                    sample_index: k,
                    program: None,
                    records: demos
                        .iter()
                        .map(|d| RunRecord {
                            instance_id: d.instance_id.clone(),
                            outcome: StageOutcome::failure(
                                StageTag::FailI,
                                format!("No program could be extracted from the response: {e}"),
                                ErrorCategory::Other,
                            ),
                            evidence: None,
                        })
                        .collect(),
                    extraction_error: Some(e.to_string()),
                },
            });
        }
        let verified = samples
            .iter()
            .map(|s| s.records.iter().filter(|r| r.outcome.is_verified()).count())
            .max()
            .unwrap_or(0);
        log::info!("{}: iteration {t} verified {verified}/{}", config.problem, demos.len());
        log.iterations.push(IterationLog {
            iteration: t,
            prompt,
            usage: completion.usage,
            samples,
        });
    }

    if let Some((t, k)) = select_program(&log, refs)? {
        let source = log.sample(t, k).and_then(|s| s.program.clone()).expect("selected sample has a program");
        let program = CandidateProgram {
            source,
            iteration: t,
            sample_index: k,
        };
        let records = run_program(&program, &suite.eval, &limits, runner)?;
        log.eval = Some(EvalLog {
            selected_iteration: t,
            selected_sample: k,
            records,
        });
    }
    Ok(log)
}
