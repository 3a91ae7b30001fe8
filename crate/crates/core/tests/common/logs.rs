//! Random campaign logs for metric properties.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cobench_core::log::{IterationLog, PromptTranscript, RunRecord, SampleLog};
use cobench_core::{CampaignConfig, CampaignLog, ErrorCategory, ObjectiveSense, ProblemId, ReferenceCosts, StageOutcome, StageTag};

pub fn outcome(tag: StageTag, cost: f64) -> StageOutcome {
    match tag {
        StageTag::Verified => StageOutcome::verified(cost),
        StageTag::FailIII => StageOutcome::infeasible(vec!["bad".into()]),
        t => StageOutcome::failure(t, "failed", ErrorCategory::Other),
    }
}

/// Log with the given per-iteration, per-sample, per-instance outcomes.
pub fn log_from(problem: ProblemId, table: &[Vec<Vec<StageOutcome>>]) -> CampaignLog {
    let n = table.first().and_then(|it| it.first()).map_or(0, Vec::len);
    let ids: Vec<String> = (0..n).map(|i| format!("i{i}")).collect();
    let mut cfg = CampaignConfig::new(problem, "test");
    cfg.iterations = table.len() as u32;
    cfg.samples_per_iteration = table.first().map_or(1, |t| t.len() as u32);
    let mut log = CampaignLog::new(cfg, ids.clone(), Vec::new());
    for (t, samples) in table.iter().enumerate() {
        log.iterations.push(IterationLog {
            iteration: t as u32 + 1,
            prompt: PromptTranscript {
                system: String::new(),
                user: String::new(),
            },
            usage: None,
            samples: samples
                .iter()
                .enumerate()
                .map(|(k, recs)| SampleLog {
                    sample_index: k as u32,
                    program: Some("def solve(a, b): pass\n".into()),
                    extraction_error: None,
                    records: recs
                        .iter()
                        .zip(&ids)
                        .map(|(o, id)| RunRecord {
                            instance_id: id.clone(),
                            outcome: o.clone(),
                            evidence: None,
                        })
                        .collect(),
                })
                .collect(),
        });
    }
    log
}

pub fn refs_for(problem: ProblemId, costs: &[f64]) -> ReferenceCosts {
    ReferenceCosts {
        problem,
        sense: problem.sense(),
        costs: costs.iter().enumerate().map(|(i, &c)| (format!("i{i}"), c)).collect::<BTreeMap<_, _>>(),
    }
}

/// A random log (1..=10 iterations, 1..=3 samples, 1..=6 instances) with
/// matching references. Costs include zeros to reach the edge cases.
pub fn random_log(seed: u64) -> (CampaignLog, ReferenceCosts) {
    let r = &mut ChaCha8Rng::seed_from_u64(seed);
    let problem = if r.gen_bool(0.5) {
        ProblemId::OperatorScheduling
    } else {
        ProblemId::ProteinDesign
    };
    assert!(problem != ProblemId::ProteinDesign || problem.sense() == ObjectiveSense::Maximize);
    let (iters, samples, n) = (r.gen_range(1..=10), r.gen_range(1..=3), r.gen_range(1..=6));
    let tags = [StageTag::FailI, StageTag::FailII, StageTag::FailIII, StageTag::Verified];
    let cost = |r: &mut ChaCha8Rng| if r.gen_bool(0.1) { 0.0 } else { r.gen_range(1..=40) as f64 * 0.5 };
    let table: Vec<Vec<Vec<StageOutcome>>> = (0..iters)
        .map(|_| (0..samples).map(|_| (0..n).map(|_| outcome(tags[r.gen_range(0..4)], cost(r))).collect()).collect())
        .collect();
    let refs: Vec<f64> = (0..n).map(|_| cost(r)).collect();
    (log_from(problem, &table), refs_for(problem, &refs))
}
