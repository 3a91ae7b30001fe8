//! Stage pass rates, quality, yield and QYI computed from campaign logs.
//!
//! Per-iteration scores are computed over the demo instances of a log. With
//! several samples per iteration each sample is scored on its own and the
//! iteration takes its best sample's QYI; pass rates count an instance as
//! soon as any sample passes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::ConfigError;
use crate::log::{CampaignLog, RunRecord, SampleLog};
use crate::refs::ReferenceCosts;
use crate::types::{ObjectiveSense, ProblemId, Stage};

/// Uncapped ratios for a zero-cost candidate against a positive reference
/// are clamped to this value.
pub const UNCAPPED_ZERO_COST_RATIO: f64 = 10.0;

/// Iteration counts reported in the solve table.
pub const SOLVE_POINTS: [u32; 3] = [1, 5, 10];

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("iteration index must be at least 1")]
    ZeroIteration,
    #[error("the log has no iterations")]
    NoIterations,
    #[error("weighted QYI needs at least one problem")]
    Empty,
    #[error("instance counts must be positive")]
    ZeroCount,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Reference-to-candidate cost ratio, oriented so that 1 means "as good as
/// the reference" and larger is better.
pub fn ratio(c_star: f64, c: f64, sense: ObjectiveSense, capped: bool) -> f64 {
    let (num, den) = match sense {
        ObjectiveSense::Minimize => (c_star, c),
        ObjectiveSense::Maximize => (c, c_star),
    };
    let r = if den == 0.0 {
        if num == 0.0 || capped {
            1.0
        } else {
            UNCAPPED_ZERO_COST_RATIO
        }
    } else if num == 0.0 {
        0.0
    } else {
        num / den
    };
    let r = if capped { r.min(1.0) } else { r };
    r.max(0.0)
}

pub fn qyi(quality: f64, yield_: f64) -> f64 {
    if quality + yield_ == 0.0 {
        0.0
    } else {
        2.0 * quality * yield_ / (quality + yield_)
    }
}

/// Fraction of demo instances that passed `stage` in some iteration `<= i`.
pub fn solve_at(log: &CampaignLog, stage: Stage, i: u32) -> Result<f64, MetricsError> {
    if i == 0 {
        return Err(MetricsError::ZeroIteration);
    }
    let n = log.demo_instances.len();
    if n == 0 {
        return Ok(0.0);
    }
    let passed: BTreeSet<&str> = log
        .iterations
        .iter()
        .filter(|it| it.iteration <= i)
        .flat_map(|it| &it.samples)
        .flat_map(|s| &s.records)
        .filter(|r| r.outcome.tag.passes(stage))
        .map(|r| r.instance_id.as_str())
        .collect();
    let hits = log.demo_instances.iter().filter(|id| passed.contains(id.as_str())).count();
    Ok(hits as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub quality: f64,
    #[serde(rename = "yield")]
    pub yield_: f64,
    pub qyi: f64,
}

impl Score {
    pub const ZERO: Score = Score {
        quality: 0.0,
        yield_: 0.0,
        qyi: 0.0,
    };
}

/// Score one program's records over `n` instances.
pub fn score_records(records: &[RunRecord], n: usize, refs: &ReferenceCosts, capped: bool) -> Result<Score, MetricsError> {
    let mut seen = BTreeSet::new();
    let mut sum = 0.0;
    for r in records {
        let (true, Some(c)) = (r.outcome.is_verified(), r.outcome.cost) else {
            continue;
        };
        if !seen.insert(r.instance_id.as_str()) {
            continue;
        }
        sum += ratio(refs.get(&r.instance_id)?, c, refs.sense, capped);
    }
    let verified = seen.len();
    if verified == 0 || n == 0 {
        return Ok(Score::ZERO);
    }
    let quality = sum / verified as f64;
    let yield_ = verified as f64 / n as f64;
    Ok(Score {
        quality,
        yield_,
        qyi: qyi(quality, yield_),
    })
}

fn cost_sum(s: &SampleLog) -> f64 {
    s.records.iter().filter_map(|r| r.outcome.cost).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationScore {
    pub iteration: u32,
    /// The sample whose score the iteration takes.
    pub sample: u32,
    #[serde(flatten)]
    pub score: Score,
}

/// Score of iteration `t`: its best sample by capped QYI, lowest sample
/// index on ties. The same sample is reported in uncapped mode, so capping
/// never changes which program an iteration stands for. Iterations absent
/// from the log score zero.
pub fn iteration_score(log: &CampaignLog, t: u32, refs: &ReferenceCosts, capped: bool) -> Result<IterationScore, MetricsError> {
    if t == 0 {
        return Err(MetricsError::ZeroIteration);
    }
    let n = log.demo_instances.len();
    let mut best = IterationScore {
        iteration: t,
        sample: 0,
        score: Score::ZERO,
    };
    let Some(it) = log.iteration(t) else {
        return Ok(best);
    };
    let mut chosen: Option<(&SampleLog, f64)> = None;
    for s in &it.samples {
        let q = score_records(&s.records, n, refs, true)?.qyi;
        if chosen.is_none_or(|(_, b)| q > b) {
            chosen = Some((s, q));
        }
    }
    if let Some((s, _)) = chosen {
        best.sample = s.sample_index;
        best.score = score_records(&s.records, n, refs, capped)?;
    }
    Ok(best)
}

pub fn iteration_quality(log: &CampaignLog, t: u32, refs: &ReferenceCosts, capped: bool) -> Result<f64, MetricsError> {
    Ok(iteration_score(log, t, refs, capped)?.score.quality)
}

pub fn iteration_yield(log: &CampaignLog, t: u32, refs: &ReferenceCosts) -> Result<f64, MetricsError> {
    Ok(iteration_score(log, t, refs, true)?.score.yield_)
}

/// Highest per-iteration QYI and the iteration reaching it (latest on ties).
pub fn best_qyi(log: &CampaignLog, refs: &ReferenceCosts, capped: bool) -> Result<(f64, u32), MetricsError> {
    let mut best: Option<(f64, u32)> = None;
    for it in &log.iterations {
        let q = iteration_score(log, it.iteration, refs, capped)?.score.qyi;
        if best.is_none_or(|(b, _)| q >= b) {
            best = Some((q, it.iteration));
        }
    }
    best.ok_or(MetricsError::NoIterations)
}

/// The program to run on the eval split: highest demo QYI, then the better
/// demo cost sum, then the latest (iteration, sample).
pub fn select_program(log: &CampaignLog, refs: &ReferenceCosts) -> Result<Option<(u32, u32)>, MetricsError> {
    let n = log.demo_instances.len();
    let mut best: Option<(f64, f64, u32, u32)> = None;
    for it in &log.iterations {
        for s in it.samples.iter().filter(|s| s.program.is_some()) {
            let q = score_records(&s.records, n, refs, true)?.qyi;
            // Oriented so that larger is better.
            let c = match refs.sense {
                ObjectiveSense::Minimize => -cost_sum(s),
                ObjectiveSense::Maximize => cost_sum(s),
            };
            let cand = (q, c, it.iteration, s.sample_index);
            let better = match best {
                None => true,
                Some(b) => (cand.0, cand.1, cand.2, cand.3) >= (b.0, b.1, b.2, b.3),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(best.map(|(_, _, t, k)| (t, k)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveCell {
    pub stage: Stage,
    pub i: u32,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalScore {
    pub iteration: u32,
    pub sample: u32,
    pub instances: usize,
    #[serde(flatten)]
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub problem: ProblemId,
    pub capped: bool,
    /// Number of demo instances (N).
    pub instances: usize,
    pub solve: Vec<SolveCell>,
    pub iterations: Vec<IterationScore>,
    pub best_qyi: f64,
    pub best_iteration: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalScore>,
}

pub fn compute_report(log: &CampaignLog, refs: &ReferenceCosts, capped: bool) -> Result<MetricsReport, MetricsError> {
    let mut solve = Vec::new();
    for stage in Stage::ALL {
        for i in SOLVE_POINTS {
            solve.push(SolveCell {
                stage,
                i,
                value: solve_at(log, stage, i)?,
            });
        }
    }
    let iterations = log
        .iterations
        .iter()
        .map(|it| iteration_score(log, it.iteration, refs, capped))
        .collect::<Result<Vec<_>, _>>()?;
    let (best, best_iteration) = best_qyi(log, refs, capped)?;
    let eval = match &log.eval {
        Some(e) => Some(EvalScore {
            iteration: e.selected_iteration,
            sample: e.selected_sample,
            instances: log.eval_instances.len(),
            score: score_records(&e.records, log.eval_instances.len(), refs, capped)?,
        }),
        None => None,
    };
    Ok(MetricsReport {
        problem: log.config.problem,
        capped,
        instances: log.demo_instances.len(),
        solve,
        iterations,
        best_qyi: best,
        best_iteration,
        eval,
    })
}

/// Σ count·best_qyi / Σ count.
pub fn weighted_qyi(per_problem: &[(&MetricsReport, usize)]) -> Result<f64, MetricsError> {
    if per_problem.is_empty() {
        return Err(MetricsError::Empty);
    }
    if per_problem.iter().any(|&(_, n)| n == 0) {
        return Err(MetricsError::ZeroCount);
    }
    let total: usize = per_problem.iter().map(|&(_, n)| n).sum();
    let sum: f64 = per_problem.iter().map(|&(r, n)| r.best_qyi * n as f64).sum();
    Ok(sum / total as f64)
}

pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = serde_json::json!(round4(n.as_f64().unwrap()));
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

impl MetricsReport {
    /// Pretty JSON with every real rounded to 4 decimals.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).unwrap();
        s.push('\n');
        s
    }

    /// CSV rows (without header): solve cells, then per-iteration quality,
    /// yield and qyi, then the best QYI and eval scores.
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        let p = self.problem.as_str();
        for c in &self.solve {
            writeln!(s, "{p},{},{},{:.4}", c.stage.roman(), c.i, c.value).unwrap();
        }
        for it in &self.iterations {
            writeln!(s, "{p},quality,{},{:.4}", it.iteration, it.score.quality).unwrap();
            writeln!(s, "{p},yield,{},{:.4}", it.iteration, it.score.yield_).unwrap();
            writeln!(s, "{p},qyi,{},{:.4}", it.iteration, it.score.qyi).unwrap();
        }
        writeln!(s, "{p},best_qyi,{},{:.4}", self.best_iteration, self.best_qyi).unwrap();
        if let Some(e) = &self.eval {
            writeln!(s, "{p},eval_quality,{},{:.4}", e.iteration, e.score.quality).unwrap();
            writeln!(s, "{p},eval_yield,{},{:.4}", e.iteration, e.score.yield_).unwrap();
            writeln!(s, "{p},eval_qyi,{},{:.4}", e.iteration, e.score.qyi).unwrap();
        }
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }
}

pub const CSV_HEADER: &str = "problem,stage,i,value";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::{IterationLog, PromptTranscript};
    use crate::types::{CampaignConfig, ErrorCategory, StageOutcome, StageTag};
    use std::collections::BTreeMap;

    pub(crate) fn outcome(tag: StageTag, cost: f64) -> StageOutcome {
        match tag {
            StageTag::Verified => StageOutcome::verified(cost),
            StageTag::FailIII => StageOutcome::infeasible(vec!["v".into()]),
            t => StageOutcome::failure(t, "x", ErrorCategory::Other),
        }
    }

    /// `table[t][n]` is instance n's outcome in iteration t+1 (one sample).
    fn log_of(table: &[Vec<(StageTag, f64)>]) -> CampaignLog {
        let n = table.first().map_or(0, |r| r.len());
        let mut log = CampaignLog::new(
            CampaignConfig::new(ProblemId::OperatorScheduling, "t"),
            (0..n).map(|i| format!("i{i}")).collect(),
            vec![],
        );
        for (t, row) in table.iter().enumerate() {
            log.iterations.push(IterationLog {
                iteration: t as u32 + 1,
                prompt: PromptTranscript {
                    system: String::new(),
                    user: String::new(),
                },
                usage: None,
                samples: vec![SampleLog {
                    sample_index: 0,
                    program: Some("p".into()),
                    extraction_error: None,
                    records: row
                        .iter()
                        .enumerate()
                        .map(|(i, &(tag, c))| RunRecord {
                            instance_id: format!("i{i}"),
                            outcome: outcome(tag, c),
                            evidence: None,
                        })
                        .collect(),
                }],
            });
        }
        log
    }

    fn refs(costs: &[f64], sense: ObjectiveSense) -> ReferenceCosts {
        ReferenceCosts {
            problem: ProblemId::OperatorScheduling,
            sense,
            costs: costs.iter().enumerate().map(|(i, &c)| (format!("i{i}"), c)).collect::<BTreeMap<_, _>>(),
        }
    }

    use StageTag::*;

    #[test]
    fn qyi_values() {
        assert_eq!(qyi(1.0, 1.0), 1.0);
        assert!((qyi(0.75, 0.5) - 0.6).abs() < 1e-12);
        assert_eq!(qyi(0.7, 0.0), 0.0);
        assert_eq!(qyi(0.0, 0.0), 0.0);
    }

    #[test]
    fn zero_cost_guards() {
        let m = ObjectiveSense::Minimize;
        assert_eq!(ratio(0.0, 0.0, m, true), 1.0);
        assert_eq!(ratio(0.0, 0.0, m, false), 1.0);
        assert_eq!(ratio(3.0, 0.0, m, true), 1.0);
        assert_eq!(ratio(3.0, 0.0, m, false), 10.0);
        assert_eq!(ratio(0.0, 2.0, m, true), 0.0);
        assert_eq!(ratio(4.0, 8.0, m, true), 0.5);
        assert_eq!(ratio(4.0, 2.0, m, false), 2.0);
        assert_eq!(ratio(4.0, 2.0, ObjectiveSense::Maximize, true), 0.5);
    }

    #[test]
    fn staged_example() {
        // Fail_I always; Fail_II then Verified at t=2; Verified at t=1.
        let log = log_of(&[
            vec![(FailI, 0.0), (FailII, 0.0), (Verified, 1.0)],
            vec![(FailI, 0.0), (Verified, 1.0), (Verified, 1.0)],
        ]);
        assert!((solve_at(&log, Stage::III, 1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((solve_at(&log, Stage::III, 5).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((solve_at(&log, Stage::I, 1).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(solve_at(&log, Stage::I, 0).is_err());
    }

    #[test]
    fn capped_quality_of_two_ratios() {
        let log = log_of(&[vec![(Verified, 4.0), (Verified, 8.0)]]);
        let r = refs(&[4.0, 4.0], ObjectiveSense::Minimize);
        assert_eq!(iteration_quality(&log, 1, &r, true).unwrap(), 0.75);
        assert_eq!(iteration_yield(&log, 1, &r).unwrap(), 1.0);
    }

    #[test]
    fn no_verified_is_zero() {
        let log = log_of(&[vec![(FailII, 0.0), (FailIII, 0.0)]]);
        let r = refs(&[1.0, 1.0], ObjectiveSense::Minimize);
        assert_eq!(iteration_score(&log, 1, &r, true).unwrap().score, Score::ZERO);
        assert_eq!(iteration_score(&log, 7, &r, true).unwrap().score, Score::ZERO);
    }

    #[test]
    fn missing_reference_is_an_error() {
        let log = log_of(&[vec![(Verified, 4.0)]]);
        let r = refs(&[], ObjectiveSense::Minimize);
        assert!(matches!(
            iteration_quality(&log, 1, &r, true),
            Err(MetricsError::Config(ConfigError::MissingReference(_)))
        ));
    }

    #[test]
    fn best_iteration_prefers_latest_on_ties() {
        let log = log_of(&[vec![(Verified, 2.0), (FailI, 0.0)], vec![(Verified, 1.0), (FailI, 0.0)], vec![(Verified, 1.0), (FailI, 0.0)]]);
        let r = refs(&[1.0, 1.0], ObjectiveSense::Minimize);
        let (q, t) = best_qyi(&log, &r, true).unwrap();
        assert_eq!(t, 3);
        assert!((q - qyi(1.0, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn selection_breaks_ties_on_cost_then_recency() {
        // Both iterations reach capped quality 1, but the second is cheaper.
        let log = log_of(&[vec![(Verified, 3.0)], vec![(Verified, 2.0)], vec![(Verified, 3.0)]]);
        let r = refs(&[5.0], ObjectiveSense::Minimize);
        assert_eq!(select_program(&log, &r).unwrap(), Some((2, 0)));
    }

    #[test]
    fn weighted_mean() {
        let mk = |q: f64| MetricsReport {
            problem: ProblemId::Pdptw,
            capped: true,
            instances: 1,
            solve: vec![],
            iterations: vec![],
            best_qyi: q,
            best_iteration: 1,
            eval: None,
        };
        let (a, b) = (mk(1.0), mk(0.0));
        assert_eq!(weighted_qyi(&[(&a, 1), (&b, 3)]).unwrap(), 0.25);
        assert_eq!(weighted_qyi(&[(&a, 1)]).unwrap(), 1.0);
        let (c, d) = (mk(0.4), mk(0.8));
        assert!((weighted_qyi(&[(&c, 2), (&d, 2)]).unwrap() - 0.6).abs() < 1e-12);
        assert!(weighted_qyi(&[]).is_err());
    }

    #[test]
    fn report_formats() {
        let log = log_of(&[vec![(Verified, 3.0), (FailI, 0.0)]]);
        let r = refs(&[1.0, 1.0], ObjectiveSense::Minimize);
        let rep = compute_report(&log, &r, true).unwrap();
        assert_eq!(rep.solve.len(), 9);
        let csv = rep.to_csv();
        assert!(csv.starts_with("problem,stage,i,value\noperator_scheduling,I,1,0.5000\n"));
        assert!(csv.contains("operator_scheduling,quality,1,0.3333\n"));
        let json = rep.to_json();
        assert!(json.contains("\"quality\": 0.3333"), "{json}");
        assert!(json.contains("\"yield\": 0.5"));
    }
}
