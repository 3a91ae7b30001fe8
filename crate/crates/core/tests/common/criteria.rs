//! One check per acceptance criterion. Each returns a short summary on
//! success and a reason on failure; the `acceptance` target prints them and
//! ordinary tests assert on them.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cobench_core::campaign::run_program;
use cobench_core::llm::ReplayClient;
use cobench_core::metrics::{best_qyi, qyi, solve_at, weighted_qyi};
use cobench_core::problems::{Assessment, blif};
use cobench_core::refs::{load_references, revalidate};
use cobench_core::suite::{bundled_refs, bundled_root};
use cobench_core::{
    adapter, compute_report, run_campaign, CampaignConfig, CampaignLog, CandidateProgram, InstanceRef, ProblemId,
    ReferenceCosts, ResourceLimits, Runner, Split, Stage, StageTag, Suite,
};

use super::logs::{log_from, outcome, random_log, refs_for};
use super::oracles;

pub type Check = Result<String, String>;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn metric_algebra() -> Check {
    ensure(qyi(1.0, 1.0) == 1.0, || "qyi(1,1) != 1".into())?;
    ensure((qyi(0.75, 0.5) - 0.6).abs() <= 1e-12, || format!("qyi(0.75,0.5) = {}", qyi(0.75, 0.5)))?;
    for seed in 0..1000 {
        let (log, refs) = random_log(seed);
        let capped = compute_report(&log, &refs, true).map_err(|e| e.to_string())?;
        let uncapped = compute_report(&log, &refs, false).map_err(|e| e.to_string())?;
        for (c, u) in capped.iterations.iter().zip(&uncapped.iterations) {
            ensure(c.score.quality <= u.score.quality + 1e-12, || format!("log {seed}: capped quality above uncapped"))?;
        }
        for i in 1..=11 {
            let s: Vec<f64> = Stage::ALL.iter().map(|&st| solve_at(&log, st, i).unwrap()).collect();
            ensure(s[0] + 1e-12 >= s[1] && s[1] + 1e-12 >= s[2], || format!("log {seed}: stages not nested at i={i}"))?;
            for (k, &st) in Stage::ALL.iter().enumerate() {
                ensure(solve_at(&log, st, i + 1).unwrap() + 1e-12 >= s[k], || format!("log {seed}: solve not monotone in i"))?;
            }
        }
    }
    let p = ProblemId::OperatorScheduling;
    let good = compute_report(&log_from(p, &[vec![vec![outcome(StageTag::Verified, 2.0)]]]), &refs_for(p, &[2.0]), true).unwrap();
    let bad = compute_report(&log_from(p, &[vec![vec![outcome(StageTag::FailI, 0.0)]]]), &refs_for(p, &[2.0]), true).unwrap();
    let w = weighted_qyi(&[(&good, 1), (&bad, 3)]).unwrap();
    ensure((w - 0.25).abs() <= 1e-12, || format!("weighted_qyi = {w}"))?;
    Ok("qyi(1,1)=1, qyi(0.75,0.5)=0.6, weighted=0.25, 1000 random logs".into())
}

pub fn worked_example() -> Check {
    let a = adapter(ProblemId::OperatorScheduling);
    let read = |f: &str| std::fs::read_to_string(fixture(f)).unwrap();
    let inst = read("stage/example.json");
    match a.assess(&inst, &read("stage/example.sol")) {
        Ok(Assessment::Feasible { cost: 4.0 }) => {}
        other => return Err(format!("example schedule: {other:?}")),
    }
    match a.assess(&inst, &read("stage/example_bad.sol")) {
        Ok(Assessment::Infeasible { violations }) if violations.iter().any(|v| v.kind == "dependency") => {}
        other => return Err(format!("perturbed schedule: {other:?}")),
    }
    Ok("latency 4; n3:2 rejected as a dependency violation".into())
}

pub fn oracle_equivalence(cases: usize) -> Check {
    oracles::scheduling_family(cases, 1).map_err(|e| format!("scheduling: {e}"))?;
    oracles::egraph_family(cases, 2).map_err(|e| format!("egraph: {e}"))?;
    oracles::iop_family(cases, 3).map_err(|e| format!("iop: {e}"))?;
    let exact = oracles::protein_family(cases, 4).map_err(|e| format!("protein: {e}"))?;
    ensure(exact == cases, || format!("protein baseline optimal on {exact}/{cases}"))?;
    oracles::mendelian_family(cases, 5).map_err(|e| format!("mendelian: {e}"))?;
    oracles::pdptw_family(cases, 6).map_err(|e| format!("pdptw: {e}"))?;
    Ok(format!("{cases} instances x 6 families; protein baseline optimal {exact}/{cases}"))
}

pub fn trajectory_config() -> CampaignConfig {
    let mut cfg = CampaignConfig::new(ProblemId::TechnologyMapping, "replay:mapping_trajectory");
    cfg.iterations = 5;
    cfg
}

pub fn trajectory_campaign() -> Result<(CampaignLog, ReferenceCosts), String> {
    let p = ProblemId::TechnologyMapping;
    let suite = Suite::bundled(p).map_err(|e| e.to_string())?;
    let refs = load_references(&bundled_refs(), p).map_err(|e| e.to_string())?;
    let client = ReplayClient::from_file(&fixture("mapping_trajectory.replay")).map_err(|e| e.to_string())?;
    let log = run_campaign(&trajectory_config(), &client, &suite, &refs, &Runner::default()).map_err(|e| e.to_string())?;
    Ok((log, refs))
}

pub fn mapping_trajectory(log: &CampaignLog, refs: &ReferenceCosts) -> Check {
    ensure(log.aborted.is_none() && log.iterations.len() == 5, || "campaign did not complete 5 iterations".into())?;
    let n = log.demo_instances.len();
    for it in &log.iterations {
        ensure(it.samples.len() == 1 && it.samples[0].records.len() == n, || format!("iteration {} incomplete", it.iteration))?;
    }
    let suite = Suite::bundled(ProblemId::TechnologyMapping).map_err(|e| e.to_string())?;
    let mut improved = Vec::new();
    for inst in &suite.demo {
        let nodes = blif::parse_blif(&inst.payload_text()).map_err(|e| e.to_string())?.nodes.len() as f64;
        let cost = |t: u32| {
            log.sample(t, 0)
                .and_then(|s| s.records.iter().find(|r| r.instance_id == inst.instance_id))
                .filter(|r| r.outcome.tag == StageTag::Verified)
                .and_then(|r| r.outcome.cost)
        };
        ensure(cost(2) == Some(nodes), || format!("{}: naive copy gave {:?}, node count {nodes}", inst.instance_id, cost(2)))?;
        if let Some(c) = cost(5).filter(|&c| c < nodes) {
            improved.push(format!("{} {c}<{nodes}", inst.instance_id));
        }
    }
    ensure(!improved.is_empty(), || "DP program never beats the node count".into())?;
    let (q, t) = best_qyi(log, refs, true).map_err(|e| e.to_string())?;
    ensure(t >= 3, || format!("best iteration {t} (qyi {q:.4})"))?;
    Ok(format!("DP improves {}; best iteration {t} (qyi {q:.4})", improved.join(", ")))
}

pub fn three_stage(reps: usize) -> Check {
    let text = std::fs::read(fixture("stage/example.json")).unwrap();
    let inst = InstanceRef {
        problem: ProblemId::OperatorScheduling,
        instance_id: "example".into(),
        split: Split::Demo,
        payload: text,
    };
    let limits = ResourceLimits::new(2, 1.0);
    let cases = [
        ("import_error.py", StageTag::FailI),
        ("sleep.py", StageTag::FailII),
        ("infeasible.py", StageTag::FailIII),
    ];
    let mut slowest = 0.0f64;
    for (file, want) in cases {
        let program = CandidateProgram {
            source: std::fs::read_to_string(fixture(&format!("stage/{file}"))).unwrap(),
            iteration: 1,
            sample_index: 0,
        };
        for rep in 0..reps {
            let start = Instant::now();
            let recs = run_program(&program, std::slice::from_ref(&inst), &limits, &Runner::default()).map_err(|e| e.to_string())?;
            let took = start.elapsed().as_secs_f64();
            let got = recs[0].outcome.tag;
            ensure(got == want, || format!("{file} rep {rep}: {got} ({})", recs[0].outcome.detail))?;
            if want == StageTag::FailII {
                slowest = slowest.max(took);
                ensure(took <= limits.timeout_s + 2.0, || format!("{file} rep {rep}: took {took:.2}s"))?;
            }
        }
    }
    Ok(format!("{reps}/{reps} each; timeout case at most {slowest:.2}s for a 1s limit"))
}

pub fn determinism(a: &CampaignLog, b: &CampaignLog, refs: &ReferenceCosts) -> Check {
    ensure(a.to_json() == b.to_json(), || "campaign logs differ".into())?;
    let (ra, rb) = (compute_report(a, refs, true).unwrap(), compute_report(b, refs, true).unwrap());
    ensure(ra.to_json() == rb.to_json() && ra.to_csv() == rb.to_csv(), || "reports differ".into())?;
    Ok(format!("{} log bytes identical; reports identical", a.to_json().len()))
}

pub fn dataset_shape() -> Check {
    let mut total = 0;
    for p in ProblemId::ALL {
        let suite = Suite::load(&bundled_root(), p).map_err(|e| format!("{p}: {e}"))?;
        ensure(suite.demo.len() >= 3 && suite.eval.len() >= 5, || format!("{p}: {} demo, {} eval", suite.demo.len(), suite.eval.len()))?;
        let refs = revalidate(&bundled_refs(), &suite).map_err(|e| e.to_string())?;
        ensure(suite.eval.iter().all(|i| refs.costs.contains_key(&i.instance_id)), || format!("{p}: eval not covered"))?;
        total += suite.demo.len() + suite.eval.len();
    }
    Ok(format!("9 problems, {total} instances, all references re-validate"))
}
