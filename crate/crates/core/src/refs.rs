//! Reference (expert baseline) costs: building, storing and loading them.
//!
//! Each problem has `<dir>/<problem>.csv` with columns
//! `instance_id,cost,solver,version` and one solution payload per instance
//! under `<dir>/solutions/<problem>/<instance_id>.sol`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::error::ConfigError;
use crate::problems::{adapter, AssessError, Assessment};
use crate::suite::Suite;
use crate::types::{ObjectiveSense, ProblemId};

pub const CSV_HEADER: &str = "instance_id,cost,solver,version";

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub problem: ProblemId,
    pub instance_id: String,
    pub payload: String,
    pub cost: f64,
    pub solver: String,
    pub wall_time_s: f64,
}

/// c* per instance for one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCosts {
    pub problem: ProblemId,
    pub sense: ObjectiveSense,
    pub costs: BTreeMap<String, f64>,
}

impl ReferenceCosts {
    pub fn get(&self, instance_id: &str) -> Result<f64, ConfigError> {
        self.costs
            .get(instance_id)
            .copied()
            .ok_or_else(|| ConfigError::MissingReference(instance_id.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RefsError {
    #[error("baseline failed on {problem}/{instance}: {source}")]
    Baseline {
        problem: ProblemId,
        instance: String,
        #[source]
        source: AssessError,
    },
    #[error("stored reference for {problem}/{instance} does not re-validate: {reason}")]
    Stale {
        problem: ProblemId,
        instance: String,
        reason: String,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Run the baseline on every demo and eval instance, in instance-id order.
pub fn build_reference_costs(suite: &Suite) -> Result<Vec<ReferenceSolution>, RefsError> {
    let a = adapter(suite.problem);
    let mut all: Vec<_> = suite.instances().collect();
    all.sort_by(|x, y| x.instance_id.cmp(&y.instance_id));
    all.into_iter()
        .map(|inst| {
            let start = Instant::now();
            let run = a.run_baseline(&inst.payload_text()).map_err(|source| RefsError::Baseline {
                problem: suite.problem,
                instance: inst.instance_id.clone(),
                source,
            })?;
            Ok(ReferenceSolution {
                problem: suite.problem,
                instance_id: inst.instance_id.clone(),
                payload: run.payload,
                cost: run.cost,
                solver: run.solver.to_string(),
                wall_time_s: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

pub fn render_csv(sols: &[ReferenceSolution]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in sols {
        writeln!(s, "{},{},{},{}", r.instance_id, r.cost, r.solver, env!("CARGO_PKG_VERSION")).unwrap();
    }
    s
}

pub fn write_references(dir: &Path, problem: ProblemId, sols: &[ReferenceSolution]) -> Result<(), ConfigError> {
    let sol_dir = dir.join("solutions").join(problem.as_str());
    fs::create_dir_all(&sol_dir).map_err(|e| ConfigError::io(&sol_dir, e))?;
    for r in sols {
        let p = sol_dir.join(format!("{}.sol", r.instance_id));
        fs::write(&p, &r.payload).map_err(|e| ConfigError::io(&p, e))?;
    }
    let csv = dir.join(format!("{}.csv", problem.as_str()));
    fs::write(&csv, render_csv(sols)).map_err(|e| ConfigError::io(&csv, e))
}

pub fn load_references(dir: &Path, problem: ProblemId) -> Result<ReferenceCosts, ConfigError> {
    let path = dir.join(format!("{}.csv", problem.as_str()));
    let text = fs::read_to_string(&path).map_err(|e| ConfigError::io(&path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(ConfigError::Invalid(format!("{}: expected header `{CSV_HEADER}`", path.display())));
    }
    let mut costs = BTreeMap::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || ConfigError::Invalid(format!("{}: line {} is malformed", path.display(), n + 2));
        let mut f = line.split(',');
        let id = f.next().ok_or_else(bad)?;
        let cost: f64 = f.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
        if !cost.is_finite() || cost < 0.0 {
            return Err(bad());
        }
        costs.insert(id.to_string(), cost);
    }
    Ok(ReferenceCosts {
        problem,
        sense: problem.sense(),
        costs,
    })
}

/// Check that every instance has a stored solution that verifies and
/// evaluates to exactly the stored cost.
pub fn revalidate(dir: &Path, suite: &Suite) -> Result<ReferenceCosts, RefsError> {
    let refs = load_references(dir, suite.problem)?;
    let a = adapter(suite.problem);
    for inst in suite.instances() {
        let stale = |reason: String| RefsError::Stale {
            problem: suite.problem,
            instance: inst.instance_id.clone(),
            reason,
        };
        let cost = refs.get(&inst.instance_id)?;
        let p = dir
            .join("solutions")
            .join(suite.problem.as_str())
            .join(format!("{}.sol", inst.instance_id));
        let sol = fs::read_to_string(&p).map_err(|e| stale(format!("{}: {e}", p.display())))?;
        match a.assess(&inst.payload_text(), &sol) {
            Ok(Assessment::Feasible { cost: c }) if c == cost => {}
            Ok(Assessment::Feasible { cost: c }) => return Err(stale(format!("evaluates to {c}, stored {cost}"))),
            Ok(Assessment::Infeasible { violations }) => {
                return Err(stale(format!("{} violations, first: {}", violations.len(), violations[0])))
            }
            Err(e) => return Err(stale(e.to_string())),
        }
    }
    Ok(refs)
}
