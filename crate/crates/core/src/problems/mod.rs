//! Per-problem parsers, verifiers and evaluators behind a common adapter.
//!
//! Each problem implements [`Problem`] with concrete instance and solution
//! types. [`adapter`] erases those types so the campaign loop, the reference
//! builder and the CLI can work on raw file contents.

use std::fmt;
use std::marker::PhantomData;

use crate::error::{ParseError, SolverError};
use crate::types::{ObjectiveSense, ProblemId};

pub mod bio_logistics;
pub mod compilers;
pub mod eda;

pub use bio_logistics::{crew, mendelian, pdptw, protein};
pub use compilers::{egraph, iop};
pub use eda::{blif, mapping, routing, scheduling};

/// A single constraint violation found by a verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Violation {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

/// Parse, verify, evaluate and solve one problem family.
pub trait Problem: Send + Sync + 'static {
    type Instance: Send + Sync;
    type Solution;

    const ID: ProblemId;
    /// Name recorded for the reference solver.
    const SOLVER: &'static str;

    fn parse_instance(text: &str) -> Result<Self::Instance, ParseError>;
    fn parse_solution(instance: &Self::Instance, text: &str) -> Result<Self::Solution, ParseError>;
    fn render_solution(solution: &Self::Solution) -> String;
    fn verify(instance: &Self::Instance, solution: &Self::Solution) -> Vec<Violation>;
    /// Objective value; only meaningful when `verify` returned no violations.
    fn evaluate(instance: &Self::Instance, solution: &Self::Solution) -> f64;
    fn baseline(instance: &Self::Instance) -> Result<Self::Solution, SolverError>;
}

/// Result of checking a solution file against an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Assessment {
    Feasible { cost: f64 },
    Infeasible { violations: Vec<Violation> },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssessError {
    #[error("instance does not parse: {0}")]
    Instance(ParseError),
    #[error("solution does not parse: {0}")]
    Solution(ParseError),
    #[error(transparent)]
    Solver(SolverError),
}

/// A reference solution rendered in the problem's output format.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRun {
    pub payload: String,
    pub cost: f64,
    pub solver: &'static str,
}

/// Type-erased view of a [`Problem`] working on file contents.
pub trait ProblemAdapter: Send + Sync {
    fn id(&self) -> ProblemId;

    fn sense(&self) -> ObjectiveSense {
        self.id().sense()
    }

    fn check_instance(&self, instance: &str) -> Result<(), ParseError>;
    fn assess(&self, instance: &str, solution: &str) -> Result<Assessment, AssessError>;
    fn run_baseline(&self, instance: &str) -> Result<BaselineRun, AssessError>;
}

struct Adapter<P>(PhantomData<fn() -> P>);

impl<P: Problem> ProblemAdapter for Adapter<P> {
    fn id(&self) -> ProblemId {
        P::ID
    }

    fn check_instance(&self, instance: &str) -> Result<(), ParseError> {
        P::parse_instance(instance).map(|_| ())
    }

    fn assess(&self, instance: &str, solution: &str) -> Result<Assessment, AssessError> {
        let inst = P::parse_instance(instance).map_err(AssessError::Instance)?;
        let sol = P::parse_solution(&inst, solution).map_err(AssessError::Solution)?;
        let violations = P::verify(&inst, &sol);
        if violations.is_empty() {
            Ok(Assessment::Feasible {
                cost: P::evaluate(&inst, &sol),
            })
        } else {
            Ok(Assessment::Infeasible { violations })
        }
    }

    fn run_baseline(&self, instance: &str) -> Result<BaselineRun, AssessError> {
        let inst = P::parse_instance(instance).map_err(AssessError::Instance)?;
        let sol = P::baseline(&inst).map_err(AssessError::Solver)?;
        // Reparse the rendered payload so the stored cost is exactly what a
        // verifier sees when reading the reference file back.
        let payload = P::render_solution(&sol);
        let reparsed = P::parse_solution(&inst, &payload).map_err(|e| {
            AssessError::Solver(SolverError(format!("reference payload does not reparse: {e}")))
        })?;
        let violations = P::verify(&inst, &reparsed);
        if let Some(v) = violations.first() {
            return Err(AssessError::Solver(SolverError(format!(
                "reference solution is infeasible ({} violations, first: {v})",
                violations.len()
            ))));
        }
        Ok(BaselineRun {
            cost: P::evaluate(&inst, &reparsed),
            payload,
            solver: P::SOLVER,
        })
    }
}

/// The registered adapter for `id`. Every [`ProblemId`] has exactly one.
pub fn adapter(id: ProblemId) -> &'static dyn ProblemAdapter {
    match id {
        ProblemId::OperatorScheduling => &Adapter::<scheduling::OperatorScheduling>(PhantomData),
        ProblemId::TechnologyMapping => &Adapter::<mapping::TechnologyMapping>(PhantomData),
        ProblemId::GlobalRouting => &Adapter::<routing::GlobalRouting>(PhantomData),
        ProblemId::EgraphExtraction => &Adapter::<egraph::EgraphExtraction>(PhantomData),
        ProblemId::IntraOpParallelism => &Adapter::<iop::IntraOpParallelism>(PhantomData),
        ProblemId::ProteinDesign => &Adapter::<protein::ProteinDesign>(PhantomData),
        ProblemId::MendelianError => &Adapter::<mendelian::MendelianError>(PhantomData),
        ProblemId::CrewPairing => &Adapter::<crew::CrewPairing>(PhantomData),
        ProblemId::Pdptw => &Adapter::<pdptw::Pdptw>(PhantomData),
    }
}

/// Split text into non-empty, comment-stripped lines paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        };
        let l = l.trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}
