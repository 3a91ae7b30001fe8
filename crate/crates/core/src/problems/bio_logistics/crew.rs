//! Airline crew pairing (minimise).
//!
//! Instance JSON:
//!
//! ```json
//! {"bases": ["A"],
//!  "flights": [{"id": "F1", "from": "A", "to": "B", "dep": 480, "arr": 540}],
//!  "rules": {"min_connect": 30, "max_span": 600, "max_legs": 4},
//!  "costs": {"fixed": 100.0, "per_minute": 0.5}}
//! ```
//!
//! Times are minutes. The solution lists one pairing per line as
//! whitespace-separated flight ids in flying order.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flight {
    pub id: String,
    pub from: String,
    pub to: String,
    pub dep: i64,
    pub arr: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rules {
    pub min_connect: i64,
    pub max_span: i64,
    pub max_legs: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Costs {
    pub fixed: f64,
    pub per_minute: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrewInstance {
    pub bases: Vec<String>,
    pub flights: Vec<Flight>,
    pub rules: Rules,
    pub costs: Costs,
}

impl CrewInstance {
    pub fn flight_index(&self) -> HashMap<&str, usize> {
        self.flights.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect()
    }

    pub fn is_base(&self, airport: &str) -> bool {
        self.bases.iter().any(|b| b == airport)
    }

    /// Can flight `b` directly follow flight `a` in a pairing?
    pub fn can_follow(&self, a: usize, b: usize) -> bool {
        let (fa, fb) = (&self.flights[a], &self.flights[b]);
        fa.to == fb.from && fb.dep >= fa.arr + self.rules.min_connect
    }

    pub fn pairing_cost(&self, legs: &[usize]) -> f64 {
        let span = self.flights[*legs.last().unwrap()].arr - self.flights[legs[0]].dep;
        self.costs.fixed + self.costs.per_minute * span as f64
    }
}

pub fn parse_crew(text: &str) -> Result<CrewInstance, ParseError> {
    let c: CrewInstance = serde_json::from_str(text)?;
    if c.bases.is_empty() {
        return Err(ParseError::new("no crew bases"));
    }
    let mut ids = BTreeSet::new();
    for f in &c.flights {
        if !ids.insert(f.id.as_str()) {
            return Err(ParseError::new(format!("flight `{}` listed twice", f.id)));
        }
        if f.arr <= f.dep {
            return Err(ParseError::new(format!("flight `{}` arrives before it departs", f.id)));
        }
    }
    if c.rules.min_connect <= 0 || c.rules.max_span <= 0 || c.rules.max_legs == 0 {
        return Err(ParseError::new("rule values must be positive"));
    }
    let ok = |x: f64| x.is_finite() && x >= 0.0;
    if !ok(c.costs.fixed) || !ok(c.costs.per_minute) {
        return Err(ParseError::new("costs must be finite and non-negative"));
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairingSet(pub Vec<Vec<String>>);

impl PairingSet {
    pub fn from_indices(inst: &CrewInstance, pairings: &[Vec<usize>]) -> PairingSet {
        PairingSet(
            pairings
                .iter()
                .map(|p| p.iter().map(|&i| inst.flights[i].id.clone()).collect())
                .collect(),
        )
    }
}

pub fn parse_pairings(text: &str) -> Result<PairingSet, ParseError> {
    let ps: Vec<Vec<String>> = content_lines(text)
        .map(|(_, l)| l.split_whitespace().map(str::to_string).collect())
        .collect();
    if ps.is_empty() {
        return Err(ParseError::new("no pairings"));
    }
    Ok(PairingSet(ps))
}

pub fn render_pairings(ps: &PairingSet) -> String {
    let mut s = String::new();
    for p in &ps.0 {
        writeln!(s, "{}", p.join(" ")).unwrap();
    }
    s
}

pub fn verify_pairings(inst: &CrewInstance, ps: &PairingSet) -> Vec<Violation> {
    let idx = inst.flight_index();
    let mut v = Vec::new();
    let mut covered = vec![0usize; inst.flights.len()];
    for (k, p) in ps.0.iter().enumerate() {
        let mut legs = Vec::with_capacity(p.len());
        for id in p {
            match idx.get(id.as_str()) {
                Some(&i) => {
                    covered[i] += 1;
                    legs.push(i);
                }
                None => v.push(Violation::new("unknown flight", format!("pairing {}: flight `{id}` does not exist", k + 1))),
            }
        }
        if legs.len() != p.len() || legs.is_empty() {
            continue;
        }
        let name = |i: usize| inst.flights[i].id.as_str();
        for w in legs.windows(2) {
            let (a, b) = (&inst.flights[w[0]], &inst.flights[w[1]]);
            if a.to != b.from {
                v.push(Violation::new(
                    "connection",
                    format!("pairing {}: `{}` arrives at {} but `{}` departs from {}", k + 1, a.id, a.to, b.id, b.from),
                ));
            } else if b.dep < a.arr + inst.rules.min_connect {
                v.push(Violation::new(
                    "connection",
                    format!(
                        "pairing {}: {} min between `{}` and `{}`, minimum is {}",
                        k + 1,
                        b.dep - a.arr,
                        a.id,
                        b.id,
                        inst.rules.min_connect
                    ),
                ));
            }
        }
        let (first, last) = (&inst.flights[legs[0]], &inst.flights[*legs.last().unwrap()]);
        if !inst.is_base(&first.from) {
            v.push(Violation::new("base", format!("pairing {} starts at {}, not a base", k + 1, first.from)));
        }
        if !inst.is_base(&last.to) {
            v.push(Violation::new("base", format!("pairing {} ends at {}, not a base", k + 1, last.to)));
        }
        let span = last.arr - first.dep;
        if span > inst.rules.max_span {
            v.push(Violation::new(
                "span",
                format!("pairing {} spans {span} min ({}..{}), limit {}", k + 1, name(legs[0]), name(*legs.last().unwrap()), inst.rules.max_span),
            ));
        }
        if legs.len() > inst.rules.max_legs {
            v.push(Violation::new(
                "legs",
                format!("pairing {} has {} legs, limit {}", k + 1, legs.len(), inst.rules.max_legs),
            ));
        }
    }
    for (i, &c) in covered.iter().enumerate() {
        match c {
            1 => {}
            0 => v.push(Violation::new("coverage", format!("flight `{}` is not covered", inst.flights[i].id))),
            n => v.push(Violation::new("coverage", format!("flight `{}` is covered {n} times", inst.flights[i].id))),
        }
    }
    v
}

pub fn evaluate_pairings(inst: &CrewInstance, ps: &PairingSet) -> f64 {
    let idx = inst.flight_index();
    ps.0.iter()
        .filter_map(|p| p.iter().map(|id| idx.get(id.as_str()).copied()).collect::<Option<Vec<_>>>())
        .filter(|legs| !legs.is_empty())
        .map(|legs| inst.pairing_cost(&legs))
        .sum()
}

pub struct CrewPairing;

impl Problem for CrewPairing {
    type Instance = CrewInstance;
    type Solution = PairingSet;

    const ID: ProblemId = ProblemId::CrewPairing;
    const SOLVER: &'static str = "greedy_continuation";

    fn parse_instance(text: &str) -> Result<CrewInstance, ParseError> {
        parse_crew(text)
    }

    fn parse_solution(_: &CrewInstance, text: &str) -> Result<PairingSet, ParseError> {
        parse_pairings(text)
    }

    fn render_solution(solution: &PairingSet) -> String {
        render_pairings(solution)
    }

    fn verify(instance: &CrewInstance, solution: &PairingSet) -> Vec<Violation> {
        verify_pairings(instance, solution)
    }

    fn evaluate(instance: &CrewInstance, solution: &PairingSet) -> f64 {
        evaluate_pairings(instance, solution)
    }

    fn baseline(instance: &CrewInstance) -> Result<PairingSet, SolverError> {
        crate::baselines::pairings::build(instance).map(|p| PairingSet::from_indices(instance, &p))
    }
}
