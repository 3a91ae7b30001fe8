//! Intra-operator parallelism: choose one sharding strategy per operator to
//! minimise node plus resharding (edge) costs under a memory budget.
//!
//! Instance JSON:
//!
//! ```json
//! {"budget": 100,
//!  "nodes": [{"interval": [0, 3], "strategies": [{"cost": 2.0, "usage": 60}, {"cost": 5.0, "usage": 20}]}],
//!  "edges": [{"nodes": [0, 1], "matrix": [[0, 1], [1, 0]]}]}
//! ```
//!
//! Intervals are half-open `[lo, hi)` over integer time. The solution is one
//! strategy index per line, in node order.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    pub cost: f64,
    pub usage: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IopNode {
    pub interval: [i64; 2],
    pub strategies: Vec<Strategy>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IopEdge {
    pub nodes: [usize; 2],
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IopGraph {
    pub budget: u64,
    pub nodes: Vec<IopNode>,
    #[serde(default)]
    pub edges: Vec<IopEdge>,
}

pub fn parse_iop(text: &str) -> Result<IopGraph, ParseError> {
    let g: IopGraph = serde_json::from_str(text)?;
    for (i, n) in g.nodes.iter().enumerate() {
        if n.strategies.is_empty() {
            return Err(ParseError::new(format!("node {i} has no strategies")));
        }
        if n.interval[0] > n.interval[1] {
            return Err(ParseError::new(format!("node {i} has an inverted interval")));
        }
        if n.strategies.iter().any(|s| !(s.cost.is_finite() && s.cost >= 0.0)) {
            return Err(ParseError::new(format!("node {i} has an invalid strategy cost")));
        }
    }
    for (k, e) in g.edges.iter().enumerate() {
        let [u, v] = e.nodes;
        if u >= g.nodes.len() || v >= g.nodes.len() {
            return Err(ParseError::new(format!("edge {k} references a missing node")));
        }
        let (su, sv) = (g.nodes[u].strategies.len(), g.nodes[v].strategies.len());
        if e.matrix.len() != su || e.matrix.iter().any(|row| row.len() != sv) {
            return Err(ParseError::new(format!("edge {k} matrix is not {su}x{sv}")));
        }
        if e.matrix.iter().flatten().any(|c| !c.is_finite()) {
            return Err(ParseError::new(format!("edge {k} matrix has a non-finite entry")));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(pub Vec<usize>);

pub fn parse_assignment(text: &str) -> Result<Assignment, ParseError> {
    let picks = content_lines(text)
        .map(|(ln, l)| {
            l.parse::<usize>()
                .map_err(|_| ParseError::at_line(ln, format!("expected a strategy index, got `{l}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if picks.is_empty() {
        return Err(ParseError::new("empty assignment"));
    }
    Ok(Assignment(picks))
}

pub fn render_assignment(a: &Assignment) -> String {
    let mut s = String::new();
    for x in &a.0 {
        writeln!(s, "{x}").unwrap();
    }
    s
}

/// Memory in use over time as `(t, usage)` breakpoints: usage holds on
/// `[t, next t)`. Computed by an event sweep.
pub fn memory_profile(g: &IopGraph, picks: &[usize]) -> Vec<(i64, u64)> {
    let mut events: Vec<(i64, i128)> = Vec::new();
    for (n, &s) in g.nodes.iter().zip(picks) {
        let u = n.strategies[s].usage as i128;
        if n.interval[0] < n.interval[1] && u > 0 {
            events.push((n.interval[0], u));
            events.push((n.interval[1], -u));
        }
    }
    events.sort();
    let mut out: Vec<(i64, u64)> = Vec::new();
    let mut cur: i128 = 0;
    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        while i < events.len() && events[i].0 == t {
            cur += events[i].1;
            i += 1;
        }
        out.push((t, cur as u64));
    }
    out
}

pub fn verify_iop(g: &IopGraph, a: &Assignment) -> Vec<Violation> {
    let mut v = Vec::new();
    if a.0.len() != g.nodes.len() {
        v.push(Violation::new(
            "totality",
            format!("assignment has {} entries for {} nodes", a.0.len(), g.nodes.len()),
        ));
    }
    for (i, (&s, n)) in a.0.iter().zip(&g.nodes).enumerate() {
        if s >= n.strategies.len() {
            v.push(Violation::new(
                "range",
                format!("node {i}: strategy {s} out of range (has {})", n.strategies.len()),
            ));
        }
    }
    if !v.is_empty() {
        return v;
    }
    let profile = memory_profile(g, &a.0);
    if let Some(&(t, _)) = profile.iter().find(|&&(_, m)| m > g.budget) {
        let &(pt, peak) = profile.iter().max_by_key(|&&(t, m)| (m, std::cmp::Reverse(t))).unwrap();
        v.push(Violation::new(
            "memory",
            format!(
                "usage exceeds budget {} from t={t}; peak {peak} at t={pt}",
                g.budget
            ),
        ));
    }
    v
}

pub fn assignment_cost(g: &IopGraph, picks: &[usize]) -> f64 {
    let nodes: f64 = g.nodes.iter().zip(picks).map(|(n, &s)| n.strategies[s].cost).sum();
    let edges: f64 = g
        .edges
        .iter()
        .map(|e| e.matrix[picks[e.nodes[0]]][picks[e.nodes[1]]])
        .sum();
    nodes + edges
}

pub fn evaluate_iop(g: &IopGraph, a: &Assignment) -> f64 {
    assignment_cost(g, &a.0)
}

pub struct IntraOpParallelism;

impl Problem for IntraOpParallelism {
    type Instance = IopGraph;
    type Solution = Assignment;

    const ID: ProblemId = ProblemId::IntraOpParallelism;
    const SOLVER: &'static str = "cheapest_then_repair";

    fn parse_instance(text: &str) -> Result<IopGraph, ParseError> {
        parse_iop(text)
    }

    fn parse_solution(_: &IopGraph, text: &str) -> Result<Assignment, ParseError> {
        parse_assignment(text)
    }

    fn render_solution(solution: &Assignment) -> String {
        render_assignment(solution)
    }

    fn verify(instance: &IopGraph, solution: &Assignment) -> Vec<Violation> {
        verify_iop(instance, solution)
    }

    fn evaluate(instance: &IopGraph, solution: &Assignment) -> f64 {
        evaluate_iop(instance, solution)
    }

    fn baseline(instance: &IopGraph) -> Result<Assignment, SolverError> {
        crate::baselines::iop::assign(instance).map(Assignment)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn node(lo: i64, hi: i64, strategies: &[(f64, u64)]) -> IopNode {
        IopNode {
            interval: [lo, hi],
            strategies: strategies.iter().map(|&(cost, usage)| Strategy { cost, usage }).collect(),
        }
    }

    #[test]
    fn disjoint_intervals_share_the_budget() {
        let g = IopGraph {
            budget: 10,
            nodes: vec![node(0, 2, &[(1.0, 10)]), node(2, 4, &[(1.0, 10)])],
            edges: vec![],
        };
        assert!(verify_iop(&g, &Assignment(vec![0, 0])).is_empty());
        assert_eq!(evaluate_iop(&g, &Assignment(vec![0, 0])), 2.0);
    }

    #[test]
    fn overlap_exceeds_budget() {
        let g = IopGraph {
            budget: 10,
            nodes: vec![node(0, 3, &[(1.0, 10)]), node(2, 4, &[(1.0, 10)])],
            edges: vec![],
        };
        let v = verify_iop(&g, &Assignment(vec![0, 0]));
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("t=2"), "{}", v[0]);
    }

    #[test]
    fn two_node_edge_matches_enumeration() {
        let g = IopGraph {
            budget: 100,
            nodes: vec![node(0, 1, &[(1.0, 0), (2.0, 0)]), node(0, 1, &[(3.0, 0), (0.5, 0)])],
            edges: vec![IopEdge {
                nodes: [0, 1],
                matrix: vec![vec![0.0, 4.0], vec![1.0, 0.25]],
            }],
        };
        let expect = [[4.0, 5.5], [6.0, 2.75]];
        for (a, row) in expect.iter().enumerate() {
            for (b, &want) in row.iter().enumerate() {
                assert_eq!(evaluate_iop(&g, &Assignment(vec![a, b])), want);
            }
        }
    }

    #[test]
    fn totality_and_range() {
        let g = IopGraph {
            budget: 1,
            nodes: vec![node(0, 1, &[(1.0, 0)])],
            edges: vec![],
        };
        assert_eq!(verify_iop(&g, &Assignment(vec![0, 0]))[0].kind, "totality");
        assert_eq!(verify_iop(&g, &Assignment(vec![3]))[0].kind, "range");
    }

    #[test]
    fn json_validation() {
        assert!(parse_iop(r#"{"budget":1,"nodes":[{"interval":[0,1],"strategies":[]}]}"#).is_err());
        assert!(parse_iop(
            r#"{"budget":1,"nodes":[{"interval":[0,1],"strategies":[{"cost":1,"usage":1}]}],"edges":[{"nodes":[0,0],"matrix":[[1,2]]}]}"#
        )
        .is_err());
        assert!(parse_iop(r#"{"budget":1,"nodes":[{"interval":[2,1],"strategies":[{"cost":1,"usage":1}]}]}"#).is_err());
        assert!(parse_assignment("0\nx\n").is_err());
    }
}
