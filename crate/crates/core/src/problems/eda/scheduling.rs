//! Resource-constrained operator scheduling for high-level synthesis.
//!
//! Instances are the JSON dataflow graphs with per-resource delay and
//! availability tables; solutions are `node:cycle` lines.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq)]
pub struct SchedNode {
    pub id: String,
    pub resource: String,
    pub delay: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedInstance {
    pub name: String,
    /// Available units per resource type.
    pub availability: BTreeMap<String, u64>,
    pub delays: BTreeMap<String, u64>,
    pub nodes: Vec<SchedNode>,
    /// Dependency edges as node indices.
    pub edges: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl SchedInstance {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.nodes.len()];
        for &(u, v) in &self.edges {
            preds[v].push(u);
        }
        preds
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succs = vec![Vec::new(); self.nodes.len()];
        for &(u, v) in &self.edges {
            succs[u].push(v);
        }
        succs
    }

    /// Node indices in a topological order, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let succs = self.successors();
        let mut indeg = vec![0usize; n];
        for &(_, v) in &self.edges {
            indeg[v] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &v in &succs[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn availability_of(&self, node: usize) -> u64 {
        self.availability[&self.nodes[node].resource]
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default)]
    name: String,
    delay: BTreeMap<String, u64>,
    resource: BTreeMap<String, u64>,
    nodes: Vec<(String, String)>,
    edges: Vec<Vec<String>>,
}

pub fn parse_instance(text: &str) -> Result<SchedInstance, ParseError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    for (r, &d) in &raw.delay {
        if d == 0 {
            return Err(ParseError::new(format!("resource `{r}` has zero delay")));
        }
    }
    let mut index = HashMap::new();
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    for (id, resource) in raw.nodes {
        let delay = *raw
            .delay
            .get(&resource)
            .ok_or_else(|| ParseError::new(format!("node `{id}`: resource `{resource}` has no delay")))?;
        match raw.resource.get(&resource) {
            Some(&g) if g >= 1 => {}
            Some(_) => {
                return Err(ParseError::new(format!("resource `{resource}` has zero units")))
            }
            None => {
                return Err(ParseError::new(format!(
                    "node `{id}`: resource `{resource}` has no availability"
                )))
            }
        }
        if index.insert(id.clone(), nodes.len()).is_some() {
            return Err(ParseError::new(format!("duplicate node `{id}`")));
        }
        nodes.push(SchedNode { id, resource, delay });
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in &raw.edges {
        if !(2..=3).contains(&e.len()) {
            return Err(ParseError::new(format!("edge {e:?} must be [src, dst, label]")));
        }
        let lookup = |id: &String| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ParseError::new(format!("edge references unknown node `{id}`")))
        };
        edges.push((lookup(&e[0])?, lookup(&e[1])?));
    }
    let inst = SchedInstance {
        name: raw.name,
        availability: raw.resource,
        delays: raw.delay,
        nodes,
        edges,
        index,
    };
    if inst.topological_order().is_none() {
        return Err(ParseError::new("dependency graph has a cycle"));
    }
    Ok(inst)
}

/// Start cycles in file order. Node ids are resolved during verification so
/// that unknown ids surface as violations rather than parse errors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    pub entries: Vec<(String, u64)>,
}

impl Schedule {
    pub fn from_starts(inst: &SchedInstance, starts: &[u64]) -> Self {
        Schedule {
            entries: inst
                .nodes
                .iter()
                .zip(starts)
                .map(|(n, &t)| (n.id.clone(), t))
                .collect(),
        }
    }

    /// Per-node start times when every node is present exactly once.
    pub fn starts(&self, inst: &SchedInstance) -> Option<Vec<u64>> {
        let mut starts = vec![None; inst.nodes.len()];
        for (id, t) in &self.entries {
            let i = inst.node_index(id)?;
            if starts[i].replace(*t).is_some() {
                return None;
            }
        }
        starts.into_iter().collect()
    }
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let mut entries = Vec::new();
    for (ln, line) in content_lines(text) {
        let (id, cycle) = line
            .split_once(':')
            .ok_or_else(|| ParseError::at_line(ln, format!("expected `node:cycle`, got `{line}`")))?;
        let cycle: u64 = cycle
            .trim()
            .parse()
            .map_err(|_| ParseError::at_line(ln, format!("invalid cycle `{}`", cycle.trim())))?;
        entries.push((id.trim().to_string(), cycle));
    }
    if entries.is_empty() {
        return Err(ParseError::new("empty schedule"));
    }
    Ok(Schedule { entries })
}

pub fn render_schedule(s: &Schedule) -> String {
    s.entries.iter().map(|(id, t)| format!("{id}:{t}\n")).collect()
}

pub fn verify_schedule(inst: &SchedInstance, s: &Schedule) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut starts: Vec<Option<u64>> = vec![None; inst.nodes.len()];
    for (id, t) in &s.entries {
        match inst.node_index(id) {
            None => violations.push(Violation::new("unknown node", format!("`{id}` is not in the graph"))),
            Some(i) => {
                if starts[i].is_some() {
                    violations.push(Violation::new("duplicate", format!("`{id}` is scheduled more than once")));
                } else {
                    starts[i] = Some(*t);
                }
            }
        }
    }
    for (i, t) in starts.iter().enumerate() {
        if t.is_none() {
            violations.push(Violation::new("missing", format!("`{}` has no start cycle", inst.nodes[i].id)));
        }
    }
    let preds = inst.predecessors();
    for (v, tv) in starts.iter().enumerate() {
        let Some(tv) = *tv else { continue };
        let late: Vec<String> = preds[v]
            .iter()
            .filter_map(|&u| {
                let finish = starts[u]? + inst.nodes[u].delay;
                (finish > tv).then(|| format!("{} finishes at {}", inst.nodes[u].id, finish))
            })
            .collect();
        if !late.is_empty() {
            violations.push(Violation::new(
                "dependency",
                format!("{} starts at {} but {}", inst.nodes[v].id, tv, late.join(", ")),
            ));
        }
    }
    // Occupancy sweep per resource type: a node holds one unit during [t, t + d).
    let mut events: BTreeMap<&str, Vec<(u64, i64)>> = BTreeMap::new();
    for (i, t) in starts.iter().enumerate() {
        if let Some(t) = t {
            let node = &inst.nodes[i];
            let ev = events.entry(node.resource.as_str()).or_default();
            ev.push((*t, 1));
            ev.push((t + node.delay, -1));
        }
    }
    for (resource, mut ev) in events {
        let limit = inst.availability[resource] as i64;
        ev.sort_unstable();
        let mut active = 0i64;
        let mut k = 0;
        while k < ev.len() {
            let t = ev[k].0;
            while k < ev.len() && ev[k].0 == t {
                active += ev[k].1;
                k += 1;
            }
            if active > limit {
                let end = ev.get(k).map_or(t + 1, |e| e.0);
                violations.push(Violation::new(
                    "resource",
                    format!(
                        "`{resource}` uses {active} > {limit} units in cycles {t}-{}",
                        end - 1
                    ),
                ));
            }
        }
    }
    violations
}

/// Latency: the latest finishing cycle, 0 for an empty graph.
pub fn evaluate_schedule(inst: &SchedInstance, s: &Schedule) -> u64 {
    s.entries
        .iter()
        .filter_map(|(id, t)| inst.node_index(id).map(|i| t + inst.nodes[i].delay))
        .max()
        .unwrap_or(0)
}

pub struct OperatorScheduling;

impl Problem for OperatorScheduling {
    type Instance = SchedInstance;
    type Solution = Schedule;

    const ID: ProblemId = ProblemId::OperatorScheduling;
    const SOLVER: &'static str = "alap_list_scheduler";

    fn parse_instance(text: &str) -> Result<SchedInstance, ParseError> {
        parse_instance(text)
    }

    fn parse_solution(_: &SchedInstance, text: &str) -> Result<Schedule, ParseError> {
        parse_schedule(text)
    }

    fn render_solution(s: &Schedule) -> String {
        render_schedule(s)
    }

    fn verify(inst: &SchedInstance, s: &Schedule) -> Vec<Violation> {
        verify_schedule(inst, s)
    }

    fn evaluate(inst: &SchedInstance, s: &Schedule) -> f64 {
        evaluate_schedule(inst, s) as f64
    }

    fn baseline(inst: &SchedInstance) -> Result<Schedule, SolverError> {
        Ok(crate::baselines::scheduling::list_schedule(inst))
    }
}
