//! E-graph extraction: pick one e-node for every needed e-class so the
//! selection is closed under children and acyclic; cost is the DAG cost.
//!
//! Instance JSON:
//!
//! ```json
//! {"classes": {"c0": ["n0", "n1"], "c1": ["n2"]},
//!  "nodes": {"n0": {"cost": 1, "children": ["c1"]}, "n1": {"cost": 4, "children": []},
//!            "n2": {"cost": 1, "children": []}},
//!  "roots": ["c0"]}
//! ```
//!
//! Solution: one `class_id node_id` line per selected class.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq)]
pub struct ENode {
    pub id: String,
    pub class: usize,
    pub cost: f64,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EClass {
    pub id: String,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EGraph {
    pub classes: Vec<EClass>,
    pub nodes: Vec<ENode>,
    pub roots: Vec<usize>,
    class_index: HashMap<String, usize>,
    node_index: HashMap<String, usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    cost: f64,
    #[serde(default)]
    children: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    classes: BTreeMap<String, Vec<String>>,
    nodes: BTreeMap<String, RawNode>,
    roots: Vec<String>,
}

impl EGraph {
    pub fn class_id(&self, id: &str) -> Option<usize> {
        self.class_index.get(id).copied()
    }

    pub fn node_id(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    /// Build from (class members, node (cost, children)) tables of indices.
    pub fn from_parts(classes: Vec<Vec<usize>>, nodes: Vec<(f64, Vec<usize>)>, roots: Vec<usize>) -> EGraph {
        let mut class_of = vec![usize::MAX; nodes.len()];
        for (c, members) in classes.iter().enumerate() {
            for &n in members {
                class_of[n] = c;
            }
        }
        let classes: Vec<EClass> = classes
            .into_iter()
            .enumerate()
            .map(|(c, nodes)| EClass {
                id: format!("c{c}"),
                nodes,
            })
            .collect();
        let nodes: Vec<ENode> = nodes
            .into_iter()
            .enumerate()
            .map(|(i, (cost, children))| ENode {
                id: format!("n{i}"),
                class: class_of[i],
                cost,
                children,
            })
            .collect();
        EGraph {
            class_index: classes.iter().enumerate().map(|(i, c)| (c.id.clone(), i)).collect(),
            node_index: nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect(),
            classes,
            nodes,
            roots,
        }
    }

    pub fn to_json(&self) -> String {
        let classes: BTreeMap<&str, Vec<&str>> = self
            .classes
            .iter()
            .map(|c| (c.id.as_str(), c.nodes.iter().map(|&n| self.nodes[n].id.as_str()).collect()))
            .collect();
        let nodes: BTreeMap<&str, serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| {
                let children: Vec<&str> = n.children.iter().map(|&c| self.classes[c].id.as_str()).collect();
                (n.id.as_str(), serde_json::json!({"cost": n.cost, "children": children}))
            })
            .collect();
        let roots: Vec<&str> = self.roots.iter().map(|&r| self.classes[r].id.as_str()).collect();
        serde_json::to_string_pretty(&serde_json::json!({"classes": classes, "nodes": nodes, "roots": roots})).unwrap()
    }
}

pub fn parse_egraph(text: &str) -> Result<EGraph, ParseError> {
    let raw: RawGraph = serde_json::from_str(text)?;
    let class_index: HashMap<String, usize> = raw.classes.keys().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let node_index: HashMap<String, usize> = raw.nodes.keys().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let mut class_of: Vec<Option<usize>> = vec![None; raw.nodes.len()];
    let mut classes = Vec::with_capacity(raw.classes.len());
    for (ci, (cid, members)) in raw.classes.iter().enumerate() {
        let mut idx = Vec::with_capacity(members.len());
        for m in members {
            let &n = node_index
                .get(m)
                .ok_or_else(|| ParseError::new(format!("class `{cid}` lists unknown node `{m}`")))?;
            if class_of[n].replace(ci).is_some() {
                return Err(ParseError::new(format!("node `{m}` belongs to more than one class")));
            }
            idx.push(n);
        }
        if idx.is_empty() {
            return Err(ParseError::new(format!("class `{cid}` is empty")));
        }
        classes.push(EClass {
            id: cid.clone(),
            nodes: idx,
        });
    }
    let mut nodes = Vec::with_capacity(raw.nodes.len());
    for (ni, (nid, rn)) in raw.nodes.iter().enumerate() {
        if !(rn.cost.is_finite() && rn.cost >= 0.0) {
            return Err(ParseError::new(format!("node `{nid}` has invalid cost {}", rn.cost)));
        }
        let class = class_of[ni].ok_or_else(|| ParseError::new(format!("node `{nid}` belongs to no class")))?;
        let children = rn
            .children
            .iter()
            .map(|c| {
                class_index
                    .get(c)
                    .copied()
                    .ok_or_else(|| ParseError::new(format!("node `{nid}` references unknown class `{c}`")))
            })
            .collect::<Result<_, _>>()?;
        nodes.push(ENode {
            id: nid.clone(),
            class,
            cost: rn.cost,
            children,
        });
    }
    if raw.roots.is_empty() {
        return Err(ParseError::new("e-graph has no roots"));
    }
    let roots = raw
        .roots
        .iter()
        .map(|r| {
            class_index
                .get(r)
                .copied()
                .ok_or_else(|| ParseError::new(format!("unknown root class `{r}`")))
        })
        .collect::<Result<_, _>>()?;
    Ok(EGraph {
        classes,
        nodes,
        roots,
        class_index,
        node_index,
    })
}

/// Raw `class node` pairs as written by the candidate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    pub pairs: Vec<(String, String)>,
}

impl Selection {
    pub fn from_choice(g: &EGraph, choice: &[Option<usize>]) -> Selection {
        Selection {
            pairs: choice
                .iter()
                .enumerate()
                .filter_map(|(c, n)| n.map(|n| (g.classes[c].id.clone(), g.nodes[n].id.clone())))
                .collect(),
        }
    }
}

pub fn parse_selection(text: &str) -> Result<Selection, ParseError> {
    let mut pairs = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [c, n] = toks.as_slice() else {
            return Err(ParseError::at_line(ln, format!("expected `class_id node_id`, got `{line}`")));
        };
        pairs.push((c.to_string(), n.to_string()));
    }
    if pairs.is_empty() {
        return Err(ParseError::new("empty selection"));
    }
    Ok(Selection { pairs })
}

pub fn render_selection(sel: &Selection) -> String {
    let mut s = String::new();
    for (c, n) in &sel.pairs {
        writeln!(s, "{c} {n}").unwrap();
    }
    s
}

/// Resolve a selection to a per-class choice, collecting naming violations.
fn resolve(g: &EGraph, sel: &Selection, v: &mut Vec<Violation>) -> Vec<Option<usize>> {
    let mut choice = vec![None; g.classes.len()];
    for (c, n) in &sel.pairs {
        let Some(ci) = g.class_id(c) else {
            v.push(Violation::new("unknown class", format!("class `{c}` does not exist")));
            continue;
        };
        let Some(ni) = g.node_id(n) else {
            v.push(Violation::new("unknown node", format!("node `{n}` does not exist")));
            continue;
        };
        if g.nodes[ni].class != ci {
            v.push(Violation::new(
                "membership",
                format!("node `{n}` is not a member of class `{c}`"),
            ));
            continue;
        }
        if choice[ci].replace(ni).is_some() {
            v.push(Violation::new("duplicate", format!("class `{c}` selected more than once")));
        }
    }
    choice
}

/// Structural checks over a resolved per-class choice.
pub fn check_choice(g: &EGraph, choice: &[Option<usize>]) -> Vec<Violation> {
    let mut v = Vec::new();
    for &r in &g.roots {
        if choice[r].is_none() {
            v.push(Violation::new("root", format!("root class `{}` is not selected", g.classes[r].id)));
        }
    }
    for (c, n) in choice.iter().enumerate() {
        let Some(n) = *n else { continue };
        for &child in &g.nodes[n].children {
            if choice[child].is_none() {
                v.push(Violation::new(
                    "closure",
                    format!(
                        "class `{}` (node `{}`) needs child class `{}`, which is not selected",
                        g.classes[c].id, g.nodes[n].id, g.classes[child].id
                    ),
                ));
            }
        }
    }
    // Cycle detection on selected class -> child class edges (iterative DFS).
    let k = g.classes.len();
    let mut state = vec![0u8; k];
    for start in 0..k {
        if choice[start].is_none() || state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (c, ref mut i)) = stack.last_mut() {
            let children = &g.nodes[choice[c].unwrap()].children;
            if *i < children.len() {
                let ch = children[*i];
                *i += 1;
                if choice[ch].is_none() {
                    continue;
                }
                match state[ch] {
                    0 => {
                        state[ch] = 1;
                        stack.push((ch, 0));
                    }
                    1 => {
                        v.push(Violation::new(
                            "cycle",
                            format!("selection is cyclic through class `{}`", g.classes[ch].id),
                        ));
                        return v;
                    }
                    _ => {}
                }
            } else {
                state[c] = 2;
                stack.pop();
            }
        }
    }
    v
}

pub fn verify_extraction(g: &EGraph, sel: &Selection) -> Vec<Violation> {
    let mut v = Vec::new();
    let choice = resolve(g, sel, &mut v);
    v.extend(check_choice(g, &choice));
    v
}

pub fn choice_cost(g: &EGraph, choice: &[Option<usize>]) -> f64 {
    choice.iter().flatten().map(|&n| g.nodes[n].cost).sum()
}

pub fn evaluate_extraction(g: &EGraph, sel: &Selection) -> f64 {
    let choice = resolve(g, sel, &mut Vec::new());
    choice_cost(g, &choice)
}

pub struct EgraphExtraction;

impl Problem for EgraphExtraction {
    type Instance = EGraph;
    type Solution = Selection;

    const ID: ProblemId = ProblemId::EgraphExtraction;
    const SOLVER: &'static str = "bottom_up_extractor";

    fn parse_instance(text: &str) -> Result<EGraph, ParseError> {
        parse_egraph(text)
    }

    fn parse_solution(_: &EGraph, text: &str) -> Result<Selection, ParseError> {
        parse_selection(text)
    }

    fn render_solution(solution: &Selection) -> String {
        render_selection(solution)
    }

    fn verify(instance: &EGraph, solution: &Selection) -> Vec<Violation> {
        verify_extraction(instance, solution)
    }

    fn evaluate(instance: &EGraph, solution: &Selection) -> f64 {
        evaluate_extraction(instance, solution)
    }

    fn baseline(instance: &EGraph) -> Result<Selection, SolverError> {
        crate::baselines::extraction::extract(instance).map(|c| Selection::from_choice(instance, &c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(text: &str) -> Selection {
        parse_selection(text).unwrap()
    }

    #[test]
    fn chain_with_cheapest_nodes() {
        // root c0 -> c1 -> c2 (leaf)
        let g = EGraph::from_parts(
            vec![vec![0, 1], vec![2], vec![3]],
            vec![(1.0, vec![1]), (5.0, vec![]), (2.0, vec![2]), (3.0, vec![])],
            vec![0],
        );
        let s = sel("c0 n0\nc1 n2\nc2 n3\n");
        assert!(verify_extraction(&g, &s).is_empty());
        assert_eq!(evaluate_extraction(&g, &s), 6.0);
        let leaf_only = sel("c0 n1\n");
        assert!(verify_extraction(&g, &leaf_only).is_empty());
        assert_eq!(evaluate_extraction(&g, &leaf_only), 5.0);
    }

    #[test]
    fn self_cycle_is_rejected() {
        let g = EGraph::from_parts(vec![vec![0, 1]], vec![(1.0, vec![0]), (2.0, vec![])], vec![0]);
        let v = verify_extraction(&g, &sel("c0 n0\n"));
        assert_eq!(v.iter().map(|v| v.kind).collect::<Vec<_>>(), vec!["cycle"]);
    }

    #[test]
    fn missing_grandchild_breaks_closure() {
        let g = EGraph::from_parts(
            vec![vec![0], vec![1], vec![2]],
            vec![(1.0, vec![1]), (1.0, vec![2]), (1.0, vec![])],
            vec![0],
        );
        let v = verify_extraction(&g, &sel("c0 n0\nc1 n1\n"));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, "closure");
        assert!(v[0].message.contains("`c2`"));
    }

    #[test]
    fn diamond_counts_shared_leaf_once() {
        // c0 -> (c1, c2), both -> c3 (cost 5)
        let g = EGraph::from_parts(
            vec![vec![0], vec![1], vec![2], vec![3]],
            vec![(1.0, vec![1, 2]), (1.0, vec![3]), (1.0, vec![3]), (5.0, vec![])],
            vec![0],
        );
        let s = sel("c0 n0\nc1 n1\nc2 n2\nc3 n3\n");
        assert!(verify_extraction(&g, &s).is_empty());
        assert_eq!(evaluate_extraction(&g, &s), 8.0);
    }

    #[test]
    fn single_zero_cost_node() {
        let g = EGraph::from_parts(vec![vec![0]], vec![(0.0, vec![])], vec![0]);
        assert_eq!(evaluate_extraction(&g, &sel("c0 n0")), 0.0);
    }

    #[test]
    fn naming_violations() {
        let g = EGraph::from_parts(vec![vec![0], vec![1]], vec![(1.0, vec![]), (1.0, vec![])], vec![0]);
        let kinds = |s: &str| verify_extraction(&g, &sel(s)).iter().map(|v| v.kind).collect::<Vec<_>>();
        assert!(kinds("c0 n1\n").contains(&"membership"));
        assert!(kinds("c9 n0\n").contains(&"unknown class"));
        assert!(kinds("c0 n9\n").contains(&"unknown node"));
        assert!(kinds("c0 n0\nc0 n0\n").contains(&"duplicate"));
        assert_eq!(kinds("c1 n1\n"), vec!["root"]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = EGraph::from_parts(vec![vec![0, 1], vec![2]], vec![(1.0, vec![1]), (2.0, vec![]), (0.5, vec![])], vec![0]);
        let back = parse_egraph(&g.to_json()).unwrap();
        assert_eq!(back.nodes.len(), 3);
        assert_eq!(back.roots, vec![0]);
        assert!(parse_egraph(r#"{"classes":{"a":["x"]},"nodes":{"x":{"cost":1,"children":["b"]}},"roots":["a"]}"#).is_err());
        assert!(parse_egraph(r#"{"classes":{"a":["x"],"b":["x"]},"nodes":{"x":{"cost":1}},"roots":["a"]}"#).is_err());
        assert!(parse_egraph(r#"{"classes":{"a":["x"]},"nodes":{"x":{"cost":-1}},"roots":["a"]}"#).is_err());
        assert!(parse_egraph(r#"{"classes":{"a":["x"]},"nodes":{"x":{"cost":1}},"roots":[]}"#).is_err());
    }
}
