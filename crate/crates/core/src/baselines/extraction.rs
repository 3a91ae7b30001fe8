//! Bottom-up e-graph extraction.
//!
//! Classes are finalised in order of their cheapest completed node, where a
//! node completes once every child class is final (Knuth's generalisation of
//! Dijkstra to superior functions). Children are therefore always finalised
//! before their parents, so the selection is acyclic by construction.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::SolverError;
use crate::problems::egraph::EGraph;

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Chosen node per class for every class the roots need.
pub fn extract(g: &EGraph) -> Result<Vec<Option<usize>>, SolverError> {
    let nc = g.classes.len();
    let distinct_children: Vec<Vec<usize>> = g
        .nodes
        .iter()
        .map(|n| {
            let mut c = n.children.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (i, ch) in distinct_children.iter().enumerate() {
        for &c in ch {
            parents[c].push(i);
        }
    }
    let mut pending: Vec<usize> = distinct_children.iter().map(Vec::len).collect();
    let mut class_cost = vec![f64::INFINITY; nc];
    let mut chosen: Vec<Option<usize>> = vec![None; nc];
    let mut heap = BinaryHeap::new();
    for (i, n) in g.nodes.iter().enumerate() {
        if pending[i] == 0 {
            heap.push(Reverse(Entry(n.cost, i)));
        }
    }
    while let Some(Reverse(Entry(cost, i))) = heap.pop() {
        let c = g.nodes[i].class;
        if chosen[c].is_some() {
            continue;
        }
        chosen[c] = Some(i);
        class_cost[c] = cost;
        for &p in &parents[c] {
            pending[p] -= 1;
            if pending[p] == 0 {
                let total = g.nodes[p].cost + distinct_children[p].iter().map(|&k| class_cost[k]).sum::<f64>();
                heap.push(Reverse(Entry(total, p)));
            }
        }
    }

    let mut selection = vec![None; nc];
    let mut stack = Vec::new();
    for &r in &g.roots {
        if chosen[r].is_none() {
            return Err(SolverError(format!(
                "root class `{}` has no finite extraction",
                g.classes[r].id
            )));
        }
        stack.push(r);
    }
    while let Some(c) = stack.pop() {
        if selection[c].is_some() {
            continue;
        }
        let n = chosen[c].expect("children of finalised nodes are finalised");
        selection[c] = Some(n);
        stack.extend(g.nodes[n].children.iter().copied());
    }
    Ok(selection)
}
