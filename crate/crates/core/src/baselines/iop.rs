//! Cheapest strategy per node, then greedy repair of memory overflows and a
//! first-improvement pass over single-node changes.

use crate::error::SolverError;
use crate::problems::compilers::iop::{assignment_cost, memory_profile, IopGraph};

fn peak_ok(g: &IopGraph, picks: &[usize]) -> bool {
    memory_profile(g, picks).iter().all(|&(_, m)| m <= g.budget)
}

fn first_overflow(g: &IopGraph, picks: &[usize]) -> Option<i64> {
    memory_profile(g, picks)
        .into_iter()
        .find(|&(_, m)| m > g.budget)
        .map(|(t, _)| t)
}

pub fn assign(g: &IopGraph) -> Result<Vec<usize>, SolverError> {
    let mut picks: Vec<usize> = g
        .nodes
        .iter()
        .map(|n| {
            (0..n.strategies.len())
                .min_by(|&a, &b| n.strategies[a].cost.total_cmp(&n.strategies[b].cost).then(a.cmp(&b)))
                .unwrap()
        })
        .collect();

    // Repair: at the earliest overflowing time, apply the change with the
    // lowest extra cost per byte saved.
    while let Some(t) = first_overflow(g, &picks) {
        let base = assignment_cost(g, &picks);
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, n) in g.nodes.iter().enumerate() {
            if !(n.interval[0] <= t && t < n.interval[1]) {
                continue;
            }
            let cur = n.strategies[picks[i]].usage;
            for (s, st) in n.strategies.iter().enumerate() {
                if st.usage >= cur {
                    continue;
                }
                let old = picks[i];
                picks[i] = s;
                let delta = assignment_cost(g, &picks) - base;
                picks[i] = old;
                let score = delta / (cur - st.usage) as f64;
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, i, s));
                }
            }
        }
        let (_, i, s) = best.ok_or_else(|| SolverError(format!("memory budget cannot be met at t={t}")))?;
        picks[i] = s;
    }

    // Improvement: accept any cheaper feasible single-node change.
    loop {
        let mut improved = false;
        for i in 0..g.nodes.len() {
            let base = assignment_cost(g, &picks);
            let old = picks[i];
            let mut best = (base, old);
            for s in 0..g.nodes[i].strategies.len() {
                picks[i] = s;
                let c = assignment_cost(g, &picks);
                if c < best.0 - 1e-12 && peak_ok(g, &picks) {
                    best = (c, s);
                }
            }
            picks[i] = best.1;
            improved |= best.1 != old;
        }
        if !improved {
            return Ok(picks);
        }
    }
}
