//! Resource-constrained list scheduling ordered by ALAP start time.

use crate::problems::scheduling::{SchedInstance, Schedule};

/// Latest start of every node in an unconstrained schedule of minimum length.
pub fn alap_starts(inst: &SchedInstance) -> Vec<u64> {
    let order = inst.topological_order().expect("instance is acyclic");
    let succs = inst.successors();
    let n = inst.nodes.len();
    // tail[i]: longest path from the start of i to the end of the graph.
    let mut tail = vec![0u64; n];
    for &u in order.iter().rev() {
        let after = succs[u].iter().map(|&v| tail[v]).max().unwrap_or(0);
        tail[u] = inst.nodes[u].delay + after;
    }
    let length = tail.iter().copied().max().unwrap_or(0);
    tail.iter().map(|&t| length - t).collect()
}

pub fn list_schedule(inst: &SchedInstance) -> Schedule {
    let n = inst.nodes.len();
    let alap = alap_starts(inst);
    let preds = inst.predecessors();
    let mut start: Vec<Option<u64>> = vec![None; n];
    let mut finish = vec![0u64; n];
    // Running operations per resource as finish times.
    let mut running: std::collections::BTreeMap<&str, Vec<u64>> = Default::default();
    let mut priority: Vec<usize> = (0..n).collect();
    priority.sort_by_key(|&i| (alap[i], i));
    let mut done = 0;
    let mut t = 0u64;
    while done < n {
        for &i in &priority {
            if start[i].is_some() {
                continue;
            }
            let ready = preds[i].iter().all(|&p| start[p].is_some() && finish[p] <= t);
            if !ready {
                continue;
            }
            let res = inst.nodes[i].resource.as_str();
            let busy = running.entry(res).or_default();
            busy.retain(|&f| f > t);
            if (busy.len() as u64) < inst.availability_of(i) {
                start[i] = Some(t);
                finish[i] = t + inst.nodes[i].delay;
                busy.push(finish[i]);
                done += 1;
            }
        }
        t += 1;
    }
    let starts: Vec<u64> = start.into_iter().map(Option::unwrap).collect();
    Schedule::from_starts(inst, &starts)
}
