//! Exact H/P design by min-cut project selection.
//!
//! Each contact is a project worth `w_ij` that needs residues `i` and `j`;
//! making residue `i` hydrophobic costs `beta * a_i`. The source side of a
//! minimum cut is an optimal selection.

use std::collections::VecDeque;

use crate::problems::protein::GcInstance;

const EPS: f64 = 1e-12;

struct Edge {
    to: usize,
    cap: f64,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: f64) {
        self.adj[u].push(self.edges.len());
        self.edges.push(Edge { to: v, cap });
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { to: u, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > EPS && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    q.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: f64) -> f64 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > EPS && self.level[to] == self.level[u] + 1 {
                let d = self.dfs(to, t, f.min(cap));
                if d > EPS {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= EPS {
                    break;
                }
                flow += f;
            }
        }
    }
}

/// An optimal hydrophobic assignment (true = H). Residues not forced either
/// way stay P.
pub fn optimal_design(inst: &GcInstance) -> Vec<bool> {
    let n = inst.n;
    let m = inst.contacts.len();
    // Nodes: source, sink, residues, contacts.
    let (s, t) = (0, 1);
    let residue = |i: usize| 2 + i;
    let contact = |k: usize| 2 + n + k;
    let mut g = Dinic::new(2 + n + m);
    for (k, &(i, j, w)) in inst.contacts.iter().enumerate() {
        if w > 0.0 {
            g.add(s, contact(k), w);
            g.add(contact(k), residue(i), f64::INFINITY);
            g.add(contact(k), residue(j), f64::INFINITY);
        }
    }
    for (i, &a) in inst.exposure.iter().enumerate() {
        let c = inst.beta * a;
        if c > 0.0 {
            g.add(residue(i), t, c);
        }
    }
    g.max_flow(s, t);
    g.bfs(s);
    (0..n).map(|i| g.level[residue(i)] >= 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::protein::fitness;

    #[test]
    fn single_contact_without_penalty() {
        let inst = GcInstance {
            n: 3,
            contacts: vec![(0, 2, 1.0)],
            exposure: vec![0.0; 3],
            beta: 0.0,
        };
        assert_eq!(optimal_design(&inst), vec![true, false, true]);
    }

    #[test]
    fn all_zero_weights_give_all_polar() {
        let inst = GcInstance {
            n: 4,
            contacts: vec![(0, 1, 0.0), (2, 3, 0.0)],
            exposure: vec![0.0; 4],
            beta: 1.0,
        };
        let h = optimal_design(&inst);
        assert_eq!(h, vec![false; 4]);
        assert_eq!(fitness(&inst, &h), 0.0);
    }

    #[test]
    fn penalty_outweighs_contact() {
        let inst = GcInstance {
            n: 2,
            contacts: vec![(0, 1, 1.0)],
            exposure: vec![0.75, 0.5],
            beta: 1.0,
        };
        assert_eq!(optimal_design(&inst), vec![false, false]);
        let cheap = GcInstance {
            exposure: vec![0.25, 0.5],
            ..inst
        };
        assert_eq!(optimal_design(&cheap), vec![true, true]);
    }
}
