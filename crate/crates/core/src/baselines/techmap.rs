//! Priority-cut LUT mapper.
//!
//! The source network is first decomposed into a subject graph of gates with
//! at most two inputs (input inversions folded into gate tables). Each gate
//! keeps a bounded list of K-feasible cuts ranked by area flow, dominated cuts
//! are dropped, and the cover is extracted backwards from the outputs. Extra
//! passes re-rank cuts using fanout estimates from the previous cover.

use std::collections::{HashMap, HashSet};

use crate::problems::blif::{cover_from_table, table_mask, var_mask, BlifNetwork, Cover, Lit as CubeLit, LogicNode};
use crate::problems::mapping::LUT_K;

/// Cut cap by subject-graph size.
pub fn cut_limit(nodes: usize) -> usize {
    match nodes {
        0..=1500 => 64,
        1501..=3000 => 48,
        3001..=5000 => 32,
        _ => 20,
    }
}

const REFINE_PASSES: usize = 3;

#[derive(Debug, Clone)]
enum Kind {
    Pi,
    Const(bool),
    /// One or two fanins; table bit `a + 2b` holds the output for inputs (a, b).
    Gate { fanins: Vec<usize>, table: u8 },
}

#[derive(Debug)]
struct Subject {
    names: Vec<String>,
    kinds: Vec<Kind>,
}

/// A signal reference with optional inversion.
type Lit = (usize, bool);

struct Builder {
    s: Subject,
    taken: HashSet<String>,
    counter: usize,
    /// Index of the first subject node created for the current source node.
    first_gate: usize,
}

impl Builder {
    fn fresh(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("_m{}", self.counter);
            if !self.taken.contains(&name) {
                self.taken.insert(name.clone());
                return name;
            }
        }
    }

    fn push(&mut self, name: String, kind: Kind) -> usize {
        self.s.names.push(name);
        self.s.kinds.push(kind);
        self.s.names.len() - 1
    }

    /// Two-input gate over literals computing `op` before inversion folding.
    fn gate2(&mut self, a: Lit, b: Lit, op: fn(bool, bool) -> bool) -> usize {
        let mut table = 0u8;
        for bits in 0..4u8 {
            let (x, y) = (bits & 1 == 1, bits & 2 == 2);
            if op(x ^ a.1, y ^ b.1) {
                table |= 1 << bits;
            }
        }
        let name = self.fresh();
        self.push(
            name,
            Kind::Gate {
                fanins: vec![a.0, b.0],
                table,
            },
        )
    }

    fn chain(&mut self, lits: Vec<Lit>, op: fn(bool, bool) -> bool) -> Lit {
        let mut it = lits.into_iter();
        let mut acc = it.next().expect("non-empty literal list");
        for l in it {
            acc = (self.gate2(acc, l, op), false);
        }
        acc
    }

    fn add_node(&mut self, node: &LogicNode, signal: &HashMap<&str, usize>) -> usize {
        let name = node.output.clone();
        if node.inputs.is_empty() || node.cover.rows.iter().any(|r| r.iter().all(|l| *l == CubeLit::DontCare)) {
            // Constant: a tautological cube or no inputs at all.
            let value = if node.inputs.is_empty() {
                node.cover.on_set != node.cover.rows.is_empty()
            } else {
                node.cover.on_set
            };
            return self.push(name, Kind::Const(value));
        }
        if node.cover.rows.is_empty() {
            return self.push(name, Kind::Const(false));
        }
        let mut cubes = Vec::new();
        for row in &node.cover.rows {
            let lits: Vec<Lit> = row
                .iter()
                .zip(&node.inputs)
                .filter_map(|(l, s)| match l {
                    CubeLit::One => Some((signal[s.as_str()], false)),
                    CubeLit::Zero => Some((signal[s.as_str()], true)),
                    CubeLit::DontCare => None,
                })
                .collect();
            cubes.push(self.chain(lits, |x, y| x && y));
        }
        let (root, inv) = self.chain(cubes, |x, y| x || y);
        let inv = inv ^ !node.cover.on_set;
        // Reuse a gate built for this node as its output, else add a buffer.
        if root >= self.first_gate {
            if let Kind::Gate { table, .. } = &mut self.s.kinds[root] {
                if inv {
                    *table ^= 0xF;
                }
                self.taken.remove(&self.s.names[root]);
                self.s.names[root] = name;
                return root;
            }
        }
        let table = if inv { 0b01 } else { 0b10 };
        self.push(
            name,
            Kind::Gate {
                fanins: vec![root],
                table,
            },
        )
    }
}

fn build_subject(net: &BlifNetwork) -> (Subject, HashMap<String, usize>) {
    let order = net.topological_order().expect("source network validated");
    let mut taken: HashSet<String> = net.inputs.iter().cloned().collect();
    taken.extend(net.nodes.iter().map(|n| n.output.clone()));
    let mut b = Builder {
        s: Subject {
            names: Vec::new(),
            kinds: Vec::new(),
        },
        taken,
        counter: 0,
        first_gate: 0,
    };
    let mut signal: HashMap<String, usize> = HashMap::new();
    for pi in &net.inputs {
        let i = b.push(pi.clone(), Kind::Pi);
        signal.insert(pi.clone(), i);
    }
    for idx in order {
        let node = &net.nodes[idx];
        b.first_gate = b.s.names.len();
        let view: HashMap<&str, usize> = signal.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        let i = b.add_node(node, &view);
        signal.insert(node.output.clone(), i);
    }
    (b.s, signal)
}

type Cut = Vec<usize>;

fn merge(a: &[usize], b: &[usize]) -> Option<Cut> {
    let mut out = Vec::with_capacity(LUT_K);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.len() == LUT_K {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.len() <= big.len() && small.iter().all(|x| big.binary_search(x).is_ok())
}

/// Best cut per gate under area flow with the given fanout estimates.
fn select_cuts(s: &Subject, fanout_est: &[f64], limit: usize) -> Vec<Option<Cut>> {
    let n = s.names.len();
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); n];
    let mut flow = vec![0.0f64; n];
    let mut best: Vec<Option<Cut>> = vec![None; n];
    for v in 0..n {
        match &s.kinds[v] {
            Kind::Pi => cuts[v] = vec![vec![v]],
            Kind::Const(_) => cuts[v] = vec![vec![]],
            Kind::Gate { fanins, .. } => {
                let mut cands: Vec<Cut> = vec![vec![]];
                for &f in fanins {
                    let mut next = Vec::new();
                    for c in &cands {
                        for fc in &cuts[f] {
                            if let Some(m) = merge(c, fc) {
                                next.push(m);
                            }
                        }
                    }
                    next.sort();
                    next.dedup();
                    cands = next;
                }
                let leaf_flow = |l: usize| match s.kinds[l] {
                    Kind::Pi | Kind::Const(_) => 0.0,
                    Kind::Gate { .. } => flow[l] / fanout_est[l].max(1.0),
                };
                let mut scored: Vec<(f64, Cut)> = cands
                    .into_iter()
                    .map(|c| (1.0 + c.iter().map(|&l| leaf_flow(l)).sum::<f64>(), c))
                    .collect();
                scored.sort_by(|a, b| {
                    a.0.total_cmp(&b.0)
                        .then(a.1.len().cmp(&b.1.len()))
                        .then_with(|| a.1.cmp(&b.1))
                });
                let mut kept: Vec<(f64, Cut)> = Vec::new();
                for (af, c) in scored {
                    if kept.iter().any(|(_, k)| is_subset(k, &c)) {
                        continue;
                    }
                    kept.push((af, c));
                    if kept.len() == limit {
                        break;
                    }
                }
                let (af, c) = kept.first().cloned().expect("a gate always has its fanin cut");
                flow[v] = af;
                best[v] = Some(c);
                cuts[v] = kept.into_iter().map(|(_, c)| c).collect();
                cuts[v].push(vec![v]);
            }
        }
    }
    best
}

/// Gates used by the cover rooted at `roots`, with their reference counts.
fn extract_cover(s: &Subject, best: &[Option<Cut>], roots: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = s.names.len();
    let mut refs = vec![0usize; n];
    let mut used = vec![false; n];
    let mut stack: Vec<usize> = roots.to_vec();
    while let Some(v) = stack.pop() {
        refs[v] += 1;
        if used[v] {
            continue;
        }
        if let Kind::Gate { .. } = s.kinds[v] {
            used[v] = true;
            for &l in best[v].as_ref().unwrap() {
                if matches!(s.kinds[l], Kind::Gate { .. }) {
                    stack.push(l);
                }
            }
        } else if let Kind::Const(_) = s.kinds[v] {
            used[v] = true;
        }
    }
    let mut cover: Vec<usize> = (0..n).filter(|&v| used[v]).collect();
    cover.sort_unstable();
    (cover, refs)
}

/// Function of `root` over `leaves` as a truth table.
fn cone_table(s: &Subject, root: usize, leaves: &[usize]) -> u64 {
    let mut val: HashMap<usize, u64> = leaves.iter().enumerate().map(|(j, &l)| (l, var_mask(j))).collect();
    fn eval(s: &Subject, v: usize, val: &mut HashMap<usize, u64>) -> u64 {
        if let Some(&x) = val.get(&v) {
            return x;
        }
        let x = match &s.kinds[v] {
            Kind::Pi => panic!("primary input `{}` reached outside the cut", s.names[v]),
            Kind::Const(b) => {
                if *b {
                    !0
                } else {
                    0
                }
            }
            Kind::Gate { fanins, table } => {
                let ins: Vec<u64> = fanins.iter().map(|&f| eval(s, f, val)).collect();
                let mut out = 0u64;
                for bits in 0..(1u8 << ins.len()) {
                    if (table >> bits) & 1 == 0 {
                        continue;
                    }
                    let mut m = !0u64;
                    for (j, &w) in ins.iter().enumerate() {
                        m &= if (bits >> j) & 1 == 1 { w } else { !w };
                    }
                    out |= m;
                }
                out
            }
        };
        val.insert(v, x);
        x
    }
    let table = eval(s, root, &mut val);
    table & table_mask(leaves.len())
}

/// Map `net` onto 6-input LUTs. Never returns more LUTs than the source has
/// nodes when the source is itself a valid mapping.
pub fn map_luts(net: &BlifNetwork) -> BlifNetwork {
    let (s, signal) = build_subject(net);
    let n = s.names.len();
    let limit = cut_limit(n);
    let roots: Vec<usize> = net
        .outputs
        .iter()
        .map(|o| signal[o])
        .filter(|&v| !matches!(s.kinds[v], Kind::Pi))
        .collect();

    let mut fanout = vec![0.0f64; n];
    for k in &s.kinds {
        if let Kind::Gate { fanins, .. } = k {
            for &f in fanins {
                fanout[f] += 1.0;
            }
        }
    }
    for &r in &roots {
        fanout[r] += 1.0;
    }

    let mut best_cover: Option<(Vec<usize>, Vec<Option<Cut>>)> = None;
    for _ in 0..REFINE_PASSES {
        let best = select_cuts(&s, &fanout, limit);
        let (cover, refs) = extract_cover(&s, &best, &roots);
        if best_cover.as_ref().is_none_or(|(c, _)| cover.len() < c.len()) {
            best_cover = Some((cover, best));
        }
        for v in 0..n {
            fanout[v] = (fanout[v] + refs[v] as f64) / 2.0;
        }
    }
    let (cover, best) = best_cover.unwrap();

    let nodes: Vec<LogicNode> = cover
        .iter()
        .map(|&v| match &s.kinds[v] {
            Kind::Const(b) => LogicNode {
                inputs: vec![],
                output: s.names[v].clone(),
                cover: Cover {
                    rows: if *b { vec![vec![]] } else { vec![] },
                    on_set: true,
                },
            },
            _ => {
                let leaves = best[v].as_ref().unwrap();
                let table = cone_table(&s, v, leaves);
                LogicNode {
                    inputs: leaves.iter().map(|&l| s.names[l].clone()).collect(),
                    output: s.names[v].clone(),
                    cover: cover_from_table(table, leaves.len()),
                }
            }
        })
        .collect();
    let mapped = BlifNetwork {
        model: net.model.clone(),
        inputs: net.inputs.clone(),
        outputs: net.outputs.clone(),
        nodes,
    };
    if net.max_fanin() <= LUT_K && net.nodes.len() <= mapped.nodes.len() {
        return net.clone();
    }
    mapped
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::blif::parse_blif;
    use crate::problems::mapping::{tests::FIVE_NODE, verify_mapping};

    fn check(text: &str) -> (BlifNetwork, BlifNetwork) {
        let src = parse_blif(text).unwrap();
        let out = map_luts(&src);
        let v = verify_mapping(&src, &out);
        assert!(v.is_empty(), "{v:?}");
        (src, out)
    }

    #[test]
    fn small_node_is_one_lut() {
        let (_, out) = check(".model m\n.inputs a b c\n.outputs y\n.names a b c y\n1-0 1\n011 1\n.end\n");
        assert_eq!(out.nodes.len(), 1);
    }

    #[test]
    fn eight_input_and_tree_fits_two_luts() {
        let mut s = String::from(".model m\n.inputs a0 a1 a2 a3 a4 a5 a6 a7\n.outputs y\n");
        for i in 0..4 {
            s += &format!(".names a{} a{} p{i}\n11 1\n", 2 * i, 2 * i + 1);
        }
        s += ".names p0 p1 q0\n11 1\n.names p2 p3 q1\n11 1\n.names q0 q1 y\n11 1\n.end\n";
        let (src, out) = check(&s);
        assert_eq!(src.nodes.len(), 7);
        assert!(out.nodes.len() <= 2, "{}", out.nodes.len());
    }

    #[test]
    fn five_node_fixture_shrinks() {
        let (src, out) = check(FIVE_NODE);
        assert!(out.nodes.len() < src.nodes.len());
    }

    #[test]
    fn wide_node_is_decomposed() {
        let (_, out) = check(".model m\n.inputs a b c d e f g h\n.outputs y\n.names a b c d e f g h y\n11111111 1\n0------0 1\n.end\n");
        assert!(out.max_fanin() <= LUT_K);
    }

    #[test]
    fn constants_wires_and_offsets() {
        check(".model m\n.inputs a b\n.outputs y z w a\n.names y\n1\n.names z\n.names a b w\n11 0\n.end\n");
        check(".model m\n.inputs a b\n.outputs y\n.names a b t\n-- 1\n.names t a y\n11 1\n.end\n");
        check(".model m\n.inputs a\n.outputs y z\n.names a y\n1 1\n.names y z\n0 1\n.end\n");
    }

    #[test]
    fn cut_limits() {
        assert_eq!(cut_limit(10), 64);
        assert_eq!(cut_limit(2000), 48);
        assert_eq!(cut_limit(4000), 32);
        assert_eq!(cut_limit(6000), 20);
    }
}
