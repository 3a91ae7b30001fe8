//! Seeded generators for synthetic instances of every problem, used to build
//! the bundled suite and by randomized tests.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::problems::egraph::EGraph;

pub type SynthRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SynthRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Dataflow graph with `n` operations; each takes up to two operands from
/// the previous `window` operations.
pub fn scheduling(r: &mut SynthRng, name: &str, n: usize, window: usize, max_units: u64) -> String {
    const OPS: [(&str, u64); 4] = [("add", 1), ("sub", 1), ("mul", 3), ("div", 4)];
    let types: Vec<&str> = (0..n).map(|_| OPS[r.gen_range(0..OPS.len())].0).collect();
    let mut edges = Vec::new();
    for j in 1..n {
        let lo = j.saturating_sub(window);
        let k = r.gen_range(0..=2.min(j - lo));
        let mut preds: Vec<usize> = (lo..j).collect();
        preds.shuffle(r);
        for (slot, &p) in preds[..k].iter().enumerate() {
            edges.push(json!([format!("n{p}"), format!("n{j}"), if slot == 0 { "lhs" } else { "rhs" }]));
        }
    }
    let delay: serde_json::Map<_, _> = OPS.iter().map(|&(t, d)| (t.to_string(), json!(d))).collect();
    let resource: serde_json::Map<_, _> = OPS.iter().map(|&(t, _)| (t.to_string(), json!(r.gen_range(1..=max_units)))).collect();
    let nodes: Vec<_> = types.iter().enumerate().map(|(i, t)| json!([format!("n{i}"), t])).collect();
    serde_json::to_string_pretty(&json!({
        "name": name, "delay": delay, "resource": resource, "nodes": nodes, "edges": edges,
    }))
    .unwrap()
        + "\n"
}

fn blif(model: &str, inputs: &[String], outputs: &[String], nodes: &[(Vec<String>, String, Vec<String>)]) -> String {
    let mut s = format!(".model {model}\n.inputs {}\n.outputs {}\n", inputs.join(" "), outputs.join(" "));
    for (ins, out, rows) in nodes {
        writeln!(s, ".names {} {out}", ins.join(" ")).unwrap();
        for row in rows {
            writeln!(s, "{row}").unwrap();
        }
    }
    s.push_str(".end\n");
    s
}

fn unused_outputs(n_pi: usize, nodes: &[(Vec<String>, String, Vec<String>)]) -> Vec<String> {
    let used: std::collections::HashSet<&str> = nodes.iter().flat_map(|(i, _, _)| i.iter().map(String::as_str)).collect();
    let _ = n_pi;
    nodes.iter().map(|(_, o, _)| o).filter(|o| !used.contains(o.as_str())).cloned().collect()
}

/// Random logic network of 2..=`max_fanin`-input gates (and/or/xor/mux),
/// mostly drawing operands from recent signals.
pub fn random_network(r: &mut SynthRng, model: &str, n_pi: usize, n: usize, max_fanin: usize) -> String {
    let inputs: Vec<String> = (0..n_pi).map(|i| format!("pi{i}")).collect();
    let mut sigs = inputs.clone();
    let mut nodes = Vec::new();
    for k in 0..n {
        let fan = r.gen_range(2..=max_fanin);
        let pool: Vec<String> = if r.gen_bool(0.7) { sigs[sigs.len().saturating_sub(12)..].to_vec() } else { sigs.clone() };
        let ins: Vec<String> = pool.choose_multiple(r, fan.min(pool.len())).cloned().collect();
        let kind = r.gen_range(0..4);
        let w = ins.len();
        let mut rows = Vec::new();
        for m in 0..1usize << w {
            let bits: Vec<bool> = (0..w).map(|t| m >> t & 1 == 1).collect();
            let v = match kind {
                0 => bits.iter().all(|&b| b),
                1 => bits.iter().any(|&b| b),
                2 => bits.iter().filter(|&&b| b).count() % 2 == 1,
                _ => {
                    if bits[0] {
                        bits[1]
                    } else {
                        bits[w - 1]
                    }
                }
            };
            if v {
                rows.push(format!("{} 1", bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()));
            }
        }
        if rows.is_empty() {
            rows.push(format!("{} 1", "1".repeat(w)));
        }
        let out = format!("n{k}");
        sigs.push(out.clone());
        nodes.push((ins, out, rows));
    }
    blif(model, &inputs, &unused_outputs(n_pi, &nodes), &nodes)
}

/// Array multiplier of two `n`-bit operands built from 2-input gates.
pub fn multiplier(n: usize) -> String {
    let mut nodes: Vec<(Vec<String>, String, Vec<String>)> = Vec::new();
    let mut gate = |kind: &str, ins: [&str; 2]| -> String {
        let name = format!("g{}", nodes.len() + 1);
        let rows = match kind {
            "and" => vec!["11 1"],
            "xor" => vec!["10 1", "01 1"],
            _ => vec!["1- 1", "-1 1"],
        };
        nodes.push((ins.iter().map(|s| s.to_string()).collect(), name.clone(), rows.into_iter().map(String::from).collect()));
        name
    };
    let mut cols: Vec<Vec<String>> = vec![Vec::new(); 2 * n];
    for j in 0..n {
        for i in 0..n {
            let p = gate("and", [&format!("a{i}"), &format!("b{j}")]);
            cols[i + j].push(p);
        }
    }
    let mut outputs = Vec::new();
    for c in 0..2 * n {
        while cols[c].len() > 1 {
            let carry = if cols[c].len() >= 3 {
                let x = cols[c].remove(0);
                let y = cols[c].remove(0);
                let z = cols[c].remove(0);
                let t = gate("xor", [&x, &y]);
                let s = gate("xor", [&t, &z]);
                let a1 = gate("and", [&x, &y]);
                let a2 = gate("and", [&t, &z]);
                let co = gate("or", [&a1, &a2]);
                cols[c].push(s);
                co
            } else {
                let x = cols[c].remove(0);
                let y = cols[c].remove(0);
                let s = gate("xor", [&x, &y]);
                let co = gate("and", [&x, &y]);
                cols[c].push(s);
                co
            };
            if c + 1 < 2 * n {
                cols[c + 1].push(carry);
            }
        }
        if let Some(s) = cols[c].first() {
            outputs.push(s.clone());
        }
    }
    let inputs: Vec<String> = (0..n).map(|i| format!("a{i}")).chain((0..n).map(|i| format!("b{i}"))).collect();
    blif(&format!("mult{n}"), &inputs, &outputs, &nodes)
}

/// Narrow, deep network: every node reads two of the last `window` signals.
/// Exhaustive cut enumeration on these blows up quickly.
pub fn mesh(r: &mut SynthRng, model: &str, n_pi: usize, n: usize, window: usize) -> String {
    const COVERS: [&[&str]; 4] = [&["11 1"], &["10 1", "01 1"], &["1- 1", "-1 1"], &["00 1"]];
    let inputs: Vec<String> = (0..n_pi).map(|i| format!("pi{i}")).collect();
    let mut sigs = inputs.clone();
    let mut nodes = Vec::new();
    for k in 0..n {
        let pool = &sigs[sigs.len().saturating_sub(window)..];
        let ins: Vec<String> = pool.choose_multiple(r, 2).cloned().collect();
        let rows = COVERS[r.gen_range(0..COVERS.len())].iter().map(|s| s.to_string()).collect();
        let out = format!("n{k}");
        sigs.push(out.clone());
        nodes.push((ins, out, rows));
    }
    blif(model, &inputs, &unused_outputs(n_pi, &nodes), &nodes)
}

/// Routing grid with alternating layer directions and `nets` nets of 2..=4
/// pins on layer 0, each pin set clustered in a box of side `spread`.
pub fn routing(r: &mut SynthRng, x: usize, y: usize, layers: usize, capacity: u32, nets: usize, spread: usize) -> String {
    let mut s = format!("grid {x} {y} {layers}\n");
    for l in 0..layers {
        writeln!(s, "layer {l} {}", if l % 2 == 0 { "H" } else { "V" }).unwrap();
    }
    writeln!(s, "capacity {capacity}").unwrap();
    // A few congested edges.
    for _ in 0..(x * y / 16).max(1) {
        let l = r.gen_range(0..layers);
        let (cx, cy) = if l % 2 == 0 { (r.gen_range(0..x - 1), r.gen_range(0..y)) } else { (r.gen_range(0..x), r.gen_range(0..y - 1)) };
        writeln!(s, "cap {cx} {cy} {l} {}", r.gen_range(0..capacity)).unwrap();
    }
    for k in 0..nets {
        writeln!(s, "net net{k}").unwrap();
        let (bx, by) = (r.gen_range(0..x), r.gen_range(0..y));
        let mut pins = std::collections::BTreeSet::new();
        let want = r.gen_range(2..=4);
        while pins.len() < want {
            let px = (bx + r.gen_range(0..=spread)).min(x - 1);
            let py = (by + r.gen_range(0..=spread)).min(y - 1);
            pins.insert((px, py));
        }
        for (px, py) in pins {
            writeln!(s, "pin {px} {py} 0").unwrap();
        }
        s.push_str("end\n");
    }
    s
}

/// E-graph over `classes` classes. Each class's first node only points to
/// higher-numbered classes, so every class has an acyclic completion; later
/// nodes may point backwards and create cycles.
pub fn egraph(r: &mut SynthRng, classes: usize, max_nodes_per_class: usize, back_prob: f64) -> EGraph {
    let mut members = Vec::with_capacity(classes);
    let mut nodes: Vec<(f64, Vec<usize>)> = Vec::new();
    for c in 0..classes {
        let k = r.gen_range(1..=max_nodes_per_class);
        let mut ids = Vec::with_capacity(k);
        for j in 0..k {
            let arity = if c + 1 >= classes { 0 } else { r.gen_range(0..=2usize.min(classes - c - 1)) };
            let mut children: Vec<usize> = (0..arity).map(|_| r.gen_range(c + 1..classes)).collect();
            if j > 0 && c > 0 && r.gen_bool(back_prob) {
                children.push(r.gen_range(0..c));
            }
            children.dedup();
            ids.push(nodes.len());
            nodes.push((r.gen_range(0..=10) as f64, children));
        }
        members.push(ids);
    }
    let roots = if classes > 3 && r.gen_bool(0.5) { vec![0, 1] } else { vec![0] };
    EGraph::from_parts(members, nodes, roots)
}

/// Memory-constrained strategy selection over `n` nodes alive during
/// random intervals within `[0, horizon)`.
pub fn iop(r: &mut SynthRng, n: usize, horizon: i64, edges: usize, tightness: f64) -> String {
    let mut nodes = Vec::new();
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for _ in 0..n {
        let lo = r.gen_range(0..horizon);
        let hi = (lo + r.gen_range(1..=(horizon / 3).max(1))).min(horizon);
        let k = r.gen_range(2..=4);
        // More parallel strategies are faster but need more memory.
        let mut strategies = Vec::new();
        let mut usage = r.gen_range(1..=4) * 256u64;
        let mut cost = r.gen_range(8..=16) as f64;
        let mut min_u = u64::MAX;
        let mut max_u = 0;
        for _ in 0..k {
            strategies.push(json!({"cost": cost, "usage": usage}));
            min_u = min_u.min(usage);
            max_u = max_u.max(usage);
            usage += r.gen_range(1..=4) * 256;
            cost = (cost - r.gen_range(1..=4) as f64 * 0.5).max(0.5);
        }
        nodes.push((lo, hi, strategies));
        lows.push(min_u);
        highs.push(max_u);
    }
    let peak = |use_of: &dyn Fn(usize) -> u64| -> u64 {
        (0..horizon)
            .map(|t| (0..n).filter(|&i| nodes[i].0 <= t && t < nodes[i].1).map(use_of).sum())
            .max()
            .unwrap_or(0)
    };
    let floor = peak(&|i| lows[i]);
    let ceil = peak(&|i| highs[i]);
    let budget = floor + ((ceil - floor) as f64 * tightness) as u64;
    let mut es = Vec::new();
    for _ in 0..edges {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u == v {
            continue;
        }
        let (ku, kv) = (nodes[u].2.len(), nodes[v].2.len());
        let matrix: Vec<Vec<f64>> = (0..ku).map(|a| (0..kv).map(|b| if a == b { 0.0 } else { r.gen_range(1..=6) as f64 * 0.5 }).collect()).collect();
        es.push(json!({"nodes": [u, v], "matrix": matrix}));
    }
    let nodes: Vec<_> = nodes.into_iter().map(|(lo, hi, s)| json!({"interval": [lo, hi], "strategies": s})).collect();
    serde_json::to_string_pretty(&json!({"budget": budget, "nodes": nodes, "edges": es})).unwrap() + "\n"
}

/// Contact map of a compact chain: residues close in sequence or placed
/// near each other on a random walk are in contact. Weights and exposures
/// are multiples of 1/4 so sums are exact.
pub fn protein(r: &mut SynthRng, n: usize, beta: f64) -> String {
    let mut pos = vec![(0i64, 0i64, 0i64)];
    for _ in 1..n {
        let (x, y, z) = *pos.last().unwrap();
        let step = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)][r.gen_range(0..6)];
        pos.push((x + step.0, y + step.1, z + step.2));
    }
    let mut contacts = Vec::new();
    for i in 0..n {
        for j in i + 3..n {
            let d = (pos[i].0 - pos[j].0).abs() + (pos[i].1 - pos[j].1).abs() + (pos[i].2 - pos[j].2).abs();
            if d <= 2 {
                contacts.push(json!([i, j, r.gen_range(1..=8) as f64 * 0.25]));
            }
        }
    }
    let exposure: Vec<f64> = (0..n).map(|_| r.gen_range(0..=8) as f64 * 0.25).collect();
    serde_json::to_string_pretty(&json!({"n": n, "contacts": contacts, "exposure": exposure, "beta": beta})).unwrap() + "\n"
}

/// Pedigree of `n` individuals over `alleles` alleles. True genotypes follow
/// inheritance; each observation is dropped with `missing` probability and
/// corrupted with `error` probability.
pub fn pedigree(r: &mut SynthRng, n: usize, founders: usize, alleles: u32, missing: f64, error: f64) -> String {
    let mut truth: Vec<(u32, u32)> = Vec::new();
    let mut people = Vec::new();
    for i in 0..n {
        let id = i as u32 + 1;
        let (f, m, g) = if i < founders.max(2) {
            (0, 0, (r.gen_range(1..=alleles), r.gen_range(1..=alleles)))
        } else {
            let f = r.gen_range(0..i);
            let mut m = r.gen_range(0..i);
            while m == f {
                m = r.gen_range(0..i);
            }
            let pick = |r: &mut SynthRng, g: (u32, u32)| if r.gen_bool(0.5) { g.0 } else { g.1 };
            let g = (pick(r, truth[f]), pick(r, truth[m]));
            (f as u32 + 1, m as u32 + 1, g)
        };
        truth.push(g);
        let observed = if r.gen_bool(missing) {
            serde_json::Value::Null
        } else if r.gen_bool(error) {
            let (a, b) = (r.gen_range(1..=alleles), r.gen_range(1..=alleles));
            json!([a.min(b), a.max(b)])
        } else {
            json!([g.0.min(g.1), g.0.max(g.1)])
        };
        people.push(json!({"id": id, "father": f, "mother": m, "genotype": observed}));
    }
    serde_json::to_string_pretty(&json!({"alleles": alleles, "individuals": people})).unwrap() + "\n"
}

/// Flight schedule built from `pairings` hidden legal rotations, so a
/// feasible cover always exists.
pub fn crew(r: &mut SynthRng, pairings: usize, bases: &[&str], airports: &[&str]) -> String {
    let mut flights = Vec::new();
    for _ in 0..pairings {
        let base = bases[r.gen_range(0..bases.len())];
        let legs = r.gen_range(2..=4);
        let mut t = r.gen_range(300..=600);
        let mut at = base;
        for leg in 0..legs {
            let to = if leg + 1 == legs {
                base
            } else {
                let choices: Vec<&&str> = airports.iter().filter(|a| **a != at).collect();
                choices[r.gen_range(0..choices.len())]
            };
            let dur = r.gen_range(45..=120);
            flights.push((at.to_string(), to.to_string(), t, t + dur));
            t += dur + r.gen_range(30..=90);
            at = to;
        }
    }
    flights.sort_by(|a, b| (a.2, a.3, &a.0, &a.1).cmp(&(b.2, b.3, &b.0, &b.1)));
    let flights: Vec<_> = flights
        .iter()
        .enumerate()
        .map(|(i, (f, to, d, a))| json!({"id": format!("F{:03}", i + 1), "from": f, "to": to, "dep": d, "arr": a}))
        .collect();
    serde_json::to_string_pretty(&json!({
        "bases": bases,
        "flights": flights,
        "rules": {"min_connect": 30, "max_span": 720, "max_legs": 4},
        "costs": {"fixed": 200.0, "per_minute": 1.0},
    }))
    .unwrap()
        + "\n"
}

/// Li & Lim style instance with `requests` pickup/delivery pairs on a
/// 100x100 square, depot in the centre. Every request is servable alone.
pub fn pdptw(r: &mut SynthRng, requests: usize, vehicles: usize, capacity: i64) -> String {
    let dist = |a: (i64, i64), b: (i64, i64)| (((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64).sqrt();
    let depot = (50, 50);
    let service = 10;
    let mut rows = Vec::new();
    let mut horizon = 0i64;
    for k in 0..requests {
        let p = (r.gen_range(0..=100), r.gen_range(0..=100));
        let d = (r.gen_range(0..=100), r.gen_range(0..=100));
        let q = r.gen_range(10..=30).min(capacity);
        let pe = dist(depot, p).ceil() as i64 + r.gen_range(0..=400);
        let pl = pe + r.gen_range(60..=240);
        let de = pe + service + dist(p, d).ceil() as i64 + r.gen_range(0..=100);
        let dl = de + r.gen_range(60..=240);
        horizon = horizon.max(dl + service + dist(d, depot).ceil() as i64);
        let (pid, did) = (2 * k + 1, 2 * k + 2);
        rows.push((pid, p, q, pe, pl, 0, did));
        rows.push((did, d, -q, de, dl, pid, 0));
    }
    let mut s = format!("{vehicles} {capacity} 1\n");
    writeln!(s, "0 {} {} 0 0 {} 0 0 0", depot.0, depot.1, horizon + 60).unwrap();
    for (id, (x, y), q, e, l, pp, dp) in rows {
        writeln!(s, "{id} {x} {y} {q} {e} {l} {service} {pp} {dp}").unwrap();
    }
    s
}
