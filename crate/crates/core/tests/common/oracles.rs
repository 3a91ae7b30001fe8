//! Brute-force oracles on tiny random instances. Each family builds its own
//! raw instance, renders it to the problem's text format, and compares the
//! library's verifier, evaluator and baseline against exhaustive enumeration
//! done here from the raw data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use cobench_core::baselines;
use cobench_core::problems::{egraph, iop, mendelian, pdptw, protein, scheduling};

type R = ChaCha8Rng;

fn quarter(r: &mut R, hi: u32) -> f64 {
    r.gen_range(0..=hi) as f64 * 0.25
}

/// Every vector in `0..radix[0] x 0..radix[1] x ...`, in lexicographic order.
fn product(radix: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &k in radix {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------- scheduling

struct Dfg {
    kind: Vec<usize>,
    delay: [u64; 2],
    units: [u64; 2],
    edges: Vec<(usize, usize)>,
}

impl Dfg {
    fn random(r: &mut R) -> Dfg {
        let n = r.gen_range(1..=8);
        let mut edges = Vec::new();
        for j in 0..n {
            for i in 0..j {
                if r.gen_bool(0.3) {
                    edges.push((i, j));
                }
            }
        }
        Dfg {
            kind: (0..n).map(|_| r.gen_range(0..2)).collect(),
            delay: [r.gen_range(1..=3), r.gen_range(1..=3)],
            units: [r.gen_range(1..=2), r.gen_range(1..=2)],
            edges,
        }
    }

    fn d(&self, i: usize) -> u64 {
        self.delay[self.kind[i]]
    }

    fn json(&self) -> String {
        let nodes: Vec<_> = self.kind.iter().enumerate().map(|(i, &k)| {
                let t = ["alu", "mul"][k];
                json!([format!("v{i}"), t])
            }).collect();
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| json!([format!("v{a}"), format!("v{b}"), "x"])).collect();
        json!({
            "name": "tiny",
            "delay": {"alu": self.delay[0], "mul": self.delay[1]},
            "resource": {"alu": self.units[0], "mul": self.units[1]},
            "nodes": nodes,
            "edges": edges,
        })
        .to_string()
    }

    fn feasible(&self, s: &[u64]) -> bool {
        if self.edges.iter().any(|&(a, b)| b < s.len() && s[b] < s[a] + self.d(a)) {
            return false;
        }
        let horizon = (0..s.len()).map(|i| s[i] + self.d(i)).max().unwrap_or(0);
        (0..horizon).all(|t| {
            (0..2).all(|k| {
                let busy = (0..s.len()).filter(|&i| self.kind[i] == k && s[i] <= t && t < s[i] + self.d(i)).count();
                busy as u64 <= self.units[k]
            })
        })
    }

    fn latency(&self, s: &[u64]) -> u64 {
        (0..s.len()).map(|i| s[i] + self.d(i)).max().unwrap_or(0)
    }

    /// Minimum latency over all schedules finishing by `ub`.
    fn optimum(&self, ub: u64) -> Option<(u64, Vec<u64>)> {
        fn go(g: &Dfg, ub: u64, s: &mut Vec<u64>, best: &mut Option<(u64, Vec<u64>)>) {
            let i = s.len();
            if i == g.kind.len() {
                if g.feasible(s) {
                    let l = g.latency(s);
                    if best.as_ref().is_none_or(|b| l < b.0) {
                        *best = Some((l, s.clone()));
                    }
                }
                return;
            }
            let est = g.edges.iter().filter(|e| e.1 == i).map(|&(a, _)| s[a] + g.d(a)).max().unwrap_or(0);
            let mut t = est;
            while t + g.d(i) <= ub {
                s.push(t);
                if g.feasible(s) {
                    go(g, ub, s, best);
                }
                s.pop();
                t += 1;
            }
        }
        let mut best = None;
        go(self, ub, &mut Vec::new(), &mut best);
        best
    }
}

pub fn scheduling_family(count: usize, seed: u64) -> Result<(), String> {
    let r = &mut R::seed_from_u64(seed);
    for case in 0..count {
        let g = Dfg::random(r);
        let text = g.json();
        let inst = scheduling::parse_instance(&text).map_err(|e| format!("case {case}: {e}"))?;
        let check = |s: &[u64]| -> Result<(), String> {
            let sched = scheduling::Schedule::from_starts(&inst, s);
            let ok = scheduling::verify_schedule(&inst, &sched).is_empty();
            if ok != g.feasible(s) {
                return Err(format!("case {case}: verifier says {ok} for {s:?} on {text}"));
            }
            if ok && scheduling::evaluate_schedule(&inst, &sched) != g.latency(s) {
                return Err(format!("case {case}: latency mismatch for {s:?}"));
            }
            Ok(())
        };
        let n = g.kind.len();
        let sum_d: u64 = (0..n).map(|i| g.d(i)).sum();
        if n <= 4 {
            for s in product(&vec![(sum_d.min(5) + 1) as usize; n]) {
                check(&s.iter().map(|&x| x as u64).collect::<Vec<_>>())?;
            }
        } else {
            for _ in 0..300 {
                check(&(0..n).map(|_| r.gen_range(0..=sum_d)).collect::<Vec<_>>())?;
            }
        }
        let base = baselines::scheduling::list_schedule(&inst);
        let base_starts = base.starts(&inst).ok_or("baseline schedule incomplete")?;
        check(&base_starts)?;
        let base_lat = g.latency(&base_starts);
        let (opt, opt_s) = g.optimum(base_lat).ok_or(format!("case {case}: no schedule within baseline latency"))?;
        check(&opt_s)?;
        // Single-node nudges around the optimum hit both sides of the boundary.
        for i in 0..n {
            for delta in [-1i64, 1] {
                let mut s = opt_s.clone();
                s[i] = (s[i] as i64 + delta).max(0) as u64;
                check(&s)?;
            }
        }
        if base_lat < opt {
            return Err(format!("case {case}: baseline {base_lat} beats optimum {opt}"));
        }
    }
    Ok(())
}

// ------------------------------------------------------------------- e-graph

pub fn egraph_family(count: usize, seed: u64) -> Result<(), String> {
    let r = &mut R::seed_from_u64(seed);
    for case in 0..count {
        let k = r.gen_range(1..=5);
        let total = r.gen_range(k..=12);
        let mut class_of: Vec<usize> = (0..k).collect();
        class_of.extend((k..total).map(|_| r.gen_range(0..k)));
        class_of.shuffle(r);
        let mut members = vec![Vec::new(); k];
        let mut nodes = Vec::new();
        for (i, &c) in class_of.iter().enumerate() {
            members[c].push(i);
            let arity = r.gen_range(0..=2);
            let mut ch: Vec<usize> = (0..arity).map(|_| r.gen_range(0..k)).collect();
            ch.sort();
            ch.dedup();
            nodes.push((r.gen_range(0..=4) as f64, ch));
        }
        let mut roots: Vec<usize> = (0..r.gen_range(1..=2.min(k))).map(|_| r.gen_range(0..k)).collect();
        roots.sort();
        roots.dedup();
        let g_text = egraph::EGraph::from_parts(members.clone(), nodes.clone(), roots.clone()).to_json();
        let g = egraph::parse_egraph(&g_text).map_err(|e| format!("case {case}: {e}"))?;

        let feasible = |pick: &[Option<usize>]| -> bool {
            if roots.iter().any(|&c| pick[c].is_none()) {
                return false;
            }
            let mut indeg = vec![0usize; k];
            for n in pick.iter().flatten() {
                for &c in &nodes[*n].1 {
                    if pick[c].is_none() {
                        return false;
                    }
                    indeg[c] += 1;
                }
            }
            // Kahn over the selected class graph.
            let mut ready: Vec<usize> = (0..k).filter(|&c| pick[c].is_some() && indeg[c] == 0).collect();
            let mut done = 0;
            while let Some(c) = ready.pop() {
                done += 1;
                for &d in &nodes[pick[c].unwrap()].1 {
                    indeg[d] -= 1;
                    if indeg[d] == 0 {
                        ready.push(d);
                    }
                }
            }
            done == pick.iter().flatten().count()
        };
        let cost = |pick: &[Option<usize>]| -> f64 { pick.iter().flatten().map(|&n| nodes[n].0).sum() };

        let radix: Vec<usize> = members.iter().map(|m| m.len() + 1).collect();
        let mut opt: Option<f64> = None;
        for v in product(&radix) {
            let pick: Vec<Option<usize>> = v.iter().enumerate().map(|(c, &x)| (x > 0).then(|| members[c][x - 1])).collect();
            let mut sel = String::new();
            for (c, n) in pick.iter().enumerate() {
                if let Some(n) = n {
                    sel.push_str(&format!("c{c} n{n}\n"));
                }
            }
            // An empty selection is a format error, so it is never accepted.
            let sel = egraph::parse_selection(&sel).ok();
            let ok = sel.as_ref().is_some_and(|sel| egraph::verify_extraction(&g, sel).is_empty());
            if ok != feasible(&pick) {
                return Err(format!("case {case}: verifier says {ok} for {pick:?} on {g_text}"));
            }
            if let (true, Some(sel)) = (ok, &sel) {
                let c = egraph::evaluate_extraction(&g, sel);
                if c != cost(&pick) {
                    return Err(format!("case {case}: cost {c} vs {}", cost(&pick)));
                }
                opt = Some(opt.map_or(c, |o: f64| o.min(c)));
            }
        }
        match (baselines::extraction::extract(&g), opt) {
            (Ok(parsed), Some(o)) => {
                // The parser orders ids as strings; map back to raw indices.
                let raw = |id: &str| id[1..].parse::<usize>().unwrap();
                let mut choice = vec![None; k];
                for (ci, n) in parsed.iter().enumerate() {
                    choice[raw(&g.classes[ci].id)] = n.map(|n| raw(&g.nodes[n].id));
                }
                if !feasible(&choice) {
                    return Err(format!("case {case}: baseline extraction infeasible"));
                }
                if cost(&choice) < o {
                    return Err(format!("case {case}: baseline {} beats optimum {o}", cost(&choice)));
                }
            }
            (Ok(_), None) => return Err(format!("case {case}: baseline found an extraction where none exists")),
            (Err(_), _) => {}
        }
    }
    Ok(())
}

// ----------------------------------------------------------------------- iop

pub fn iop_family(count: usize, seed: u64) -> Result<(), String> {
    let r = &mut R::seed_from_u64(seed);
    for case in 0..count {
        let n = r.gen_range(1..=6);
        let strategies: Vec<Vec<(f64, u64)>> = (0..n)
            .map(|_| (0..r.gen_range(1..=3)).map(|_| (quarter(r, 16), r.gen_range(0..=4))).collect())
            .collect();
        let intervals: Vec<(i64, i64)> = (0..n)
            .map(|_| {
                let lo = r.gen_range(0..6);
                (lo, r.gen_range(lo..=6))
            })
            .collect();
        let mut edges = Vec::new();
        for _ in 0..r.gen_range(0..=n) {
            let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
            if u != v {
                let m: Vec<Vec<f64>> = (0..strategies[u].len()).map(|_| (0..strategies[v].len()).map(|_| quarter(r, 8)).collect()).collect();
                edges.push((u, v, m));
            }
        }
        let budget = r.gen_range(0..=12u64);
        let text = json!({
            "budget": budget,
            "nodes": (0..n).map(|i| json!({
                "interval": [intervals[i].0, intervals[i].1],
                "strategies": strategies[i].iter().map(|&(c, u)| json!({"cost": c, "usage": u})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "edges": edges.iter().map(|(u, v, m)| json!({"nodes": [u, v], "matrix": m})).collect::<Vec<_>>(),
        })
        .to_string();
        let g = iop::parse_iop(&text).map_err(|e| format!("case {case}: {e}"))?;

        let feasible = |p: &[usize]| (0..6).all(|t| (0..n).filter(|&i| intervals[i].0 <= t && t < intervals[i].1).map(|i| strategies[i][p[i]].1).sum::<u64>() <= budget);
        let cost = |p: &[usize]| -> f64 {
            let nodes: f64 = (0..n).map(|i| strategies[i][p[i]].0).sum();
            let es: f64 = edges.iter().map(|(u, v, m)| m[p[*u]][p[*v]]).sum();
            nodes + es
        };

        let mut opt: Option<f64> = None;
        for p in product(&strategies.iter().map(Vec::len).collect::<Vec<_>>()) {
            let a = iop::Assignment(p.clone());
            let ok = iop::verify_iop(&g, &a).is_empty();
            if ok != feasible(&p) {
                return Err(format!("case {case}: verifier says {ok} for {p:?} on {text}"));
            }
            if ok {
                let c = iop::evaluate_iop(&g, &a);
                if c != cost(&p) {
                    return Err(format!("case {case}: cost {c} vs {}", cost(&p)));
                }
                opt = Some(opt.map_or(c, |o: f64| o.min(c)));
            }
        }
        let mut out_of_range = vec![0; n];
        out_of_range[0] = strategies[0].len();
        if iop::verify_iop(&g, &iop::Assignment(out_of_range)).is_empty() {
            return Err(format!("case {case}: out-of-range strategy accepted"));
        }
        match (baselines::iop::assign(&g), opt) {
            (Ok(p), Some(o)) if !feasible(&p) || cost(&p) < o => {
                return Err(format!("case {case}: baseline {p:?} infeasible or beats optimum {o}"))
            }
            (Ok(_), None) => return Err(format!("case {case}: baseline succeeded on an infeasible instance")),
            (Err(_), Some(_)) => return Err(format!("case {case}: baseline failed on a feasible instance")),
            _ => {}
        }
    }
    Ok(())
}

// ------------------------------------------------------------------- protein

/// Returns how many instances had the baseline at the exact optimum.
pub fn protein_family(count: usize, seed: u64) -> Result<usize, String> {
    let r = &mut R::seed_from_u64(seed);
    let mut exact = 0;
    for case in 0..count {
        let n = r.gen_range(1..=16);
        let mut contacts = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if r.gen_bool(0.25) {
                    contacts.push((i, j, quarter(r, 12)));
                }
            }
        }
        let exposure: Vec<f64> = (0..n).map(|_| quarter(r, 8)).collect();
        let beta = r.gen_range(1..=4) as f64 * 0.5;
        let text = json!({
            "n": n,
            "contacts": contacts.iter().map(|&(i, j, w)| json!([i, j, w])).collect::<Vec<_>>(),
            "exposure": exposure,
            "beta": beta,
        })
        .to_string();
        let inst = protein::parse_gc(&text).map_err(|e| format!("case {case}: {e}"))?;
        let phi = |h: &[bool]| -> f64 {
            let c: f64 = contacts.iter().filter(|&&(i, j, _)| h[i] && h[j]).map(|c| c.2).sum();
            let e: f64 = (0..n).filter(|&i| h[i]).map(|i| exposure[i]).sum();
            c - beta * e
        };
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..1 << n {
            let h: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let seq = protein::HpSequence::from_bits(&h);
            if !protein::verify_sequence(&inst, &seq).is_empty() {
                return Err(format!("case {case}: well-formed sequence rejected"));
            }
            let v = protein::evaluate_gc(&inst, &seq);
            if v != phi(&h) {
                return Err(format!("case {case}: fitness {v} vs {}", phi(&h)));
            }
            best = best.max(v);
        }
        let short = protein::HpSequence("H".repeat(n + 1));
        if protein::verify_sequence(&inst, &short).is_empty() {
            return Err(format!("case {case}: wrong-length sequence accepted"));
        }
        let design = baselines::protein::optimal_design(&inst);
        let got = phi(&design);
        if got > best {
            return Err(format!("case {case}: baseline {got} exceeds optimum {best}"));
        }
        if got == best {
            exact += 1;
        }
    }
    Ok(exact)
}

// ----------------------------------------------------------------- mendelian

pub fn mendelian_family(count: usize, seed: u64) -> Result<(), String> {
    const GENOTYPES: [(u32, u32); 3] = [(1, 1), (1, 2), (2, 2)];
    let r = &mut R::seed_from_u64(seed);
    for case in 0..count {
        let n = r.gen_range(1..=6);
        let founders = r.gen_range(1..=n).max(2.min(n));
        let parents: Vec<Option<(usize, usize)>> = (0..n)
            .map(|i| {
                (i >= founders).then(|| {
                    let f = r.gen_range(0..i);
                    let mut m = r.gen_range(0..i);
                    while m == f {
                        m = r.gen_range(0..i);
                    }
                    (f, m)
                })
            })
            .collect();
        let observed: Vec<Option<(u32, u32)>> = (0..n).map(|_| r.gen_bool(0.8).then(|| GENOTYPES[r.gen_range(0..3)])).collect();
        let text = json!({
            "alleles": 2,
            "individuals": (0..n).map(|i| {
                let (f, m) = parents[i].map_or((0, 0), |(f, m)| (f + 1, m + 1));
                json!({"id": i + 1, "father": f, "mother": m, "genotype": observed[i].map(|(a, b)| [a, b])})
            }).collect::<Vec<_>>(),
        })
        .to_string();
        let p = mendelian::parse_pedigree(&text).map_err(|e| format!("case {case}: {e}"))?;

        let has = |g: (u32, u32), a: u32| g.0 == a || g.1 == a;
        let feasible = |gs: &[(u32, u32)]| {
            (0..n).all(|i| match parents[i] {
                None => true,
                Some((f, m)) => {
                    let (a, b) = gs[i];
                    (has(gs[f], a) && has(gs[m], b)) || (has(gs[f], b) && has(gs[m], a))
                }
            })
        };
        let cost = |gs: &[(u32, u32)]| (0..n).filter(|&i| observed[i].is_some_and(|o| o != gs[i])).count() as f64;

        let mut opt: Option<f64> = None;
        for v in product(&vec![3; n]) {
            let gs: Vec<(u32, u32)> = v.iter().map(|&x| GENOTYPES[x]).collect();
            // Alternate allele order in the text to exercise normalization.
            let text: String = gs.iter().enumerate().map(|(i, &(a, b))| if i % 2 == 0 { format!("{} {a} {b}\n", i + 1) } else { format!("{} {b} {a}\n", i + 1) }).collect();
            let a = mendelian::parse_assignment(&text).map_err(|e| e.to_string())?;
            let ok = mendelian::verify_mendelian(&p, &a).is_empty();
            if ok != feasible(&gs) {
                return Err(format!("case {case}: verifier says {ok} for {gs:?}"));
            }
            if ok {
                let c = mendelian::evaluate_mendelian(&p, &a);
                if c != cost(&gs) {
                    return Err(format!("case {case}: cost {c} vs {}", cost(&gs)));
                }
                opt = Some(opt.map_or(c, |o: f64| o.min(c)));
            }
        }
        let opt = opt.ok_or(format!("case {case}: no consistent assignment"))?;
        let base = baselines::mendelian::correct(&p).map_err(|e| format!("case {case}: {e}"))?;
        let gs: Vec<(u32, u32)> = base.iter().map(|g| (g.0, g.1)).collect();
        if !feasible(&gs) || cost(&gs) < opt {
            return Err(format!("case {case}: baseline {gs:?} infeasible or beats optimum {opt}"));
        }
    }
    Ok(())
}

// --------------------------------------------------------------------- pdptw

struct Requests {
    vehicles: usize,
    capacity: i64,
    horizon: f64,
    // index 0 is the depot
    xy: Vec<(f64, f64)>,
    demand: Vec<i64>,
    window: Vec<(f64, f64)>,
    service: Vec<f64>,
}

impl Requests {
    fn random(r: &mut R) -> Requests {
        let k = r.gen_range(1..=3);
        let capacity = r.gen_range(2..=6);
        let mut q = Requests {
            vehicles: r.gen_range(1..=3),
            capacity,
            horizon: r.gen_range(40..=120) as f64,
            xy: vec![(5.0, 5.0)],
            demand: vec![0],
            window: vec![(0.0, 0.0)],
            service: vec![0.0],
        };
        q.window[0].1 = q.horizon;
        for _ in 0..k {
            let d = r.gen_range(1..=capacity);
            for sign in [1, -1] {
                q.xy.push((r.gen_range(0..=10) as f64, r.gen_range(0..=10) as f64));
                q.demand.push(sign * d);
                let e = r.gen_range(0..=40) as f64;
                q.window.push((e, e + r.gen_range(0..=60) as f64));
                q.service.push(r.gen_range(0..=3) as f64);
            }
        }
        q
    }

    fn text(&self) -> String {
        let mut s = format!("{} {}\n", self.vehicles, self.capacity);
        for i in 0..self.xy.len() {
            let (pp, dp) = if i == 0 {
                (0, 0)
            } else if i % 2 == 1 {
                (0, i + 1)
            } else {
                (i - 1, 0)
            };
            s.push_str(&format!(
                "{i} {} {} {} {} {} {} {pp} {dp}\n",
                self.xy[i].0, self.xy[i].1, self.demand[i], self.window[i].0, self.window[i].1, self.service[i]
            ));
        }
        s
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        let (dx, dy) = (self.xy[a].0 - self.xy[b].0, self.xy[a].1 - self.xy[b].1);
        (dx * dx + dy * dy).sqrt()
    }

    fn route_ok(&self, route: &[usize]) -> bool {
        let pos = |x: usize| route.iter().position(|&y| y == x);
        for &v in route {
            let partner = if v % 2 == 1 { v + 1 } else { v - 1 };
            match pos(partner) {
                None => return false,
                Some(j) if v % 2 == 0 && j > pos(v).unwrap() => return false,
                _ => {}
            }
        }
        let (mut load, mut t, mut prev) = (0i64, self.window[0].0, 0usize);
        for &v in route {
            load += self.demand[v];
            if load > self.capacity {
                return false;
            }
            t = (t + self.service[prev] + self.dist(prev, v)).max(self.window[v].0);
            if t > self.window[v].1 {
                return false;
            }
            prev = v;
        }
        t + self.service[prev] + self.dist(prev, 0) <= self.horizon
    }

    fn route_len(&self, route: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut prev = 0;
        for &v in route {
            total += self.dist(prev, v);
            prev = v;
        }
        total + self.dist(prev, 0)
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

pub fn pdptw_family(count: usize, seed: u64) -> Result<(), String> {
    let r = &mut R::seed_from_u64(seed);
    for case in 0..count {
        let q = Requests::random(r);
        let text = q.text();
        let inst = pdptw::parse_pdptw(&text).map_err(|e| format!("case {case}: {e}"))?;
        let m = q.xy.len() - 1;
        let ids: Vec<usize> = (1..=m).collect();
        let mut opt: Option<f64> = None;
        // Every ordering, cut into consecutive routes; routes listed by their
        // first stop so each plan appears once.
        for perm in permutations(&ids) {
            for cuts in 0u32..1 << (m - 1) {
                let mut plan: Vec<Vec<usize>> = vec![vec![perm[0]]];
                for (i, &v) in perm.iter().enumerate().skip(1) {
                    if cuts >> (i - 1) & 1 == 1 {
                        plan.push(Vec::new());
                    }
                    plan.last_mut().unwrap().push(v);
                }
                if plan.windows(2).any(|w| w[0][0] > w[1][0]) {
                    continue;
                }
                let expect = plan.len() <= q.vehicles && plan.iter().all(|rt| q.route_ok(rt));
                let rp = pdptw::RoutePlan(plan.clone());
                let ok = pdptw::verify_routes(&inst, &rp).is_empty();
                if ok != expect {
                    return Err(format!("case {case}: verifier says {ok} for {plan:?} on\n{text}"));
                }
                if ok {
                    let want = plan.iter().fold(0.0, |acc, rt| acc + q.route_len(rt));
                    let c = pdptw::evaluate_routes(&inst, &rp);
                    if c != want {
                        return Err(format!("case {case}: distance {c} vs {want}"));
                    }
                    opt = Some(opt.map_or(c, |o: f64| o.min(c)));
                }
            }
        }
        if pdptw::verify_routes(&inst, &pdptw::RoutePlan(vec![ids.iter().copied().chain([0]).collect()])).is_empty() {
            return Err(format!("case {case}: explicit depot accepted"));
        }
        match (baselines::pdptw::solve(&inst), opt) {
            (Ok(plan), Some(o)) => {
                let fine = plan.len() <= q.vehicles && plan.iter().all(|rt| q.route_ok(rt));
                let c = plan.iter().fold(0.0, |acc, rt| acc + q.route_len(rt));
                // Route order only changes the last bits of the sum.
                if !fine || c < o - 1e-9 {
                    return Err(format!("case {case}: baseline {plan:?} ({c}) infeasible or beats optimum {o}"));
                }
            }
            (Ok(plan), None) => return Err(format!("case {case}: baseline {plan:?} on an infeasible instance")),
            (Err(_), _) => {}
        }
    }
    Ok(())
}
