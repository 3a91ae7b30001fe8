//! Simplified 3-D global routing on a GCell grid.
//!
//! Instance grammar (one directive per line, `#` comments):
//!
//! ```text
//! instance := "grid" X Y L  layer{L}  ["capacity" C]  cap*  net*
//! layer    := "layer" l ("H" | "V")
//! cap      := "cap" x y l C        # edge from (x,y,l) to its next cell along l's direction
//! net      := "net" NAME  ("pin" x y l)+  "end"
//! ```
//!
//! Solution grammar:
//!
//! ```text
//! solution := ("net" NAME  (seg | via)*  "end")*
//! seg      := "seg" x1 y1 x2 y2 l     # straight run along the layer's direction
//! via      := "via" x y l1 l2         # stack between layers l1 and l2
//! ```
//!
//! Cost is unit wirelength + 2 per unit via + 500 per unit of edge overflow.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

pub const VIA_COST: f64 = 2.0;
pub const OVERFLOW_COST: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    H,
    V,
}

pub type Cell = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    pub pins: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteGrid {
    pub nx: usize,
    pub ny: usize,
    pub nl: usize,
    pub dirs: Vec<Dir>,
    pub default_capacity: u32,
    pub overrides: BTreeMap<Cell, u32>,
    pub nets: Vec<Net>,
}

impl RouteGrid {
    /// Neighbour of `c` along its layer's direction, if inside the grid.
    pub fn next_cell(&self, c: Cell) -> Option<Cell> {
        let (x, y, l) = c;
        match self.dirs[l] {
            Dir::H if x + 1 < self.nx => Some((x + 1, y, l)),
            Dir::V if y + 1 < self.ny => Some((x, y + 1, l)),
            _ => None,
        }
    }

    /// Capacity of the planar edge whose lower endpoint is `c`.
    pub fn capacity(&self, c: Cell) -> u32 {
        self.overrides.get(&c).copied().unwrap_or(self.default_capacity)
    }

    pub fn contains(&self, x: i64, y: i64, l: i64) -> bool {
        (0..self.nx as i64).contains(&x) && (0..self.ny as i64).contains(&y) && (0..self.nl as i64).contains(&l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seg {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
    pub l: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Via {
    pub x: i64,
    pub y: i64,
    pub l1: i64,
    pub l2: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NetRoute {
    pub name: String,
    pub segs: Vec<Seg>,
    pub vias: Vec<Via>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutingSolution {
    pub nets: Vec<NetRoute>,
}

fn nums<T: std::str::FromStr>(ln: usize, toks: &[&str], n: usize, what: &str) -> Result<Vec<T>, ParseError> {
    if toks.len() != n {
        return Err(ParseError::at_line(ln, format!("`{what}` expects {n} values, got {}", toks.len())));
    }
    toks.iter()
        .map(|t| t.parse().map_err(|_| ParseError::at_line(ln, format!("invalid number `{t}`"))))
        .collect()
}

pub fn parse_grid(text: &str) -> Result<RouteGrid, ParseError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| ParseError::new("empty routing instance"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"grid") {
        return Err(ParseError::at_line(ln, "expected `grid X Y L`"));
    }
    let dims: Vec<usize> = nums(ln, &toks[1..], 3, "grid")?;
    if dims.contains(&0) {
        return Err(ParseError::at_line(ln, "grid dimensions must be positive"));
    }
    let mut g = RouteGrid {
        nx: dims[0],
        ny: dims[1],
        nl: dims[2],
        dirs: Vec::new(),
        default_capacity: 1,
        overrides: BTreeMap::new(),
        nets: Vec::new(),
    };
    let mut dirs: Vec<Option<Dir>> = vec![None; g.nl];
    let mut names = BTreeSet::new();
    let mut open: Option<Net> = None;
    let checked_cell = |ln: usize, v: &[usize], nx: usize, ny: usize, nl: usize| -> Result<Cell, ParseError> {
        if v[0] >= nx || v[1] >= ny || v[2] >= nl {
            return Err(ParseError::at_line(ln, format!("cell ({}, {}, {}) outside the grid", v[0], v[1], v[2])));
        }
        Ok((v[0], v[1], v[2]))
    };
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (toks[0], open.as_mut()) {
            ("pin", Some(net)) => {
                let v: Vec<usize> = nums(ln, &toks[1..], 3, "pin")?;
                net.pins.push(checked_cell(ln, &v, g.nx, g.ny, g.nl)?);
            }
            ("end", Some(_)) => {
                let net = open.take().unwrap();
                if net.pins.is_empty() {
                    return Err(ParseError::at_line(ln, format!("net `{}` has no pins", net.name)));
                }
                g.nets.push(net);
            }
            (_, Some(net)) => {
                return Err(ParseError::at_line(ln, format!("unexpected `{}` inside net `{}`", toks[0], net.name)))
            }
            ("layer", None) => {
                if toks.len() != 3 {
                    return Err(ParseError::at_line(ln, "expected `layer l H|V`"));
                }
                let l: usize = toks[1]
                    .parse()
                    .map_err(|_| ParseError::at_line(ln, format!("invalid layer `{}`", toks[1])))?;
                let d = match toks[2] {
                    "H" => Dir::H,
                    "V" => Dir::V,
                    o => return Err(ParseError::at_line(ln, format!("invalid direction `{o}`"))),
                };
                let slot = dirs
                    .get_mut(l)
                    .ok_or_else(|| ParseError::at_line(ln, format!("layer {l} outside the grid")))?;
                if slot.replace(d).is_some() {
                    return Err(ParseError::at_line(ln, format!("layer {l} declared twice")));
                }
            }
            ("capacity", None) => {
                g.default_capacity = nums::<u32>(ln, &toks[1..], 1, "capacity")?[0];
            }
            ("cap", None) => {
                let v: Vec<usize> = nums(ln, &toks[1..], 4, "cap")?;
                let c = checked_cell(ln, &v[..3], g.nx, g.ny, g.nl)?;
                let cap = u32::try_from(v[3]).map_err(|_| ParseError::at_line(ln, "capacity too large"))?;
                g.overrides.insert(c, cap);
            }
            ("net", None) => {
                if toks.len() != 2 {
                    return Err(ParseError::at_line(ln, "expected `net NAME`"));
                }
                if !names.insert(toks[1].to_string()) {
                    return Err(ParseError::at_line(ln, format!("net `{}` declared twice", toks[1])));
                }
                open = Some(Net {
                    name: toks[1].to_string(),
                    pins: Vec::new(),
                });
            }
            (other, None) => return Err(ParseError::at_line(ln, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(net) = open {
        return Err(ParseError::new(format!("net `{}` is missing `end`", net.name)));
    }
    g.dirs = dirs
        .into_iter()
        .enumerate()
        .map(|(l, d)| d.ok_or_else(|| ParseError::new(format!("layer {l} has no direction"))))
        .collect::<Result<_, _>>()?;
    Ok(g)
}

pub fn parse_routes(text: &str) -> Result<RoutingSolution, ParseError> {
    let mut sol = RoutingSolution::default();
    let mut open: Option<NetRoute> = None;
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (toks[0], open.as_mut()) {
            ("net", None) if toks.len() == 2 => {
                open = Some(NetRoute {
                    name: toks[1].to_string(),
                    ..Default::default()
                })
            }
            ("seg", Some(r)) => {
                let v: Vec<i64> = nums(ln, &toks[1..], 5, "seg")?;
                r.segs.push(Seg {
                    x1: v[0],
                    y1: v[1],
                    x2: v[2],
                    y2: v[3],
                    l: v[4],
                });
            }
            ("via", Some(r)) => {
                let v: Vec<i64> = nums(ln, &toks[1..], 4, "via")?;
                r.vias.push(Via {
                    x: v[0],
                    y: v[1],
                    l1: v[2],
                    l2: v[3],
                });
            }
            ("end", Some(_)) => sol.nets.push(open.take().unwrap()),
            _ => return Err(ParseError::at_line(ln, format!("unexpected `{line}`"))),
        }
    }
    if let Some(r) = open {
        return Err(ParseError::new(format!("net `{}` is missing `end`", r.name)));
    }
    if sol.nets.is_empty() && !text.trim().is_empty() {
        return Err(ParseError::new("no net blocks found"));
    }
    Ok(sol)
}

pub fn render_routes(sol: &RoutingSolution) -> String {
    let mut s = String::new();
    for r in &sol.nets {
        writeln!(s, "net {}", r.name).unwrap();
        for g in &r.segs {
            writeln!(s, "seg {} {} {} {} {}", g.x1, g.y1, g.x2, g.y2, g.l).unwrap();
        }
        for v in &r.vias {
            writeln!(s, "via {} {} {} {}", v.x, v.y, v.l1, v.l2).unwrap();
        }
        s.push_str("end\n");
    }
    s
}

/// Unit resources a net occupies: planar edges keyed by lower cell, and vias
/// keyed by (x, y, lower layer).
#[derive(Debug, Default)]
struct Footprint {
    edges: BTreeSet<Cell>,
    vias: BTreeSet<Cell>,
}

fn footprint(g: &RouteGrid, r: &NetRoute, violations: &mut Vec<Violation>) -> Footprint {
    let mut fp = Footprint::default();
    for s in &r.segs {
        if !g.contains(s.x1, s.y1, s.l) || !g.contains(s.x2, s.y2, s.l) {
            violations.push(Violation::new(
                "bounds",
                format!("net `{}`: segment ({},{})-({},{}) on layer {} leaves the grid", r.name, s.x1, s.y1, s.x2, s.y2, s.l),
            ));
            continue;
        }
        let l = s.l as usize;
        let ok = match g.dirs[l] {
            Dir::H => s.y1 == s.y2,
            Dir::V => s.x1 == s.x2,
        };
        if !ok {
            violations.push(Violation::new(
                "direction",
                format!(
                    "net `{}`: segment ({},{})-({},{}) does not follow layer {l}'s {:?} direction",
                    r.name, s.x1, s.y1, s.x2, s.y2, g.dirs[l]
                ),
            ));
            continue;
        }
        let (x0, x1) = (s.x1.min(s.x2) as usize, s.x1.max(s.x2) as usize);
        let (y0, y1) = (s.y1.min(s.y2) as usize, s.y1.max(s.y2) as usize);
        match g.dirs[l] {
            Dir::H => fp.edges.extend((x0..x1).map(|x| (x, y0, l))),
            Dir::V => fp.edges.extend((y0..y1).map(|y| (x0, y, l))),
        }
    }
    for v in &r.vias {
        if !g.contains(v.x, v.y, v.l1) || !g.contains(v.x, v.y, v.l2) || v.l1 == v.l2 {
            violations.push(Violation::new(
                "bounds",
                format!("net `{}`: invalid via at ({},{}) layers {}-{}", r.name, v.x, v.y, v.l1, v.l2),
            ));
            continue;
        }
        let (a, b) = (v.l1.min(v.l2) as usize, v.l1.max(v.l2) as usize);
        fp.vias.extend((a..b).map(|l| (v.x as usize, v.y as usize, l)));
    }
    fp
}

struct UnionFind {
    parent: HashMap<Cell, Cell>,
}

impl UnionFind {
    fn find(&mut self, c: Cell) -> Cell {
        let p = *self.parent.entry(c).or_insert(c);
        if p == c {
            return c;
        }
        let root = self.find(p);
        self.parent.insert(c, root);
        root
    }

    fn union(&mut self, a: Cell, b: Cell) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra.max(rb), ra.min(rb));
        }
    }
}

fn footprints<'a>(
    g: &RouteGrid,
    sol: &'a RoutingSolution,
    violations: &mut Vec<Violation>,
) -> Vec<(&'a NetRoute, Footprint)> {
    sol.nets.iter().map(|r| (r, footprint(g, r, violations))).collect()
}

pub fn verify_routing(g: &RouteGrid, sol: &RoutingSolution) -> Vec<Violation> {
    let mut v = Vec::new();
    let fps = footprints(g, sol, &mut v);
    let mut seen = BTreeSet::new();
    for (r, _) in &fps {
        if !g.nets.iter().any(|n| n.name == r.name) {
            v.push(Violation::new("unknown net", format!("net `{}` is not in the instance", r.name)));
        } else if !seen.insert(r.name.as_str()) {
            v.push(Violation::new("duplicate", format!("net `{}` routed twice", r.name)));
        }
    }
    for net in &g.nets {
        let Some((_, fp)) = fps.iter().find(|(r, _)| r.name == net.name) else {
            if net.pins.iter().collect::<BTreeSet<_>>().len() > 1 {
                v.push(Violation::new("missing", format!("net `{}` has no route", net.name)));
            }
            continue;
        };
        let mut uf = UnionFind { parent: HashMap::new() };
        for &e in &fp.edges {
            let n = g.next_cell(e).expect("edge inside grid");
            uf.union(e, n);
        }
        for &(x, y, l) in &fp.vias {
            uf.union((x, y, l), (x, y, l + 1));
        }
        let root = uf.find(net.pins[0]);
        let disconnected: Vec<String> = net
            .pins
            .iter()
            .filter(|&&p| uf.find(p) != root)
            .map(|p| format!("({},{},{})", p.0, p.1, p.2))
            .collect();
        if !disconnected.is_empty() {
            v.push(Violation::new(
                "connectivity",
                format!(
                    "net `{}`: pins {} are not connected to ({},{},{})",
                    net.name,
                    disconnected.join(", "),
                    net.pins[0].0,
                    net.pins[0].1,
                    net.pins[0].2
                ),
            ));
        }
    }
    v
}

/// Cost components: (wirelength, vias, overflow).
pub fn routing_components(g: &RouteGrid, sol: &RoutingSolution) -> (u64, u64, u64) {
    let mut scratch = Vec::new();
    let fps = footprints(g, sol, &mut scratch);
    let mut usage: BTreeMap<Cell, u64> = BTreeMap::new();
    let (mut wl, mut vias) = (0u64, 0u64);
    for (_, fp) in &fps {
        wl += fp.edges.len() as u64;
        vias += fp.vias.len() as u64;
        for &e in &fp.edges {
            *usage.entry(e).or_default() += 1;
        }
    }
    let overflow = usage
        .iter()
        .map(|(&e, &u)| u.saturating_sub(g.capacity(e) as u64))
        .sum();
    (wl, vias, overflow)
}

pub fn evaluate_routing(g: &RouteGrid, sol: &RoutingSolution) -> f64 {
    let (wl, vias, overflow) = routing_components(g, sol);
    wl as f64 + VIA_COST * vias as f64 + OVERFLOW_COST * overflow as f64
}

pub struct GlobalRouting;

impl Problem for GlobalRouting {
    type Instance = RouteGrid;
    type Solution = RoutingSolution;

    const ID: ProblemId = ProblemId::GlobalRouting;
    const SOLVER: &'static str = "mst_maze_router";

    fn parse_instance(text: &str) -> Result<RouteGrid, ParseError> {
        parse_grid(text)
    }

    fn parse_solution(_: &RouteGrid, text: &str) -> Result<RoutingSolution, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError::new("empty routing solution"));
        }
        parse_routes(text)
    }

    fn render_solution(solution: &RoutingSolution) -> String {
        render_routes(solution)
    }

    fn verify(instance: &RouteGrid, solution: &RoutingSolution) -> Vec<Violation> {
        verify_routing(instance, solution)
    }

    fn evaluate(instance: &RouteGrid, solution: &RoutingSolution) -> f64 {
        evaluate_routing(instance, solution)
    }

    fn baseline(instance: &RouteGrid) -> Result<RoutingSolution, SolverError> {
        crate::baselines::route::route_nets(instance)
    }
}
