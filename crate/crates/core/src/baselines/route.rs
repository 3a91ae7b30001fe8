//! Global routing: pins of each net are connected in minimum-spanning-tree
//! order, each connection found by a congestion-aware maze search that may
//! reuse the net's existing wiring for free.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::error::SolverError;
use crate::problems::routing::{Cell, Dir, NetRoute, RouteGrid, RoutingSolution, Seg, Via, OVERFLOW_COST, VIA_COST};

fn manhattan(a: Cell, b: Cell) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1) + a.2.abs_diff(b.2)
}

/// Pin order from Prim's algorithm, lowest index first on ties.
fn mst_order(pins: &[Cell]) -> Vec<usize> {
    let n = pins.len();
    let mut in_tree = vec![false; n];
    let mut dist = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    dist[0] = 0;
    for _ in 0..n {
        let u = (0..n).filter(|&i| !in_tree[i]).min_by_key(|&i| (dist[i], i)).unwrap();
        in_tree[u] = true;
        order.push(u);
        for v in 0..n {
            if !in_tree[v] {
                dist[v] = dist[v].min(manhattan(pins[u], pins[v]));
            }
        }
    }
    order
}

/// Search step from a cell: planar edge (keyed by lower cell) or via.
enum Step {
    Edge(Cell),
    Via(Cell),
}

fn neighbours(g: &RouteGrid, c: Cell) -> Vec<(Cell, Step)> {
    let (x, y, l) = c;
    let mut out = Vec::with_capacity(4);
    match g.dirs[l] {
        Dir::H => {
            if x + 1 < g.nx {
                out.push(((x + 1, y, l), Step::Edge(c)));
            }
            if x > 0 {
                out.push(((x - 1, y, l), Step::Edge((x - 1, y, l))));
            }
        }
        Dir::V => {
            if y + 1 < g.ny {
                out.push(((x, y + 1, l), Step::Edge(c)));
            }
            if y > 0 {
                out.push(((x, y - 1, l), Step::Edge((x, y - 1, l))));
            }
        }
    }
    if l + 1 < g.nl {
        out.push(((x, y, l + 1), Step::Via(c)));
    }
    if l > 0 {
        out.push(((x, y, l - 1), Step::Via((x, y, l - 1))));
    }
    out
}

struct Router<'a> {
    g: &'a RouteGrid,
    usage: HashMap<Cell, u32>,
}

impl Router<'_> {
    fn edge_cost(&self, e: Cell, own: &BTreeSet<Cell>) -> f64 {
        if own.contains(&e) {
            return 0.0;
        }
        let used = self.usage.get(&e).copied().unwrap_or(0);
        let cap = self.g.capacity(e);
        if used >= cap {
            1.0 + OVERFLOW_COST
        } else {
            // Mild preference for emptier edges.
            1.0 + 0.25 * (used + 1) as f64 / cap as f64
        }
    }

    /// Connect `target` to the cells in `tree`, returning the new edges and vias.
    fn connect(
        &self,
        tree: &BTreeSet<Cell>,
        edges: &BTreeSet<Cell>,
        vias: &BTreeSet<Cell>,
        target: Cell,
    ) -> Option<(Vec<Cell>, Vec<Cell>)> {
        if tree.contains(&target) {
            return Some((vec![], vec![]));
        }
        let key = |c: Cell| (c.2 * self.g.ny + c.1) * self.g.nx + c.0;
        let total = self.g.nx * self.g.ny * self.g.nl;
        let mut dist = vec![f64::INFINITY; total];
        let mut prev: Vec<Option<(Cell, bool, Cell)>> = vec![None; total];
        let mut heap = BinaryHeap::new();
        for &c in tree {
            dist[key(c)] = 0.0;
            heap.push(Reverse((OrdF(0.0), key(c), c)));
        }
        while let Some(Reverse((OrdF(d), _, c))) = heap.pop() {
            if d > dist[key(c)] {
                continue;
            }
            if c == target {
                break;
            }
            for (n, step) in neighbours(self.g, c) {
                let (w, is_via, res) = match step {
                    Step::Edge(e) => (self.edge_cost(e, edges), false, e),
                    Step::Via(v) => (if vias.contains(&v) { 0.0 } else { VIA_COST }, true, v),
                };
                let nd = d + w;
                if nd < dist[key(n)] {
                    dist[key(n)] = nd;
                    prev[key(n)] = Some((c, is_via, res));
                    heap.push(Reverse((OrdF(nd), key(n), n)));
                }
            }
        }
        let mut new_edges = Vec::new();
        let mut new_vias = Vec::new();
        let mut c = target;
        while !tree.contains(&c) {
            let (p, is_via, res) = prev[key(c)]?;
            if is_via {
                new_vias.push(res);
            } else {
                new_edges.push(res);
            }
            c = p;
        }
        Some((new_edges, new_vias))
    }
}

struct OrdF(f64);

impl PartialEq for OrdF {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF {}

impl PartialOrd for OrdF {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn to_route(g: &RouteGrid, name: &str, edges: &BTreeSet<Cell>, vias: &BTreeSet<Cell>) -> NetRoute {
    let segs = edges
        .iter()
        .map(|&c| {
            let n = g.next_cell(c).expect("edge inside the grid");
            Seg {
                x1: c.0 as i64,
                y1: c.1 as i64,
                x2: n.0 as i64,
                y2: n.1 as i64,
                l: c.2 as i64,
            }
        })
        .collect();
    let vias = vias
        .iter()
        .map(|&(x, y, l)| Via {
            x: x as i64,
            y: y as i64,
            l1: l as i64,
            l2: l as i64 + 1,
        })
        .collect();
    NetRoute {
        name: name.to_string(),
        segs,
        vias,
    }
}

pub fn route_nets(g: &RouteGrid) -> Result<RoutingSolution, SolverError> {
    let mut router = Router {
        g,
        usage: HashMap::new(),
    };
    let mut sol = RoutingSolution::default();
    for net in &g.nets {
        let pins: Vec<Cell> = {
            let mut seen = BTreeSet::new();
            net.pins.iter().copied().filter(|p| seen.insert(*p)).collect()
        };
        let order = mst_order(&pins);
        let mut tree: BTreeSet<Cell> = BTreeSet::from([pins[order[0]]]);
        let mut edges = BTreeSet::new();
        let mut vias = BTreeSet::new();
        for &k in &order[1..] {
            let (ne, nv) = router
                .connect(&tree, &edges, &vias, pins[k])
                .ok_or_else(|| SolverError(format!("net `{}` cannot reach pin {:?}", net.name, pins[k])))?;
            for e in ne {
                tree.insert(e);
                tree.insert(g.next_cell(e).unwrap());
                edges.insert(e);
            }
            for (x, y, l) in nv {
                tree.insert((x, y, l));
                tree.insert((x, y, l + 1));
                vias.insert((x, y, l));
            }
        }
        for &e in &edges {
            *router.usage.entry(e).or_default() += 1;
        }
        sol.nets.push(to_route(g, &net.name, &edges, &vias));
    }
    Ok(sol)
}
