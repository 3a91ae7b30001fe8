//! Cheapest-insertion construction followed by intra-route relocation.

use crate::error::SolverError;
use crate::problems::pdptw::PdptwInstance;

const IMPROVE_EPS: f64 = 1e-9;

/// Capacity, time-window and depot-return check for a route built by insertion.
pub fn route_feasible(inst: &PdptwInstance, route: &[usize]) -> bool {
    let mut load = 0i64;
    for &k in route {
        load += inst.locations[k].demand;
        if load > inst.capacity || load < 0 {
            return false;
        }
    }
    let starts = inst.service_starts(route);
    if route.iter().zip(&starts).any(|(&k, &t)| t > inst.locations[k].latest) {
        return false;
    }
    match (route.last(), starts.last()) {
        (Some(&k), Some(&t)) => t + inst.locations[k].service + inst.dist(k, 0) <= inst.locations[0].latest,
        _ => true,
    }
}

/// Best (delta, i, j) for inserting pickup `p` at position `i` and delivery
/// `d` at position `j > i` of the extended route.
fn best_insertion(inst: &PdptwInstance, route: &[usize], p: usize, d: usize) -> Option<(f64, usize, usize)> {
    let base = inst.route_distance(route);
    let mut best: Option<(f64, usize, usize)> = None;
    let mut cand = Vec::with_capacity(route.len() + 2);
    for i in 0..=route.len() {
        for j in i + 1..=route.len() + 1 {
            cand.clear();
            cand.extend_from_slice(&route[..i]);
            cand.push(p);
            cand.extend_from_slice(&route[i..j - 1]);
            cand.push(d);
            cand.extend_from_slice(&route[j - 1..]);
            let delta = inst.route_distance(&cand) - base;
            if best.is_some_and(|(b, _, _)| delta >= b) {
                continue;
            }
            if route_feasible(inst, &cand) {
                best = Some((delta, i, j));
            }
        }
    }
    best
}

fn insert(route: &mut Vec<usize>, p: usize, d: usize, i: usize, j: usize) {
    route.insert(i, p);
    route.insert(j, d);
}

pub fn solve(inst: &PdptwInstance) -> Result<Vec<Vec<usize>>, SolverError> {
    let mut requests: Vec<(usize, usize)> = inst.requests().collect();
    requests.sort_by(|a, b| {
        let (la, lb) = (&inst.locations[a.0], &inst.locations[b.0]);
        la.latest.total_cmp(&lb.latest).then(a.0.cmp(&b.0))
    });
    let mut routes: Vec<Vec<usize>> = Vec::new();
    for (p, d) in requests {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            if let Some((delta, i, j)) = best_insertion(inst, route, p, d) {
                if best.is_none_or(|b| delta < b.0) {
                    best = Some((delta, r, i, j));
                }
            }
        }
        if routes.len() < inst.vehicles {
            if let Some((delta, i, j)) = best_insertion(inst, &[], p, d) {
                if best.is_none_or(|b| delta < b.0) {
                    best = Some((delta, routes.len(), i, j));
                }
            }
        }
        let (_, r, i, j) = best.ok_or_else(|| SolverError(format!("request {p}->{d} cannot be inserted feasibly")))?;
        if r == routes.len() {
            routes.push(Vec::new());
        }
        insert(&mut routes[r], p, d, i, j);
    }
    for route in &mut routes {
        relocate(inst, route);
    }
    Ok(routes)
}

/// Move single requests within a route while the distance strictly drops.
fn relocate(inst: &PdptwInstance, route: &mut Vec<usize>) {
    loop {
        let current = inst.route_distance(route);
        let mut improved = false;
        let pickups: Vec<usize> = route.iter().copied().filter(|&k| inst.locations[k].is_pickup()).collect();
        for p in pickups {
            let d = inst.locations[p].delivery;
            let rest: Vec<usize> = route.iter().copied().filter(|&k| k != p && k != d).collect();
            if let Some((delta, i, j)) = best_insertion(inst, &rest, p, d) {
                if inst.route_distance(&rest) + delta < current - IMPROVE_EPS {
                    let mut next = rest;
                    insert(&mut next, p, d, i, j);
                    *route = next;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::pdptw::{evaluate_routes, parse_pdptw, tests::ONE_REQUEST, verify_routes, RoutePlan};

    #[test]
    fn one_request() {
        let inst = parse_pdptw(ONE_REQUEST).unwrap();
        let rp = RoutePlan(solve(&inst).unwrap());
        assert!(verify_routes(&inst, &rp).is_empty());
        assert_eq!(evaluate_routes(&inst, &rp), 4.0);
    }

    #[test]
    fn nested_requests_share_a_route() {
        let inst = parse_pdptw(
            "2 10\n0 0 0 0 0 1000 0 0 0\n1 1 0 3 0 1000 0 0 3\n2 2 0 3 0 1000 0 0 4\n3 4 0 -3 0 1000 0 1 0\n4 3 0 -3 0 1000 0 2 0\n",
        )
        .unwrap();
        let rp = RoutePlan(solve(&inst).unwrap());
        assert!(verify_routes(&inst, &rp).is_empty());
        assert_eq!(rp.0.len(), 1);
        assert_eq!(evaluate_routes(&inst, &rp), 8.0);
    }

    #[test]
    fn impossible_window_is_reported() {
        let inst = parse_pdptw("1 10\n0 0 0 0 0 1000 0 0 0\n1 100 0 3 0 5 0 0 2\n2 1 0 -3 0 1000 0 1 0\n").unwrap();
        assert!(solve(&inst).is_err());
    }
}
