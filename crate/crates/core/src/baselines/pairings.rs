//! Greedy pairing construction: start from the earliest uncovered flight out
//! of a base and keep taking the earliest legal continuation, backtracking
//! only when a pairing cannot return to a base.

use crate::error::SolverError;
use crate::problems::crew::CrewInstance;

/// Expansion budget per pairing search.
const SEARCH_BUDGET: usize = 20_000;

struct Search<'a> {
    inst: &'a CrewInstance,
    order: &'a [usize],
    covered: &'a [bool],
    budget: usize,
}

impl Search<'_> {
    fn extend(&mut self, path: &mut Vec<usize>) -> bool {
        let first_dep = self.inst.flights[path[0]].dep;
        let last = *path.last().unwrap();
        if path.len() < self.inst.rules.max_legs && self.budget > 0 {
            for &next in self.order {
                if self.covered[next] || path.contains(&next) || !self.inst.can_follow(last, next) {
                    continue;
                }
                if self.inst.flights[next].arr - first_dep > self.inst.rules.max_span {
                    continue;
                }
                if self.budget == 0 {
                    break;
                }
                self.budget -= 1;
                path.push(next);
                if self.extend(path) {
                    return true;
                }
                path.pop();
            }
        }
        self.inst.is_base(&self.inst.flights[last].to)
    }
}

pub fn build(inst: &CrewInstance) -> Result<Vec<Vec<usize>>, SolverError> {
    let n = inst.flights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (inst.flights[i].dep, i));
    let mut covered = vec![false; n];
    let mut pairings = Vec::new();
    for &start in &order {
        if covered[start] {
            continue;
        }
        let f = &inst.flights[start];
        if !inst.is_base(&f.from) || f.arr - f.dep > inst.rules.max_span {
            return Err(SolverError(format!("flight `{}` cannot open a pairing", f.id)));
        }
        let mut path = vec![start];
        let mut search = Search {
            inst,
            order: &order,
            covered: &covered,
            budget: SEARCH_BUDGET,
        };
        if !search.extend(&mut path) {
            return Err(SolverError(format!("no legal pairing returns to a base after `{}`", f.id)));
        }
        for &i in &path {
            covered[i] = true;
        }
        pairings.push(path);
    }
    Ok(pairings)
}
