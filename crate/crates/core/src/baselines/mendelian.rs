//! Mendelian error correction: branch and bound for small pedigrees,
//! greedy observation-preserving repair otherwise.

use crate::error::SolverError;
use crate::problems::mendelian::{corrections, Genotype, Pedigree};

/// Largest pedigree solved exactly.
pub const EXACT_LIMIT: usize = 10;

fn all_genotypes(m: u32) -> Vec<Genotype> {
    (1..=m).flat_map(|a| (a..=m).map(move |b| Genotype(a, b))).collect()
}

/// Genotypes consistent with the already assigned parents of `i`, observed first.
fn options(p: &Pedigree, i: usize, parents: Option<(Genotype, Genotype)>, all: &[Genotype]) -> Vec<Genotype> {
    let mut out: Vec<Genotype> = match parents {
        None => all.to_vec(),
        Some((f, m)) => all.iter().copied().filter(|g| g.inherits_from(f, m)).collect(),
    };
    if let Some(o) = p.individuals[i].observed() {
        if let Some(pos) = out.iter().position(|&g| g == o) {
            out.remove(pos);
            out.insert(0, o);
        }
    }
    out
}

struct Bnb<'a> {
    p: &'a Pedigree,
    order: Vec<usize>,
    parents: Vec<Option<(usize, usize)>>,
    all: Vec<Genotype>,
    cur: Vec<Genotype>,
    best: Option<(usize, Vec<Genotype>)>,
}

impl Bnb<'_> {
    fn run(&mut self, k: usize, cost: usize) {
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if k == self.order.len() {
            self.best = Some((cost, self.cur.clone()));
            return;
        }
        let i = self.order[k];
        let par = self.parents[i].map(|(f, m)| (self.cur[f], self.cur[m]));
        let observed = self.p.individuals[i].observed();
        for g in options(self.p, i, par, &self.all) {
            self.cur[i] = g;
            let step = usize::from(observed.is_some_and(|o| o != g));
            self.run(k + 1, cost + step);
        }
    }
}

fn exact(p: &Pedigree) -> Option<Vec<Genotype>> {
    let idx = p.index();
    let n = p.individuals.len();
    let mut b = Bnb {
        p,
        order: p.topological_order(),
        parents: (0..n).map(|i| p.parents(&idx, i)).collect(),
        all: all_genotypes(p.alleles),
        cur: vec![Genotype(1, 1); n],
        best: None,
    };
    b.run(0, 0);
    b.best.map(|(_, g)| g)
}

/// Greedy: walk parents before children, keep each observation when the
/// parents allow it, otherwise take the consistent genotype closest to it.
fn greedy(p: &Pedigree) -> Option<Vec<Genotype>> {
    let idx = p.index();
    let all = all_genotypes(p.alleles);
    let mut g = vec![Genotype(1, 1); p.individuals.len()];
    for i in p.topological_order() {
        let par = p.parents(&idx, i).map(|(f, m)| (g[f], g[m]));
        let opts = options(p, i, par, &all);
        let observed = p.individuals[i].observed();
        let shared = |x: Genotype| match observed {
            Some(o) => usize::from(x.contains(o.0)) + usize::from(x.contains(o.1)),
            None => 0,
        };
        g[i] = match observed {
            Some(o) if opts.contains(&o) => o,
            _ => opts.iter().copied().max_by_key(|&x| (shared(x), std::cmp::Reverse(x)))?,
        };
    }
    Some(g)
}

pub fn correct(p: &Pedigree) -> Result<Vec<Genotype>, SolverError> {
    let g = if p.individuals.len() <= EXACT_LIMIT { exact(p) } else { greedy(p) };
    let g = g.ok_or_else(|| SolverError("no consistent genotype assignment".into()))?;
    debug_assert!(corrections(p, &g) <= p.individuals.len());
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::mendelian::{inheritance_violations, parse_pedigree};

    const TRIO: &str = r#"{"alleles": 2, "individuals": [
        {"id": 1, "father": 0, "mother": 0, "genotype": [1, 1]},
        {"id": 2, "father": 0, "mother": 0, "genotype": [1, 1]},
        {"id": 3, "father": 1, "mother": 2, "genotype": [1, 2]}]}"#;

    #[test]
    fn trio_needs_one_correction() {
        let p = parse_pedigree(TRIO).unwrap();
        let g = correct(&p).unwrap();
        assert!(inheritance_violations(&p, &g).is_empty());
        assert_eq!(corrections(&p, &g), 1);
    }

    #[test]
    fn greedy_is_consistent() {
        let p = parse_pedigree(TRIO).unwrap();
        let g = greedy(&p).unwrap();
        assert!(inheritance_violations(&p, &g).is_empty());
        assert_eq!(corrections(&p, &g), 1);
    }

    #[test]
    fn consistent_pedigree_is_kept() {
        let p = parse_pedigree(&TRIO.replace("\"id\": 2, \"father\": 0, \"mother\": 0, \"genotype\": [1, 1]", "\"id\": 2, \"father\": 0, \"mother\": 0, \"genotype\": [2, 2]")).unwrap();
        assert_eq!(corrections(&p, &correct(&p).unwrap()), 0);
    }
}
