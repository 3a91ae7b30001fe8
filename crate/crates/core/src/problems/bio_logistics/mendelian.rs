//! Single-locus Mendelian error correction (minimise corrections).
//!
//! Instance JSON:
//!
//! ```json
//! {"alleles": 2,
//!  "individuals": [{"id": 1, "father": 0, "mother": 0, "genotype": [1, 1]},
//!                  {"id": 3, "father": 1, "mother": 2, "genotype": null}]}
//! ```
//!
//! Alleles are numbered `1..=alleles`; parent id 0 means unknown (founder).
//! The solution assigns every individual a genotype, one `id a b` line each.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

/// Unordered allele pair, stored with `.0 <= .1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genotype(pub u32, pub u32);

impl Genotype {
    pub fn new(a: u32, b: u32) -> Genotype {
        Genotype(a.min(b), a.max(b))
    }

    pub fn contains(self, x: u32) -> bool {
        self.0 == x || self.1 == x
    }

    /// Can a child with this genotype arise from parents `f` and `m`?
    pub fn inherits_from(self, f: Genotype, m: Genotype) -> bool {
        (f.contains(self.0) && m.contains(self.1)) || (f.contains(self.1) && m.contains(self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Individual {
    pub id: u32,
    pub father: u32,
    pub mother: u32,
    pub genotype: Option<[u32; 2]>,
}

impl Individual {
    pub fn observed(&self) -> Option<Genotype> {
        self.genotype.map(|[a, b]| Genotype::new(a, b))
    }

    pub fn is_founder(&self) -> bool {
        self.father == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pedigree {
    pub alleles: u32,
    pub individuals: Vec<Individual>,
}

impl Pedigree {
    pub fn index(&self) -> HashMap<u32, usize> {
        self.individuals.iter().enumerate().map(|(i, p)| (p.id, i)).collect()
    }

    /// Parent indices of individual `i`, if it is not a founder.
    pub fn parents(&self, idx: &HashMap<u32, usize>, i: usize) -> Option<(usize, usize)> {
        let p = &self.individuals[i];
        (!p.is_founder()).then(|| (idx[&p.father], idx[&p.mother]))
    }

    /// Individual indices with parents before children.
    pub fn topological_order(&self) -> Vec<usize> {
        let idx = self.index();
        let n = self.individuals.len();
        let mut depth = vec![usize::MAX; n];
        fn depth_of(p: &Pedigree, idx: &HashMap<u32, usize>, depth: &mut [usize], i: usize) -> usize {
            if depth[i] != usize::MAX {
                return depth[i];
            }
            let d = match p.parents(idx, i) {
                None => 0,
                Some((f, m)) => 1 + depth_of(p, idx, depth, f).max(depth_of(p, idx, depth, m)),
            };
            depth[i] = d;
            d
        }
        for i in 0..n {
            depth_of(self, &idx, &mut depth, i);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (depth[i], self.individuals[i].id));
        order
    }
}

pub fn parse_pedigree(text: &str) -> Result<Pedigree, ParseError> {
    let p: Pedigree = serde_json::from_str(text)?;
    if p.alleles == 0 {
        return Err(ParseError::new("allele count must be positive"));
    }
    let mut idx = HashMap::new();
    for (i, ind) in p.individuals.iter().enumerate() {
        if ind.id == 0 {
            return Err(ParseError::new("individual id 0 is reserved for unknown parents"));
        }
        if idx.insert(ind.id, i).is_some() {
            return Err(ParseError::new(format!("individual {} listed twice", ind.id)));
        }
    }
    for ind in &p.individuals {
        if (ind.father == 0) != (ind.mother == 0) {
            return Err(ParseError::new(format!("individual {} has exactly one known parent", ind.id)));
        }
        for parent in [ind.father, ind.mother] {
            if parent != 0 && !idx.contains_key(&parent) {
                return Err(ParseError::new(format!("individual {} references unknown parent {parent}", ind.id)));
            }
        }
        if ind.father != 0 && ind.father == ind.mother {
            return Err(ParseError::new(format!("individual {} has the same father and mother", ind.id)));
        }
        if let Some(g) = ind.genotype {
            if g.iter().any(|&a| a == 0 || a > p.alleles) {
                return Err(ParseError::new(format!(
                    "individual {} has an allele outside 1..={}",
                    ind.id, p.alleles
                )));
            }
        }
    }
    // Ancestry must be acyclic: colour-based DFS over parent links.
    let n = p.individuals.len();
    let mut state = vec![0u8; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0u8)];
        state[s] = 1;
        while let Some(&mut (i, ref mut k)) = stack.last_mut() {
            let ind = &p.individuals[i];
            let parents = [ind.father, ind.mother];
            if *k < 2 {
                let par = parents[*k as usize];
                *k += 1;
                if par == 0 {
                    continue;
                }
                let j = idx[&par];
                match state[j] {
                    0 => {
                        state[j] = 1;
                        stack.push((j, 0));
                    }
                    1 => return Err(ParseError::new(format!("individual {par} is its own ancestor"))),
                    _ => {}
                }
            } else {
                state[i] = 2;
                stack.pop();
            }
        }
    }
    Ok(p)
}

/// Raw `id a b` lines.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenotypeAssignment(pub Vec<(u32, u32, u32)>);

impl GenotypeAssignment {
    pub fn from_genotypes(p: &Pedigree, g: &[Genotype]) -> GenotypeAssignment {
        GenotypeAssignment(
            p.individuals
                .iter()
                .zip(g)
                .map(|(ind, g)| (ind.id, g.0, g.1))
                .collect(),
        )
    }
}

pub fn parse_assignment(text: &str) -> Result<GenotypeAssignment, ParseError> {
    let rows = content_lines(text)
        .map(|(ln, l)| {
            let v: Vec<u32> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| ParseError::at_line(ln, format!("invalid number `{t}`"))))
                .collect::<Result<_, _>>()?;
            match v.as_slice() {
                &[id, a, b] => Ok((id, a, b)),
                _ => Err(ParseError::at_line(ln, format!("expected `id a b`, got `{l}`"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(ParseError::new("empty assignment"));
    }
    Ok(GenotypeAssignment(rows))
}

pub fn render_assignment(a: &GenotypeAssignment) -> String {
    let mut s = String::new();
    for (id, x, y) in &a.0 {
        writeln!(s, "{id} {x} {y}").unwrap();
    }
    s
}

/// Assigned genotype per individual index, with naming/totality violations.
fn resolve(p: &Pedigree, a: &GenotypeAssignment, v: &mut Vec<Violation>) -> Vec<Option<Genotype>> {
    let idx = p.index();
    let mut out = vec![None; p.individuals.len()];
    for &(id, x, y) in &a.0 {
        let Some(&i) = idx.get(&id) else {
            v.push(Violation::new("unknown individual", format!("individual {id} is not in the pedigree")));
            continue;
        };
        if x == 0 || y == 0 || x > p.alleles || y > p.alleles {
            v.push(Violation::new(
                "allele",
                format!("individual {id}: alleles ({x}, {y}) outside 1..={}", p.alleles),
            ));
            continue;
        }
        if out[i].replace(Genotype::new(x, y)).is_some() {
            v.push(Violation::new("duplicate", format!("individual {id} assigned twice")));
        }
    }
    for (i, g) in out.iter().enumerate() {
        if g.is_none() && !v.iter().any(|v| v.message.starts_with(&format!("individual {}:", p.individuals[i].id))) {
            v.push(Violation::new(
                "missing",
                format!("individual {} has no genotype", p.individuals[i].id),
            ));
        }
    }
    out
}

/// Inheritance violations of a total assignment.
pub fn inheritance_violations(p: &Pedigree, g: &[Genotype]) -> Vec<Violation> {
    let idx = p.index();
    let mut v = Vec::new();
    for (i, ind) in p.individuals.iter().enumerate() {
        if let Some((f, m)) = p.parents(&idx, i) {
            if !g[i].inherits_from(g[f], g[m]) {
                v.push(Violation::new(
                    "inheritance",
                    format!(
                        "individual {} ({},{}) cannot inherit from father {} ({},{}) and mother {} ({},{})",
                        ind.id, g[i].0, g[i].1, ind.father, g[f].0, g[f].1, ind.mother, g[m].0, g[m].1
                    ),
                ));
            }
        }
    }
    v
}

pub fn verify_mendelian(p: &Pedigree, a: &GenotypeAssignment) -> Vec<Violation> {
    let mut v = Vec::new();
    let resolved = resolve(p, a, &mut v);
    if !v.is_empty() {
        return v;
    }
    let g: Vec<Genotype> = resolved.into_iter().map(Option::unwrap).collect();
    inheritance_violations(p, &g)
}

pub fn corrections(p: &Pedigree, g: &[Genotype]) -> usize {
    p.individuals
        .iter()
        .zip(g)
        .filter(|(ind, &g)| ind.observed().is_some_and(|o| o != g))
        .count()
}

pub fn evaluate_mendelian(p: &Pedigree, a: &GenotypeAssignment) -> f64 {
    let resolved = resolve(p, a, &mut Vec::new());
    p.individuals
        .iter()
        .zip(&resolved)
        .filter(|(ind, g)| match (ind.observed(), g) {
            (Some(o), Some(g)) => o != *g,
            _ => false,
        })
        .count() as f64
}

/// Observed genotypes keyed by id (for docs and tooling).
pub fn observations(p: &Pedigree) -> BTreeMap<u32, Genotype> {
    p.individuals
        .iter()
        .filter_map(|i| i.observed().map(|g| (i.id, g)))
        .collect()
}

pub struct MendelianError;

impl Problem for MendelianError {
    type Instance = Pedigree;
    type Solution = GenotypeAssignment;

    const ID: ProblemId = ProblemId::MendelianError;
    const SOLVER: &'static str = "exhaustive_or_greedy_repair";

    fn parse_instance(text: &str) -> Result<Pedigree, ParseError> {
        parse_pedigree(text)
    }

    fn parse_solution(_: &Pedigree, text: &str) -> Result<GenotypeAssignment, ParseError> {
        parse_assignment(text)
    }

    fn render_solution(solution: &GenotypeAssignment) -> String {
        render_assignment(solution)
    }

    fn verify(instance: &Pedigree, solution: &GenotypeAssignment) -> Vec<Violation> {
        verify_mendelian(instance, solution)
    }

    fn evaluate(instance: &Pedigree, solution: &GenotypeAssignment) -> f64 {
        evaluate_mendelian(instance, solution)
    }

    fn baseline(instance: &Pedigree) -> Result<GenotypeAssignment, SolverError> {
        crate::baselines::mendelian::correct(instance).map(|g| GenotypeAssignment::from_genotypes(instance, &g))
    }
}
