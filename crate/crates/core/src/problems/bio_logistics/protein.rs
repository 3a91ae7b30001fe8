//! Protein sequence design on the H/P alphabet (maximise).
//!
//! Instance JSON: `{"n": 4, "contacts": [[0, 2, 1.5]], "exposure": [0.1, 0, 0, 0.3], "beta": 1.0}`.
//! Fitness is `sum(w_ij * s_i * s_j) - beta * sum(a_i * s_i)` with `s = 1` for H.
//! The solution is one line of `H`/`P` characters.

use serde::Deserialize;

use crate::error::{ParseError, SolverError};
use crate::problems::{content_lines, Problem, Violation};
use crate::types::ProblemId;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GcInstance {
    pub n: usize,
    pub contacts: Vec<(usize, usize, f64)>,
    pub exposure: Vec<f64>,
    pub beta: f64,
}

pub fn parse_gc(text: &str) -> Result<GcInstance, ParseError> {
    let g: GcInstance = serde_json::from_str(text)?;
    if g.exposure.len() != g.n {
        return Err(ParseError::new(format!(
            "exposure has {} entries for {} residues",
            g.exposure.len(),
            g.n
        )));
    }
    let ok = |x: f64| x.is_finite() && x >= 0.0;
    if !ok(g.beta) {
        return Err(ParseError::new("beta must be finite and non-negative"));
    }
    if let Some(i) = g.exposure.iter().position(|&a| !ok(a)) {
        return Err(ParseError::new(format!("exposure of residue {i} is invalid")));
    }
    for &(i, j, w) in &g.contacts {
        if !(i < j && j < g.n) {
            return Err(ParseError::new(format!("contact ({i}, {j}) needs 0 <= i < j < n")));
        }
        if !ok(w) {
            return Err(ParseError::new(format!("contact ({i}, {j}) has invalid weight")));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpSequence(pub String);

impl HpSequence {
    pub fn from_bits(bits: &[bool]) -> HpSequence {
        HpSequence(bits.iter().map(|&h| if h { 'H' } else { 'P' }).collect())
    }

    pub fn bits(&self) -> Vec<bool> {
        self.0.chars().map(|c| c == 'H').collect()
    }
}

pub fn parse_sequence(text: &str) -> Result<HpSequence, ParseError> {
    let lines: Vec<&str> = content_lines(text).map(|(_, l)| l).collect();
    match lines.as_slice() {
        [one] => Ok(HpSequence(one.to_string())),
        [] => Err(ParseError::new("empty sequence")),
        _ => Err(ParseError::new(format!("expected one line, found {}", lines.len()))),
    }
}

pub fn verify_sequence(inst: &GcInstance, s: &HpSequence) -> Vec<Violation> {
    let mut v = Vec::new();
    let len = s.0.chars().count();
    if len != inst.n {
        v.push(Violation::new("length", format!("sequence has {len} residues, expected {}", inst.n)));
    }
    if let Some((i, c)) = s.0.chars().enumerate().find(|&(_, c)| c != 'H' && c != 'P') {
        v.push(Violation::new("alphabet", format!("residue {i} is `{c}`, expected H or P")));
    }
    v
}

pub fn fitness(inst: &GcInstance, h: &[bool]) -> f64 {
    let mut contact = 0.0;
    for &(i, j, w) in &inst.contacts {
        if h[i] && h[j] {
            contact += w;
        }
    }
    let mut exposure = 0.0;
    for (i, &a) in inst.exposure.iter().enumerate() {
        if h[i] {
            exposure += a;
        }
    }
    contact - inst.beta * exposure
}

pub fn evaluate_gc(inst: &GcInstance, s: &HpSequence) -> f64 {
    fitness(inst, &s.bits())
}

pub struct ProteinDesign;

impl Problem for ProteinDesign {
    type Instance = GcInstance;
    type Solution = HpSequence;

    const ID: ProblemId = ProblemId::ProteinDesign;
    const SOLVER: &'static str = "min_cut_project_selection";

    fn parse_instance(text: &str) -> Result<GcInstance, ParseError> {
        parse_gc(text)
    }

    fn parse_solution(_: &GcInstance, text: &str) -> Result<HpSequence, ParseError> {
        parse_sequence(text)
    }

    fn render_solution(solution: &HpSequence) -> String {
        format!("{}\n", solution.0)
    }

    fn verify(instance: &GcInstance, solution: &HpSequence) -> Vec<Violation> {
        verify_sequence(instance, solution)
    }

    fn evaluate(instance: &GcInstance, solution: &HpSequence) -> f64 {
        evaluate_gc(instance, solution)
    }

    fn baseline(instance: &GcInstance) -> Result<HpSequence, SolverError> {
        Ok(HpSequence::from_bits(&crate::baselines::protein::optimal_design(instance)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, contacts: Vec<(usize, usize, f64)>, exposure: Vec<f64>, beta: f64) -> GcInstance {
        GcInstance {
            n,
            contacts,
            exposure,
            beta,
        }
    }

    #[test]
    fn all_polar_is_zero() {
        let g = inst(3, vec![(0, 1, 2.0)], vec![1.0, 1.0, 1.0], 1.0);
        assert_eq!(evaluate_gc(&g, &HpSequence("PPP".into())), 0.0);
    }

    #[test]
    fn single_contact_example() {
        let g = inst(2, vec![(0, 1, 2.0)], vec![0.5, 0.5], 1.0);
        let s = HpSequence("HH".into());
        assert!(verify_sequence(&g, &s).is_empty());
        assert_eq!(evaluate_gc(&g, &s), 1.0);
    }

    #[test]
    fn length_and_alphabet_violations() {
        let g = inst(2, vec![], vec![0.0, 0.0], 0.0);
        assert_eq!(verify_sequence(&g, &HpSequence("HHH".into()))[0].kind, "length");
        assert_eq!(verify_sequence(&g, &HpSequence("HX".into()))[0].kind, "alphabet");
    }

    #[test]
    fn parsing() {
        assert!(parse_gc(r#"{"n":2,"contacts":[[1,0,1.0]],"exposure":[0,0],"beta":0}"#).is_err());
        assert!(parse_gc(r#"{"n":2,"contacts":[],"exposure":[0],"beta":0}"#).is_err());
        assert!(parse_gc(r#"{"n":2,"contacts":[[0,1,-1]],"exposure":[0,0],"beta":0}"#).is_err());
        assert!(parse_gc(r#"{"n":2,"contacts":[[0,1,1]],"exposure":[0,0],"beta":0.5}"#).is_ok());
        assert!(parse_sequence("").is_err());
        assert!(parse_sequence("HP\nPH\n").is_err());
    }
}
