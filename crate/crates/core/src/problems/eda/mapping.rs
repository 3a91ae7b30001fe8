//! K-LUT technology mapping with K = 6: the solution is a BLIF network whose
//! nodes each have at most six inputs, functionally equivalent to the source.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::blif::{parse_blif, write_blif, BlifNetwork};
use crate::error::{ParseError, SolverError};
use crate::problems::{Problem, Violation};
use crate::types::ProblemId;

pub const LUT_K: usize = 6;
/// Largest primary-input count checked exhaustively.
pub const EXHAUSTIVE_PI_LIMIT: usize = 14;
pub const SAMPLED_PATTERNS: usize = 4096;
pub const SAMPLE_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    Exhaustive,
    Sampled,
}

pub fn equivalence_mode(num_inputs: usize) -> EquivalenceMode {
    if num_inputs <= EXHAUSTIVE_PI_LIMIT {
        EquivalenceMode::Exhaustive
    } else {
        EquivalenceMode::Sampled
    }
}

/// Packed stimulus for `inputs` (one word vector per input) plus a mask of the
/// valid bits in each word.
pub fn stimulus(inputs: &[String]) -> (Vec<Vec<u64>>, Vec<u64>) {
    let n = inputs.len();
    match equivalence_mode(n) {
        EquivalenceMode::Exhaustive => {
            let patterns = 1usize << n;
            let words = patterns.div_ceil(64);
            let mut cols = vec![vec![0u64; words]; n];
            for (j, col) in cols.iter_mut().enumerate() {
                for (w, slot) in col.iter_mut().enumerate() {
                    let mut v = 0u64;
                    for b in 0..64 {
                        let p = w * 64 + b;
                        if p < patterns && (p >> j) & 1 == 1 {
                            v |= 1 << b;
                        }
                    }
                    *slot = v;
                }
            }
            let mut mask = vec![!0u64; words];
            if patterns < 64 {
                mask[0] = (1u64 << patterns) - 1;
            }
            (cols, mask)
        }
        EquivalenceMode::Sampled => {
            // Draw per input in sorted-name order so the stimulus does not
            // depend on declaration order.
            let words = SAMPLED_PATTERNS / 64;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| inputs[a].cmp(&inputs[b]));
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
            let mut cols = vec![Vec::new(); n];
            for j in order {
                cols[j] = (0..words).map(|_| rng.gen::<u64>()).collect();
            }
            (cols, vec![!0u64; words])
        }
    }
}

/// Outputs of `net` under a stimulus laid out for `pi_order`.
fn simulate_in_order(
    net: &BlifNetwork,
    pi_order: &[String],
    cols: &[Vec<u64>],
) -> Result<Vec<Vec<u64>>, Vec<super::blif::StructuralIssue>> {
    let ins: Vec<Vec<u64>> = net
        .inputs
        .iter()
        .map(|name| {
            let j = pi_order.iter().position(|p| p == name).unwrap();
            cols[j].clone()
        })
        .collect();
    net.simulate(&ins)
}

pub fn verify_mapping(src: &BlifNetwork, out: &BlifNetwork) -> Vec<Violation> {
    let mut v = Vec::new();
    for node in &out.nodes {
        if node.inputs.len() > LUT_K {
            v.push(Violation::new(
                "fan-in",
                format!(
                    "node `{}` has {} inputs (limit {LUT_K})",
                    node.output,
                    node.inputs.len()
                ),
            ));
        }
    }
    let set = |xs: &[String]| xs.iter().cloned().collect::<BTreeSet<_>>();
    let interface_ok = set(&src.inputs) == set(&out.inputs) && set(&src.outputs) == set(&out.outputs);
    if !interface_ok {
        v.push(Violation::new(
            "interface",
            format!(
                "primary inputs/outputs differ from the source network (expected inputs {:?}, outputs {:?})",
                src.inputs, src.outputs
            ),
        ));
    }
    if out.inputs.len() != set(&out.inputs).len() {
        v.push(Violation::new("interface", "duplicate primary input"));
    }
    let structural = out.topological_order();
    if let Err(issues) = &structural {
        for i in issues {
            v.push(Violation::new("structure", i.to_string()));
        }
    }
    if !interface_ok || structural.is_err() || out.outputs.len() != set(&out.outputs).len() {
        return v;
    }

    let (cols, mask) = stimulus(&src.inputs);
    let expected = src
        .simulate(&cols)
        .expect("source network validated at parse time");
    let got = simulate_in_order(out, &src.inputs, &cols).expect("structure checked above");
    let mode = equivalence_mode(src.inputs.len());
    for (oi, name) in src.outputs.iter().enumerate() {
        let gi = out.outputs.iter().position(|o| o == name).unwrap();
        let diff = expected[oi]
            .iter()
            .zip(&got[gi])
            .zip(&mask)
            .enumerate()
            .find_map(|(w, ((a, b), m))| {
                let d = (a ^ b) & m;
                (d != 0).then(|| w * 64 + d.trailing_zeros() as usize)
            });
        if let Some(p) = diff {
            let msg = match mode {
                EquivalenceMode::Exhaustive => {
                    let assignment: Vec<String> = src
                        .inputs
                        .iter()
                        .enumerate()
                        .map(|(j, pi)| format!("{pi}={}", (p >> j) & 1))
                        .collect();
                    format!("output `{name}` differs from the source under {}", assignment.join(" "))
                }
                EquivalenceMode::Sampled => format!(
                    "output `{name}` differs from the source on random pattern {p} of {SAMPLED_PATTERNS} (seed {SAMPLE_SEED:#x})"
                ),
            };
            v.push(Violation::new("equivalence", msg));
        }
    }
    v
}

pub fn evaluate_mapping(out: &BlifNetwork) -> usize {
    out.nodes.len()
}

pub struct TechnologyMapping;

impl Problem for TechnologyMapping {
    type Instance = BlifNetwork;
    type Solution = BlifNetwork;

    const ID: ProblemId = ProblemId::TechnologyMapping;
    const SOLVER: &'static str = "priority_cut_mapper";

    fn parse_instance(text: &str) -> Result<BlifNetwork, ParseError> {
        let net = parse_blif(text)?;
        if let Err(issues) = net.topological_order() {
            return Err(ParseError::new(format!("source network is malformed: {}", issues[0])));
        }
        Ok(net)
    }

    fn parse_solution(_: &BlifNetwork, text: &str) -> Result<BlifNetwork, ParseError> {
        parse_blif(text)
    }

    fn render_solution(solution: &BlifNetwork) -> String {
        write_blif(solution)
    }

    fn verify(instance: &BlifNetwork, solution: &BlifNetwork) -> Vec<Violation> {
        verify_mapping(instance, solution)
    }

    fn evaluate(_: &BlifNetwork, solution: &BlifNetwork) -> f64 {
        evaluate_mapping(solution) as f64
    }

    fn baseline(instance: &BlifNetwork) -> Result<BlifNetwork, SolverError> {
        Ok(crate::baselines::techmap::map_luts(instance))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIVE_NODE: &str = "\
.model five
.inputs a b c d
.outputs y z
.names a b t1
11 1
.names c d t2
1- 1
-1 1
.names t1 t2 t3
10 1
01 1
.names t3 y
0 1
.names t1 d z
11 1
.end
";

    fn net(text: &str) -> BlifNetwork {
        parse_blif(text).unwrap()
    }

    #[test]
    fn identity_reemission_verifies_and_counts_nodes() {
        let src = net(FIVE_NODE);
        let out = net(&write_blif(&src));
        assert!(verify_mapping(&src, &out).is_empty());
        assert_eq!(evaluate_mapping(&out), 5);
    }

    #[test]
    fn seven_input_node_is_rejected() {
        let src = net(".model m\n.inputs a b c d e f g\n.outputs y\n.names a b c d e f g y\n1111111 1\n.end\n");
        let v = verify_mapping(&src, &src);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, "fan-in");
    }

    #[test]
    fn buffer_for_inverter_is_caught() {
        let src = net(".model m\n.inputs a\n.outputs y\n.names a y\n0 1\n.end\n");
        let out = net(".model m\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n");
        let v = verify_mapping(&src, &out);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, "equivalence");
        assert!(v[0].message.contains("a=0"), "{}", v[0]);
    }

    #[test]
    fn wire_model_with_one_buffer_counts_one() {
        let src = net(".model m\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n");
        assert!(verify_mapping(&src, &src).is_empty());
        assert_eq!(evaluate_mapping(&src), 1);
    }

    #[test]
    fn interface_and_structure_violations() {
        let src = net(FIVE_NODE);
        let renamed = net(&write_blif(&src).replace(".outputs y z", ".outputs y w"));
        assert!(verify_mapping(&src, &renamed).iter().any(|v| v.kind == "interface"));
        let dangling = net(".model m\n.inputs a b c d\n.outputs y z\n.names q y\n1 1\n.names a z\n1 1\n.end\n");
        assert!(verify_mapping(&src, &dangling).iter().any(|v| v.kind == "structure"));
    }

    #[test]
    fn sampled_mode_beyond_fourteen_inputs() {
        let names: Vec<String> = (0..16).map(|i| format!("x{i}")).collect();
        let xor_all = |flip: bool| {
            let mut s = format!(".model m\n.inputs {}\n.outputs y\n", names.join(" "));
            let mut prev = "x0".to_string();
            for (i, n) in names.iter().enumerate().skip(1) {
                let out = if i == names.len() - 1 { "y".to_string() } else { format!("t{i}") };
                let (r1, r2) = if flip && i == 5 { ("11 1", "00 1") } else { ("10 1", "01 1") };
                s.push_str(&format!(".names {prev} {n} {out}\n{r1}\n{r2}\n"));
                prev = out;
            }
            s + ".end\n"
        };
        let src = net(&xor_all(false));
        assert_eq!(equivalence_mode(src.inputs.len()), EquivalenceMode::Sampled);
        assert!(verify_mapping(&src, &src).is_empty());
        let v = verify_mapping(&src, &net(&xor_all(true)));
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("random pattern"));
    }

    #[test]
    fn input_declaration_order_is_irrelevant() {
        let src = net(FIVE_NODE);
        let permuted = net(&write_blif(&src).replace(".inputs a b c d", ".inputs d c b a"));
        assert!(verify_mapping(&src, &permuted).is_empty());
    }

    #[test]
    fn malformed_source_is_a_parse_error() {
        assert!(TechnologyMapping::parse_instance(".model m\n.inputs a\n.outputs y\n.end\n").is_err());
    }
}
