//! Combinational BLIF subset: `.model`, `.inputs`, `.outputs`, `.names`, `.end`,
//! backslash continuation, `#` comments and `-` don't-cares in cover rows.
//!
//! Networks simulate 64 input patterns per machine word.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lit {
    Zero,
    One,
    DontCare,
}

/// Single-output sum-of-cubes. With `on_set == false` the rows describe where
/// the function is 0 and the node computes their complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub rows: Vec<Vec<Lit>>,
    pub on_set: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicNode {
    pub inputs: Vec<String>,
    pub output: String,
    pub cover: Cover,
}

impl LogicNode {
    pub fn is_constant(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Evaluate over packed input words.
    fn eval_words(&self, inputs: &[&[u64]], out: &mut [u64]) {
        for (w, slot) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for row in &self.cover.rows {
                let mut m = !0u64;
                for (lit, vals) in row.iter().zip(inputs) {
                    match lit {
                        Lit::One => m &= vals[w],
                        Lit::Zero => m &= !vals[w],
                        Lit::DontCare => {}
                    }
                }
                acc |= m;
            }
            *slot = if self.cover.on_set { acc } else { !acc };
        }
    }

    /// Truth table of a node with at most 6 inputs; bit `p` holds the output
    /// for the input assignment whose bit `j` drives input `j`.
    pub fn truth_table(&self) -> u64 {
        let k = self.inputs.len();
        assert!(k <= 6);
        let vars: Vec<u64> = (0..k).map(var_mask).collect();
        let refs: Vec<&[u64]> = vars.iter().map(std::slice::from_ref).collect();
        let mut out = [0u64];
        self.eval_words(&refs, &mut out);
        out[0] & table_mask(k)
    }
}

/// Column pattern of variable `j` across the 64 assignments of six variables.
pub fn var_mask(j: usize) -> u64 {
    const MASKS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    MASKS[j]
}

/// Mask of the meaningful bits of a `k`-input truth table.
pub fn table_mask(k: usize) -> u64 {
    if k >= 6 {
        !0
    } else {
        (1u64 << (1 << k)) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlifNetwork {
    pub model: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub nodes: Vec<LogicNode>,
}

/// A reason a network cannot be simulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuralIssue {
    UndefinedSignal { signal: String, user: String },
    UndrivenOutput(String),
    Cycle(String),
}

impl std::fmt::Display for StructuralIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructuralIssue::UndefinedSignal { signal, user } => {
                write!(f, "signal `{signal}` used by `{user}` is never defined")
            }
            StructuralIssue::UndrivenOutput(o) => write!(f, "primary output `{o}` is not driven"),
            StructuralIssue::Cycle(s) => write!(f, "combinational cycle through `{s}`"),
        }
    }
}

/// Join continuation lines and strip comments, keeping the first physical line number.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim_end();
        let (body, cont) = match line.strip_suffix('\\') {
            Some(b) => (b, true),
            None => (line, false),
        };
        let entry = pending.get_or_insert_with(|| (i + 1, String::new()));
        if !entry.1.is_empty() {
            entry.1.push(' ');
        }
        entry.1.push_str(body.trim());
        if !cont {
            let (ln, s) = pending.take().unwrap();
            if !s.trim().is_empty() {
                out.push((ln, s));
            }
        }
    }
    if let Some((ln, s)) = pending {
        if !s.trim().is_empty() {
            out.push((ln, s));
        }
    }
    out
}

fn parse_row(ln: usize, line: &str, n_inputs: usize) -> Result<(Vec<Lit>, bool), ParseError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let (pattern, bit) = match (n_inputs, toks.as_slice()) {
        (0, [b]) => ("", *b),
        (_, [p, b]) if n_inputs > 0 => (*p, *b),
        _ => {
            return Err(ParseError::at_line(
                ln,
                format!("cover row `{line}` does not match {n_inputs} input(s)"),
            ))
        }
    };
    if pattern.chars().count() != n_inputs {
        return Err(ParseError::at_line(
            ln,
            format!("cover row `{line}` has {} literals, expected {n_inputs}", pattern.len()),
        ));
    }
    let lits = pattern
        .chars()
        .map(|c| match c {
            '0' => Ok(Lit::Zero),
            '1' => Ok(Lit::One),
            '-' => Ok(Lit::DontCare),
            _ => Err(ParseError::at_line(ln, format!("invalid literal `{c}`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let on = match bit {
        "1" => true,
        "0" => false,
        _ => return Err(ParseError::at_line(ln, format!("invalid output bit `{bit}`"))),
    };
    Ok((lits, on))
}

pub fn parse_blif(text: &str) -> Result<BlifNetwork, ParseError> {
    let lines = logical_lines(text);
    let mut net = BlifNetwork::default();
    let mut saw_model = false;
    let mut defined: HashSet<String> = HashSet::new();
    let mut i = 0;
    while i < lines.len() {
        let (ln, line) = &lines[i];
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or_default();
        i += 1;
        match head {
            ".model" => {
                net.model = toks.next().unwrap_or_default().to_string();
                saw_model = true;
            }
            ".inputs" => {
                for t in toks {
                    if !defined.insert(t.to_string()) {
                        return Err(ParseError::at_line(*ln, format!("signal `{t}` defined twice")));
                    }
                    net.inputs.push(t.to_string());
                }
            }
            ".outputs" => net.outputs.extend(toks.map(str::to_string)),
            ".names" => {
                let mut sigs: Vec<String> = toks.map(str::to_string).collect();
                let output = sigs
                    .pop()
                    .ok_or_else(|| ParseError::at_line(*ln, ".names without an output signal"))?;
                if !defined.insert(output.clone()) {
                    return Err(ParseError::at_line(*ln, format!("signal `{output}` defined twice")));
                }
                let mut rows = Vec::new();
                let mut polarity: Option<bool> = None;
                while i < lines.len() && !lines[i].1.starts_with('.') {
                    let (rln, row) = &lines[i];
                    let (lits, on) = parse_row(*rln, row, sigs.len())?;
                    if *polarity.get_or_insert(on) != on {
                        return Err(ParseError::at_line(*rln, "cover mixes on-set and off-set rows"));
                    }
                    rows.push(lits);
                    i += 1;
                }
                net.nodes.push(LogicNode {
                    inputs: sigs,
                    output,
                    cover: Cover {
                        rows,
                        on_set: polarity.unwrap_or(true),
                    },
                });
            }
            ".end" => break,
            other if other.starts_with('.') => {
                return Err(ParseError::at_line(*ln, format!("unsupported directive `{other}`")))
            }
            _ => return Err(ParseError::at_line(*ln, format!("unexpected line `{line}`"))),
        }
    }
    if !saw_model {
        return Err(ParseError::new("missing .model"));
    }
    Ok(net)
}

impl BlifNetwork {
    pub fn node_by_output(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.output.as_str(), i))
            .collect()
    }

    /// Node indices in dependency order, or the structural problems preventing one.
    pub fn topological_order(&self) -> Result<Vec<usize>, Vec<StructuralIssue>> {
        let drivers = self.node_by_output();
        let pis: HashSet<&str> = self.inputs.iter().map(String::as_str).collect();
        let mut issues = Vec::new();
        for n in &self.nodes {
            for s in &n.inputs {
                if !pis.contains(s.as_str()) && !drivers.contains_key(s.as_str()) {
                    issues.push(StructuralIssue::UndefinedSignal {
                        signal: s.clone(),
                        user: n.output.clone(),
                    });
                }
            }
        }
        for o in &self.outputs {
            if !pis.contains(o.as_str()) && !drivers.contains_key(o.as_str()) {
                issues.push(StructuralIssue::UndrivenOutput(o.clone()));
            }
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        // Kahn's algorithm over node -> node dependencies.
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut fanout = vec![Vec::new(); n];
        for (v, node) in self.nodes.iter().enumerate() {
            for s in &node.inputs {
                if let Some(&u) = drivers.get(s.as_str()) {
                    indeg[v] += 1;
                    fanout[u].push(v);
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in fanout[u].iter().rev() {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap();
            return Err(vec![StructuralIssue::Cycle(self.nodes[stuck].output.clone())]);
        }
        Ok(order)
    }

    /// Simulate with `words` packed patterns per primary input (in `self.inputs`
    /// order). Returns the packed values of every primary output, in order.
    pub fn simulate(&self, input_words: &[Vec<u64>]) -> Result<Vec<Vec<u64>>, Vec<StructuralIssue>> {
        assert_eq!(input_words.len(), self.inputs.len());
        let words = input_words.first().map_or(1, Vec::len);
        let order = self.topological_order()?;
        let mut values: HashMap<&str, Vec<u64>> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(input_words.iter().cloned())
            .collect();
        for idx in order {
            let node = &self.nodes[idx];
            let mut out = vec![0u64; words];
            {
                let ins: Vec<&[u64]> = node
                    .inputs
                    .iter()
                    .map(|s| values[s.as_str()].as_slice())
                    .collect();
                node.eval_words(&ins, &mut out);
            }
            values.insert(node.output.as_str(), out);
        }
        Ok(self
            .outputs
            .iter()
            .map(|o| values[o.as_str()].clone())
            .collect())
    }

    pub fn max_fanin(&self) -> usize {
        self.nodes.iter().map(|n| n.inputs.len()).max().unwrap_or(0)
    }
}

pub fn write_blif(net: &BlifNetwork) -> String {
    let mut s = String::new();
    writeln!(s, ".model {}", net.model).unwrap();
    writeln!(s, ".inputs {}", net.inputs.join(" ")).unwrap();
    writeln!(s, ".outputs {}", net.outputs.join(" ")).unwrap();
    for n in &net.nodes {
        if n.inputs.is_empty() {
            writeln!(s, ".names {}", n.output).unwrap();
        } else {
            writeln!(s, ".names {} {}", n.inputs.join(" "), n.output).unwrap();
        }
        let bit = if n.cover.on_set { '1' } else { '0' };
        for row in &n.cover.rows {
            let pat: String = row
                .iter()
                .map(|l| match l {
                    Lit::Zero => '0',
                    Lit::One => '1',
                    Lit::DontCare => '-',
                })
                .collect();
            if pat.is_empty() {
                writeln!(s, "{bit}").unwrap();
            } else {
                writeln!(s, "{pat} {bit}").unwrap();
            }
        }
    }
    s.push_str(".end\n");
    s
}

/// Sum-of-minterms cover for a truth table over `k` inputs.
pub fn cover_from_table(table: u64, k: usize) -> Cover {
    let rows = (0..1usize << k)
        .filter(|&p| (table >> p) & 1 == 1)
        .map(|p| {
            (0..k)
                .map(|j| if (p >> j) & 1 == 1 { Lit::One } else { Lit::Zero })
                .collect()
        })
        .collect();
    Cover { rows, on_set: true }
}
