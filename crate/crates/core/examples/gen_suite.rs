//! Regenerates the bundled suite and its reference costs.
//!
//! ```text
//! cargo run -p cobench-core --example gen_suite [SUITE_DIR] [REFS_DIR]
//! ```
//!
//! Instances are drawn from fixed seeds; a seed whose instance the baseline
//! cannot solve is skipped in favour of the next one.

use std::fs;
use std::path::{Path, PathBuf};

use cobench_core::problems::adapter;
use cobench_core::refs::{build_reference_costs, write_references};
use cobench_core::suite::{bundled_refs, bundled_root};
use cobench_core::synth::{self, SynthRng};
use cobench_core::{ProblemId, Suite};

type Gen = fn(&mut SynthRng, usize) -> String;

fn write(root: &Path, p: ProblemId, split: &str, id: &str, text: &str) {
    let dir = root.join(p.as_str()).join(split);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join(format!("{id}.{}", p.instance_extension())), text).unwrap();
}

/// Draw from successive seeds until the baseline succeeds.
fn solvable(p: ProblemId, seed: u64, size: usize, gen: Gen) -> String {
    for attempt in 0..100 {
        let text = gen(&mut synth::rng(seed * 1000 + attempt), size);
        if adapter(p).run_baseline(&text).is_ok() {
            return text;
        }
    }
    panic!("{p}: no solvable instance near seed {seed}");
}

fn family(root: &Path, p: ProblemId, gen: Gen, demo: &[usize], eval: &[usize]) {
    for (k, &n) in demo.iter().enumerate() {
        write(root, p, "demo", &format!("d{}", k + 1), &solvable(p, k as u64 + 1, n, gen));
    }
    for (k, &n) in eval.iter().enumerate() {
        write(root, p, "eval", &format!("e{:02}", k + 1), &solvable(p, 100 + k as u64, n, gen));
    }
}

fn main() {
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let root = args.first().cloned().unwrap_or_else(bundled_root);
    let refs = args.get(1).cloned().unwrap_or_else(bundled_refs);
    for p in ProblemId::ALL {
        let _ = fs::remove_dir_all(root.join(p.as_str()).join("demo"));
        let _ = fs::remove_dir_all(root.join(p.as_str()).join("eval"));
    }

    family(&root, ProblemId::OperatorScheduling, |r, n| synth::scheduling(r, &format!("dfg{n}"), n, 6, 2), &[6, 10, 14], &[24, 36, 48, 64, 80]);

    // Mapping demos are fixed: a small random network, a 4x4 array
    // multiplier, and a deep narrow mesh that defeats exhaustive cut
    // enumeration.
    let tm = ProblemId::TechnologyMapping;
    write(&root, tm, "demo", "mesh16", &synth::mesh(&mut synth::rng(1), "mesh16", 16, 200, 6));
    write(&root, tm, "demo", "mult4", &synth::multiplier(4));
    write(&root, tm, "demo", "rand10", &synth::random_network(&mut synth::rng(10), "rand10", 6, 10, 3));
    write(&root, tm, "eval", "mult6", &synth::multiplier(6));
    for (k, n) in [40usize, 80, 120, 160].into_iter().enumerate() {
        let id = format!("rand{n}");
        write(&root, tm, "eval", &id, &synth::random_network(&mut synth::rng(200 + k as u64), &id, 10, n, 4));
    }

    family(&root, ProblemId::GlobalRouting, |r, n| synth::routing(r, n, n, 2, 2, n / 2, 3), &[6, 8, 10], &[12, 14, 16, 20, 24]);
    family(&root, ProblemId::EgraphExtraction, |r, n| synth::egraph(r, n, 3, 0.3).to_json(), &[6, 9, 12], &[20, 30, 40, 60, 80]);
    family(&root, ProblemId::IntraOpParallelism, |r, n| synth::iop(r, n, 2 * n as i64, n, 0.4), &[5, 7, 9], &[16, 24, 32, 40, 48]);
    family(&root, ProblemId::ProteinDesign, |r, n| synth::protein(r, n, 1.0), &[12, 16, 20], &[30, 40, 50, 60, 80]);
    family(&root, ProblemId::MendelianError, |r, n| synth::pedigree(r, n, n / 3, 3, 0.2, 0.08), &[7, 9, 10], &[16, 24, 32, 40, 60]);
    family(
        &root,
        ProblemId::CrewPairing,
        |r, n| synth::crew(r, n, &["BOS", "ORD"], &["BOS", "ORD", "DCA", "ATL", "DEN"]),
        &[3, 4, 5],
        &[8, 10, 12, 16, 20],
    );
    family(&root, ProblemId::Pdptw, |r, n| synth::pdptw(r, n, n.div_ceil(2), 60), &[2, 3, 4], &[6, 8, 10, 12, 15]);

    for p in ProblemId::ALL {
        let suite = Suite::load(&root, p).unwrap_or_else(|e| panic!("{p}: {e}"));
        let sols = build_reference_costs(&suite).unwrap_or_else(|e| panic!("{e}"));
        write_references(&refs, p, &sols).unwrap();
        println!("{p}: {} demo, {} eval", suite.demo.len(), suite.eval.len());
    }
}
