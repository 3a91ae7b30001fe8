mod common;

use common::oracles;

const CASES: usize = 200;

#[test]
fn scheduling_matches_brute_force() {
    oracles::scheduling_family(CASES, 1).unwrap();
}

#[test]
fn egraph_matches_brute_force() {
    oracles::egraph_family(CASES, 2).unwrap();
}

#[test]
fn iop_matches_brute_force() {
    oracles::iop_family(CASES, 3).unwrap();
}

#[test]
fn protein_matches_brute_force_and_baseline_is_optimal() {
    assert_eq!(oracles::protein_family(CASES, 4).unwrap(), CASES);
}

#[test]
fn mendelian_matches_brute_force() {
    oracles::mendelian_family(CASES, 5).unwrap();
}

#[test]
fn pdptw_matches_brute_force() {
    oracles::pdptw_family(CASES, 6).unwrap();
}
