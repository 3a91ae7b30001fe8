//! Criterion benchmarks for the verifiers and reference solvers live in `benches/`.
