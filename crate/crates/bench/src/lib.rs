//! Criterion benchmarks for the allocation solvers; see `benches/solvers.rs`.
