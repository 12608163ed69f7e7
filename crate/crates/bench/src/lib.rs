//! Criterion benchmarks for the capshape solvers; see `benches/`.
