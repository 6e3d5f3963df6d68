//! Criterion benchmarks for the step rules live in `benches/`.
