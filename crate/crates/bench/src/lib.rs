//! Criterion benchmarks for ymlattice-core live in `benches/`.
