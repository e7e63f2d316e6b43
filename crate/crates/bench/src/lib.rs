//! Criterion benchmarks for `scatter2d-core`; see `benches/`.
