//! Criterion benchmarks for `mub-core`; see `benches/`.
