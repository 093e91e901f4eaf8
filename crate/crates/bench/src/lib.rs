//! Criterion benchmarks for the radsim pipeline stages; see `benches/`.
