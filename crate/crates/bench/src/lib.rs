//! Criterion benchmarks for `assocq`; see `benches/`.
