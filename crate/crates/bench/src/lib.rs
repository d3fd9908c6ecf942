//! Criterion benchmarks for the protocol engine and optimizer; see `benches/`.
