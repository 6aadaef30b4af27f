//! Benchmarks for the `tdac` pipeline live in `benches/`.
