//! Benchmarks for the `phasemode` pipeline live in `benches/`.
