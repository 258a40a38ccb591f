//! Benchmarks for the stepping kernel and the sweep runner live in `benches/`.
