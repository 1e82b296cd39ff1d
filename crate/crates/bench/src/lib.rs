//! Benchmarks for the audit engine live under `benches/`.
