//! Criterion benchmarks for the clustercert kernels; see `benches/kernels.rs`.
