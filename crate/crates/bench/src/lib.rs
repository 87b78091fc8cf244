//! Criterion benchmarks for `isoscatter-core`; see `benches/pipeline.rs`.
