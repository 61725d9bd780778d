//! Criterion benchmarks for `qcoh-core`; see `benches/`.
