//! Benchmarks live in `benches/`; run with `cargo bench -p contraction-kit-bench`.
