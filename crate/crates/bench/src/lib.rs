//! Benchmark-only crate; the measured code lives in `fincat`. See
//! `benches/engine.rs`.
