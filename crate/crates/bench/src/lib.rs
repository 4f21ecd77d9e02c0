//! Criterion benchmarks for the analysis pipeline, kept in a library so the
//! bench target stays a thin `criterion_main!` wrapper.

use std::hint::black_box;

use cohist_core::report::{analyze, AnalysisOptions};
use cohist_core::scenarios::{builtin, builtin_document};
use cohist_core::{check_compatibility, decoherence_functional, Scenario};
use criterion::Criterion;

pub fn benchmarks(c: &mut Criterion) {
    let fig1b = builtin("fig1b").expect("built-in");
    let eq7 = fig1b.family("eq7").expect("family");
    let eq8 = fig1b.family("eq8").expect("family");
    c.bench_function("decoherence/fig1b-eq8", |b| {
        b.iter(|| decoherence_functional(black_box(eq8)))
    });
    c.bench_function("compatibility/fig1b-eq7-eq8", |b| {
        b.iter(|| check_compatibility(black_box(eq7), black_box(eq8), 1e-10))
    });

    // 96 labels: photon modes times four two-state detectors
    let full = builtin_document("fig1b-full").expect("built-in");
    c.bench_function("load/fig1b-full", |b| {
        b.iter(|| Scenario::from_document(black_box(full.clone())))
    });
    let loaded = builtin("fig1b-full").expect("built-in");
    c.bench_function("analyze/fig1b-full", |b| {
        b.iter(|| analyze(black_box(&loaded), AnalysisOptions::default()))
    });
}
