use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wicross_bench::{crossing_trace, crossing_trajectory, doorway, synth_config};
use wicross_core::*;

fn bench_diffraction_response(c: &mut Criterion) {
    let g = doorway();
    let cfg = SynthConfig::default();
    let state = TargetState {
        t: 0.0,
        center: Vec2::new(1.0, 0.4),
        heading: std::f64::consts::FRAC_PI_2,
        body_len_m: 0.4,
    };
    c.bench_function("diffraction_response_64pt", |b| {
        b.iter(|| diffraction_response(black_box(&g), 0, black_box(&state), &cfg).unwrap())
    });
}

fn bench_synthesize_trace(c: &mut Criterion) {
    let g = doorway();
    let traj = crossing_trajectory();
    let cfg = synth_config(&g, 1);
    c.bench_function("synthesize_crossing_trace", |b| {
        b.iter(|| synthesize_trace(black_box(&g), black_box(&traj), &cfg, "bench").unwrap())
    });
}

fn bench_detect(c: &mut Criterion) {
    let trace = crossing_trace(2);
    let params = DetectParams::default();
    c.bench_function("detect_pipeline", |b| {
        b.iter(|| detect(black_box(&trace), &params).unwrap())
    });
}

fn bench_phase_track(c: &mut Criterion) {
    let trace = crossing_trace(3);
    let ratio = csi_ratio(&trace, (0, 1)).unwrap();
    c.bench_function("phase_track_full_trace", |b| {
        b.iter(|| phase_track(black_box(&ratio.values), 0.1).unwrap())
    });
}

criterion_group!(
    benches,
    bench_diffraction_response,
    bench_synthesize_trace,
    bench_detect,
    bench_phase_track
);
criterion_main!(benches);
