//! Shared scenario builders for the benchmarks.

use wicross_core::*;

pub const CARRIER_HZ: f64 = 5.24e9;

pub fn doorway() -> Geometry {
    Geometry::doorway(2.0, CARRIER_HZ).expect("standard doorway geometry")
}

/// A mid-doorway perpendicular crossing with the usual parked margins.
pub fn crossing_trajectory() -> Trajectory {
    let g = doorway();
    let traj = make_crossing(&g, 0.0, 0.0, &MotionParams::default()).expect("crossing");
    with_margins(&traj, 1.0, 0.2).expect("margins")
}

pub fn synth_config(g: &Geometry, seed: u64) -> SynthConfig {
    SynthConfig {
        los_gain: free_space_los_gain(g),
        noise_snr_db: Some(25.0),
        phase_drift_per_frame_rad: 0.2,
        rng_seed: seed,
        ..SynthConfig::default()
    }
}

/// A ready-to-detect noisy crossing trace.
pub fn crossing_trace(seed: u64) -> CsiTrace {
    let g = doorway();
    let traj = crossing_trajectory();
    synthesize_trace(&g, &traj, &synth_config(&g, seed), "bench").expect("trace")
}
