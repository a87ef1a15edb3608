//! Faithfulness of the phase tracker to a plain reimplementation of the
//! pattern-extraction recipe: angles of consecutive differences, wrapped
//! increments, cumulative sum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::{PI, TAU};
use wicross_core::*;

/// Straightforward loop-by-loop reimplementation, kept independent of
/// the library code path.
fn brute_force_pattern(csi: &[Complex64]) -> Vec<f64> {
    let mut phases = Vec::new();
    for i in 0..csi.len() - 1 {
        let d = csi[i + 1] - csi[i];
        if d.norm() > 0.0 {
            phases.push(d.im.atan2(d.re));
        }
    }
    let mut sum = vec![0.0];
    for i in 0..phases.len() - 1 {
        let mut dp = phases[i + 1] - phases[i];
        while dp > PI {
            dp -= TAU;
        }
        while dp <= -PI {
            dp += TAU;
        }
        sum.push(sum[i] + dp);
    }
    sum
}

#[test]
fn phase_track_matches_brute_force_on_random_sequences() {
    let mut rng = ChaCha12Rng::seed_from_u64(1414);
    for case in 0..50 {
        let n = rng.random_range(50..2000);
        let series: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        // gating off => only exact-zero differences are dropped, which a
        // continuous random draw never produces
        let track = phase_track(&series, 0.0).unwrap();
        let expected = brute_force_pattern(&series);
        assert_eq!(track.phase_sum.len(), expected.len(), "case {case}");
        for (i, (a, b)) in track.phase_sum.iter().zip(&expected).enumerate() {
            assert!(
                (a - b).abs() <= 1e-12,
                "case {case}, index {i}: {a} vs {b}"
            );
        }
        assert_eq!(track.gated_fraction, 0.0);
    }
}

#[test]
fn phase_track_matches_brute_force_on_synthetic_ratio() {
    // same check on a realistic ratio series from the synthesizer
    let g = Geometry::doorway(2.0, 5.24e9).unwrap();
    let traj = make_crossing(&g, 0.0, 0.0, &MotionParams::default()).unwrap();
    let cfg = SynthConfig {
        los_gain: free_space_los_gain(&g),
        noise_snr_db: Some(25.0),
        rng_seed: 5,
        ..SynthConfig::default()
    };
    let trace = synthesize_trace(&g, &traj, &cfg, "alg1").unwrap();
    let ratio = csi_ratio(&trace, (0, 1)).unwrap();
    let track = phase_track(&ratio.values, 0.0).unwrap();
    let expected = brute_force_pattern(&ratio.values);
    assert_eq!(track.phase_sum.len(), expected.len());
    for (a, b) in track.phase_sum.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12);
    }
}
