//! Scripted target trajectories: crossings, turn-backs, and walk-bys.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Vec2};
use crate::trace::{TargetState, Trajectory};

/// Shared motion parameters for the trajectory constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionParams {
    pub speed_mps: f64,
    /// Path length on each side of the event point, meters.
    pub approach_dist_m: f64,
    pub body_len_m: f64,
    pub sample_rate_hz: f64,
}

impl Default for MotionParams {
    fn default() -> Self {
        MotionParams {
            speed_mps: 1.2,
            approach_dist_m: 1.5,
            body_len_m: 0.4,
            sample_rate_hz: 1000.0,
        }
    }
}

impl MotionParams {
    fn validate(&self) -> Result<()> {
        if self.speed_mps <= 0.0 || self.speed_mps.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "speed must be positive, got {}",
                self.speed_mps
            )));
        }
        if self.approach_dist_m <= 0.0 || self.approach_dist_m.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "approach distance must be positive, got {}",
                self.approach_dist_m
            )));
        }
        if self.body_len_m <= 0.0 || self.body_len_m.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "body length must be positive, got {}",
                self.body_len_m
            )));
        }
        if self.sample_rate_hz <= 0.0 || self.sample_rate_hz.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }
}

fn frame_count(duration_s: f64, fs: f64) -> usize {
    (duration_s * fs).round().max(1.0) as usize
}

fn cross_point(geometry: &Geometry, offset_m: f64) -> Result<Vec2> {
    let half = geometry.los_distance() / 2.0;
    if offset_m.abs() >= half {
        return Err(Error::InvalidArgument(format!(
            "cross point offset {offset_m} m outside the open LoS segment (half-span {half} m)"
        )));
    }
    Ok(geometry.los_midpoint() + geometry.los_dir() * offset_m)
}

fn walk_direction(geometry: &Geometry, angle_rad: f64) -> Result<Vec2> {
    if angle_rad.abs() >= FRAC_PI_2 {
        return Err(Error::InvalidArgument(format!(
            "angle {angle_rad} rad must satisfy |angle| < π/2"
        )));
    }
    let u = geometry.los_dir();
    let n = geometry.los_normal();
    Ok(n * angle_rad.cos() + u * angle_rad.sin())
}

/// Straight constant-speed path that crosses the LoS segment.
///
/// The path enters from the negative-normal side, passes through the
/// point `cross_point_offset_m` along the LoS from its midpoint at
/// `angle_rad` against the LoS normal, and exits the far side; total path
/// length is `2 × approach_dist_m`.
pub fn make_crossing(
    geometry: &Geometry,
    cross_point_offset_m: f64,
    angle_rad: f64,
    params: &MotionParams,
) -> Result<Trajectory> {
    params.validate()?;
    let q = cross_point(geometry, cross_point_offset_m)?;
    let dir = walk_direction(geometry, angle_rad)?;
    let start = q - dir * params.approach_dist_m;
    let heading = dir.y.atan2(dir.x);

    let fs = params.sample_rate_hz;
    let n = frame_count(2.0 * params.approach_dist_m / params.speed_mps, fs);
    let states = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            TargetState {
                t,
                center: start + dir * (params.speed_mps * t),
                heading,
                body_len_m: params.body_len_m,
            }
        })
        .collect();
    Ok(Trajectory { sample_rate_hz: fs, states })
}

/// Backward rock of the stepping pivot, meters. An about-turn is not a
/// rotation in place: the body backs off roughly half a stride while
/// swinging around, then comes forward again into the reversed walk.
pub const PIVOT_BACK_M: f64 = 0.55;

/// Heading sway amplitude during the pivot, radians.
pub const PIVOT_SWAY_RAD: f64 = 0.12;

/// Fraction of the pivot spent on the back-and-forth rock; the rest is
/// the heading swing.
pub const PIVOT_ROCK_FRACTION: f64 = 0.8;

/// Path that approaches the LoS line to `nearest_approach_m`, executes a
/// stepping pivot over `turn_duration_s` (the center rocks back up to
/// [`PIVOT_BACK_M`] along the incoming line and returns while the heading
/// sweeps π), and retreats along its incoming line. The signed distance
/// to the LoS line never changes sign.
pub fn make_turnback(
    geometry: &Geometry,
    cross_point_offset_m: f64,
    angle_rad: f64,
    nearest_approach_m: f64,
    turn_duration_s: f64,
    params: &MotionParams,
) -> Result<Trajectory> {
    params.validate()?;
    if nearest_approach_m <= 0.0 || nearest_approach_m.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "nearest approach must be positive, got {nearest_approach_m}"
        )));
    }
    if turn_duration_s < 0.0 {
        return Err(Error::InvalidArgument("turn duration must be >= 0".into()));
    }
    let q = cross_point(geometry, cross_point_offset_m)?;
    let dir = walk_direction(geometry, angle_rad)?;
    let start = q - dir * params.approach_dist_m;
    let start_dist = params.approach_dist_m * angle_rad.cos();
    if start_dist <= nearest_approach_m {
        return Err(Error::InvalidArgument(format!(
            "path starts {start_dist:.3} m from the LoS line, inside the nearest approach {nearest_approach_m} m"
        )));
    }
    // truncate the incoming leg where the perpendicular distance reaches
    // the nearest approach
    let leg_len = (start_dist - nearest_approach_m) / angle_rad.cos();
    let vertex = start + dir * leg_len;
    let heading_in = dir.y.atan2(dir.x);
    let back = PIVOT_BACK_M.min(leg_len);

    let fs = params.sample_rate_hz;
    let t_leg = leg_len / params.speed_mps;
    let total = 2.0 * t_leg + turn_duration_s;
    let n = frame_count(total, fs);
    let states = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let (center, heading) = if t <= t_leg {
                (start + dir * (params.speed_mps * t), heading_in)
            } else if t <= t_leg + turn_duration_s && turn_duration_s > 0.0 {
                // stepping pivot: half-step back and return while still
                // facing the line, then swing the heading around with the
                // sway of a body turning on its feet
                let frac = (t - t_leg) / turn_duration_s;
                if frac < PIVOT_ROCK_FRACTION {
                    // triangular out-and-back: constant speed, no dwell
                    let tau = frac / PIVOT_ROCK_FRACTION;
                    let rock = back * (1.0 - (1.0 - 2.0 * tau).abs());
                    (vertex - dir * rock, heading_in)
                } else {
                    let swing = (frac - PIVOT_ROCK_FRACTION) / (1.0 - PIVOT_ROCK_FRACTION);
                    let sway = PIVOT_SWAY_RAD * (3.0 * TAU * swing).sin();
                    (vertex, heading_in + PI * swing + sway)
                }
            } else {
                let out = t - t_leg - turn_duration_s;
                (vertex - dir * (params.speed_mps * out), heading_in + PI)
            };
            TargetState { t, center, heading, body_len_m: params.body_len_m }
        })
        .collect();
    Ok(Trajectory { sample_rate_hz: fs, states })
}

/// Straight path parallel to the LoS line at a constant `standoff_m`,
/// centered on the LoS midpoint.
pub fn make_walkby(
    geometry: &Geometry,
    standoff_m: f64,
    params: &MotionParams,
) -> Result<Trajectory> {
    params.validate()?;
    if standoff_m <= 0.0 || standoff_m.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "standoff must be positive, got {standoff_m}"
        )));
    }
    let u = geometry.los_dir();
    let n_hat = geometry.los_normal();
    let start = geometry.los_midpoint() + n_hat * standoff_m - u * params.approach_dist_m;
    let heading = u.y.atan2(u.x);

    let fs = params.sample_rate_hz;
    let n = frame_count(2.0 * params.approach_dist_m / params.speed_mps, fs);
    let states = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            TargetState {
                t,
                center: start + u * (params.speed_mps * t),
                heading,
                body_len_m: params.body_len_m,
            }
        })
        .collect();
    Ok(Trajectory { sample_rate_hz: fs, states })
}

/// Extend a trajectory with parked stretches before and after the motion
/// (the target stands still at the first/last state). Timestamps are
/// re-based so the result starts at t = 0.
pub fn with_margins(traj: &Trajectory, lead_in_s: f64, lead_out_s: f64) -> Result<Trajectory> {
    traj.validate()?;
    if lead_in_s < 0.0 || lead_out_s < 0.0 {
        return Err(Error::InvalidArgument("margins must be >= 0".into()));
    }
    let fs = traj.sample_rate_hz;
    let lead_in = (lead_in_s * fs).round() as usize;
    let lead_out = (lead_out_s * fs).round() as usize;
    let first = *traj.states.first().expect("validated non-empty");
    let last = *traj.states.last().expect("validated non-empty");

    let total = lead_in + traj.len() + lead_out;
    let states = (0..total)
        .map(|i| {
            let t = i as f64 / fs;
            let mut s = if i < lead_in {
                first
            } else if i < lead_in + traj.len() {
                traj.states[i - lead_in]
            } else {
                last
            };
            s.t = t;
            s
        })
        .collect();
    Ok(Trajectory { sample_rate_hz: fs, states })
}
