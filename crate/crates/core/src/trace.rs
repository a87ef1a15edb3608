//! Trajectory and CSI trace containers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Vec2};
use crate::ComplexSample;

/// Tolerance for "timestamps advance by exactly one sample period".
pub const TIMESTAMP_TOL_S: f64 = 1e-9;

/// One time-stamped target state: where the scatterer is, which way it
/// faces, and how wide it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetState {
    pub t: f64,
    pub center: Vec2,
    /// Direction of motion, radians.
    pub heading: f64,
    /// Scatterer segment length, meters.
    pub body_len_m: f64,
}

/// A uniformly sampled sequence of target states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub sample_rate_hz: f64,
    pub states: Vec<TargetState>,
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidArgument("trajectory has no states".into()));
        }
        if self.sample_rate_hz <= 0.0 || self.sample_rate_hz.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        let dt = 1.0 / self.sample_rate_hz;
        for (i, w) in self.states.windows(2).enumerate() {
            let step = w[1].t - w[0].t;
            if step <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "timestamps not strictly increasing at state {}",
                    i + 1
                )));
            }
            if (step - dt).abs() > TIMESTAMP_TOL_S {
                return Err(Error::InvalidArgument(format!(
                    "timestamp step {} at state {} deviates from 1/{} Hz",
                    step,
                    i + 1,
                    self.sample_rate_hz
                )));
            }
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.body_len_m <= 0.0 || s.body_len_m.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "body_len_m must be positive at state {i}"
                )));
            }
            if !s.center.is_finite() || !s.heading.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite state {i}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }
}

/// One received CSI frame: a timestamp, the receiver gain indicator, and
/// one complex sample per receive antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiFrame {
    pub t: f64,
    pub agc: f64,
    pub samples: Vec<ComplexSample>,
}

/// A full capture: geometry, rate, frames, and free-form annotations
/// (trajectory label, seed, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTrace {
    pub geometry: Geometry,
    pub sample_rate_hz: f64,
    pub frames: Vec<CsiFrame>,
    pub meta: BTreeMap<String, String>,
}

impl CsiTrace {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.sample_rate_hz <= 0.0 || self.sample_rate_hz.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        let n_ant = self.geometry.num_antennas();
        let dt = 1.0 / self.sample_rate_hz;
        for (i, f) in self.frames.iter().enumerate() {
            if f.samples.len() != n_ant {
                return Err(Error::InvalidArgument(format!(
                    "frame {i} has {} samples, geometry has {n_ant} antennas",
                    f.samples.len()
                )));
            }
            for (k, s) in f.samples.iter().enumerate() {
                if !s.re.is_finite() || !s.im.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite sample at frame {i}, antenna {k}"
                    )));
                }
            }
        }
        for (i, w) in self.frames.windows(2).enumerate() {
            let step = w[1].t - w[0].t;
            if step <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "frame timestamps not strictly increasing at frame {}",
                    i + 1
                )));
            }
            if (step - dt).abs() > TIMESTAMP_TOL_S {
                return Err(Error::InvalidArgument(format!(
                    "frame timestamp step {} at frame {} deviates from declared rate",
                    step,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn num_antennas(&self) -> usize {
        self.geometry.num_antennas()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// The per-frame gain-indicator series.
    pub fn agc_series(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.agc).collect()
    }

    /// All samples of one antenna, in frame order.
    pub fn antenna_series(&self, antenna: usize) -> Result<Vec<ComplexSample>> {
        if antenna >= self.num_antennas() {
            return Err(Error::InvalidArgument(format!(
                "antenna index {antenna} out of range (have {})",
                self.num_antennas()
            )));
        }
        Ok(self.frames.iter().map(|f| f.samples[antenna]).collect())
    }
}
