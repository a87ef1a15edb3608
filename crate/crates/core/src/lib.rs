//! Synthesis and detection of WiFi channel-state-information traces for
//! zone-crossing sensing.
//!
//! A transceiver pair flanks a zone boundary (typically a doorway). A
//! walking target diffracts the signal; the resulting channel is modelled
//! as a static line-of-sight component plus a line integral over the
//! target's cross-section ([`synth`]). The detector cancels receiver
//! phase impairments with an antenna ratio, segments activity from the
//! receiver gain indicator ([`dsp`]), and decides crossing vs. not from
//! the extrema of the cumulative phase of the ratio differences
//! ([`detect`]).

pub mod detect;
pub mod dsp;
pub mod error;
pub mod geometry;
pub mod synth;
pub mod trace;

/// Complex channel sample (dimensionless re/im).
pub type ComplexSample = num_complex::Complex64;

pub use detect::{
    classify, detect, find_extrema, phase_track, BehaviorLabel, DetectParams, Detection, Extrema,
    PhasePattern, PhaseTrack,
};
pub use dsp::{
    csi_ratio, moving_average, ratio_of, segment_activity, RatioSeries, Segment, SegmentParams,
};
pub use error::{Error, Result};
pub use geometry::{path_sum, wavelength, Geometry, Vec2, SPEED_OF_LIGHT};
pub use synth::{
    agc_model, diffraction_response, free_space_los_gain, make_crossing, make_turnback,
    make_walkby, synthesize_trace, with_margins, MotionParams, SynthConfig,
};
pub use trace::{CsiFrame, CsiTrace, TargetState, Trajectory};
