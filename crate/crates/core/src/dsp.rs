//! Raw-trace conditioning: moving-average denoising, the antenna-ratio
//! common-phase cancellation, and AGC-driven activity segmentation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trace::CsiTrace;
use crate::ComplexSample;

/// Denominator samples below this magnitude make the ratio degenerate.
pub const EPSILON_DENOMINATOR: f64 = 1e-9;

/// Per-frame quotient of two antennas' samples. The time-varying phase
/// common to all antennas of a frame cancels exactly in the quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub sample_rate_hz: f64,
    pub values: Vec<ComplexSample>,
    pub antenna_pair: (usize, usize),
}

/// Inclusive frame-index range of detected activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start_idx: usize,
    pub end_idx: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end_idx - self.start_idx + 1
    }

    pub fn is_empty(&self) -> bool {
        false // start_idx <= end_idx by construction
    }
}

/// Causal moving average, window shortened at the head:
/// `out[i] = mean(input[max(0, i-window+1) ..= i])`.
pub fn moving_average(series: &[ComplexSample], window: usize) -> Result<Vec<ComplexSample>> {
    if window == 0 {
        return Err(Error::InvalidArgument("moving-average window must be >= 1".into()));
    }
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    for &x in series {
        let last = *prefix.last().unwrap();
        prefix.push(last + x);
    }
    Ok((0..series.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            (prefix[i + 1] - prefix[lo]) / (i + 1 - lo) as f64
        })
        .collect())
}

/// Elementwise quotient of two complex series (used on filtered antenna
/// streams; [`csi_ratio`] is the raw-trace entry point).
pub fn ratio_of(
    numerator: &[ComplexSample],
    denominator: &[ComplexSample],
    pair: (usize, usize),
    sample_rate_hz: f64,
) -> Result<RatioSeries> {
    assert_eq!(numerator.len(), denominator.len());
    let mut values = Vec::with_capacity(numerator.len());
    for (i, (&a, &b)) in numerator.iter().zip(denominator).enumerate() {
        let mag = b.norm();
        if mag < EPSILON_DENOMINATOR {
            return Err(Error::DegenerateDenominator { frame: i, magnitude: mag });
        }
        values.push(a / b);
    }
    Ok(RatioSeries { sample_rate_hz, values, antenna_pair: pair })
}

/// Per-frame ratio of antenna `pair.0` to antenna `pair.1` of a raw trace.
pub fn csi_ratio(trace: &CsiTrace, pair: (usize, usize)) -> Result<RatioSeries> {
    let a = trace.antenna_series(pair.0)?;
    let b = trace.antenna_series(pair.1)?;
    ratio_of(&a, &b, pair, trace.sample_rate_hz)
}

/// Threshold segmentation parameters. Counts are in frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentParams {
    /// Quiet frames at the trace start used to estimate the noise floor.
    pub baseline_frames: usize,
    /// Deviation threshold in baseline standard deviations.
    pub k_sigma: f64,
    /// Additive floor on the deviation threshold (AGC units).
    pub deviation_floor: f64,
    pub min_segment_frames: usize,
    /// Active runs separated by less than this many frames are merged.
    pub merge_gap_frames: usize,
}

impl Default for SegmentParams {
    fn default() -> Self {
        SegmentParams {
            baseline_frames: 500,
            k_sigma: 4.0,
            deviation_floor: 0.5,
            min_segment_frames: 300,
            merge_gap_frames: 200,
        }
    }
}

/// Find activity windows in the AGC stream.
///
/// The baseline mean and deviation come from the first
/// `baseline_frames`; frames deviating from the mean by more than
/// `k_sigma·σ + deviation_floor` are active. Nearby runs are merged and
/// short runs dropped. Invariant to adding a constant to the whole series.
pub fn segment_activity(agc_series: &[f64], params: &SegmentParams) -> Result<Vec<Segment>> {
    let n = agc_series.len();
    if n <= params.baseline_frames {
        return Err(Error::InsufficientBaseline {
            needed: params.baseline_frames,
            got: n,
        });
    }
    let baseline = &agc_series[..params.baseline_frames];
    let mu = baseline.iter().sum::<f64>() / baseline.len() as f64;
    let var = baseline.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / baseline.len() as f64;
    let threshold = params.k_sigma * var.sqrt() + params.deviation_floor;

    // raw active runs
    let mut runs: Vec<Segment> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &x) in agc_series.iter().enumerate() {
        let active = (x - mu).abs() > threshold;
        match (active, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                runs.push(Segment { start_idx: s, end_idx: i - 1 });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push(Segment { start_idx: s, end_idx: n - 1 });
    }

    // merge runs separated by small gaps
    let mut merged: Vec<Segment> = Vec::new();
    for run in runs {
        match merged.last_mut() {
            Some(prev) if run.start_idx - prev.end_idx - 1 < params.merge_gap_frames => {
                prev.end_idx = run.end_idx;
            }
            _ => merged.push(run),
        }
    }

    merged.retain(|s| s.len() >= params.min_segment_frames);
    Ok(merged)
}
