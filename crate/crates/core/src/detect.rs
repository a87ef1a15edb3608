//! Cumulative-phase pattern extraction and the crossing decision.
//!
//! The detector tracks the angle of consecutive differences of the
//! antenna-ratio series, accumulates the wrapped phase increments, and
//! classifies the activity window by the extrema of that cumulative
//! phase: one prominent maximum flanked by low endpoints means the target
//! crossed the line of sight; anything else does not.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::dsp::{moving_average, ratio_of, segment_activity, Segment, SegmentParams};
use crate::error::{Error, Result};
use crate::trace::CsiTrace;
use crate::ComplexSample;

/// Behavior classes. Only `Crossing` matters for the binary decision;
/// the other labels are diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BehaviorLabel {
    Crossing,
    TurnBack,
    WalkBy,
    NoEvent,
}

impl fmt::Display for BehaviorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BehaviorLabel::Crossing => "crossing",
            BehaviorLabel::TurnBack => "turn_back",
            BehaviorLabel::WalkBy => "walk_by",
            BehaviorLabel::NoEvent => "no_event",
        };
        f.write_str(s)
    }
}

/// Cumulative-phase series of one activity window with its prominent
/// extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePattern {
    /// Cumulative sum of wrapped phase increments, prefixed with 0.
    pub phase_sum: Vec<f64>,
    /// `(index, value)` of maxima with prominence above threshold.
    pub maxima: Vec<(usize, f64)>,
    /// `(index, value)` of minima; endpoints are eligible.
    pub minima: Vec<(usize, f64)>,
    /// Fraction of difference samples dropped by the magnitude gate.
    pub gated_fraction: f64,
}

impl PhasePattern {
    pub fn empty() -> Self {
        PhasePattern {
            phase_sum: Vec::new(),
            maxima: Vec::new(),
            minima: Vec::new(),
            gated_fraction: 0.0,
        }
    }
}

/// One classified activity window.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub label: BehaviorLabel,
    /// `label == Crossing`.
    pub binary: bool,
    pub segment: Segment,
    pub pattern: PhasePattern,
    /// Label from the secondary antenna pair, when available. Consistency
    /// check only; never fused into `label`.
    pub alt_label: Option<BehaviorLabel>,
}

/// Pipeline parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectParams {
    /// Moving-average window applied to each antenna stream, frames.
    pub ma_window: usize,
    /// Authoritative numerator/denominator antenna indices.
    pub primary_pair: (usize, usize),
    /// Magnitude gate on |ΔCSI| relative to the median.
    pub gate_rel: f64,
    /// Extrema prominence threshold relative to the series range.
    pub prominence_rel: f64,
    pub segmentation: SegmentParams,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            ma_window: 50,
            primary_pair: (0, 1),
            gate_rel: 0.1,
            prominence_rel: 0.15,
            segmentation: SegmentParams::default(),
        }
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Result of [`phase_track`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    pub phase_sum: Vec<f64>,
    pub gated_fraction: f64,
}

/// Cumulative phase of a ratio segment.
///
/// Differences of consecutive ratio samples are taken; differences with
/// magnitude below `gate_rel × median(|Δ|)` (and exact zeros, whose angle
/// is undefined) are dropped; the angles of the survivors are differenced,
/// wrapped into (−π, π], and cumulatively summed with a leading 0.
pub fn phase_track(ratio_segment: &[ComplexSample], gate_rel: f64) -> Result<PhaseTrack> {
    if ratio_segment.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "phase tracking needs at least 3 samples, got {}",
            ratio_segment.len()
        )));
    }
    let diffs: Vec<ComplexSample> = ratio_segment
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let mut mags: Vec<f64> = diffs.iter().map(|d| d.norm()).collect();
    let median = {
        let mut sorted = mags.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    };
    let gate = gate_rel * median;

    let mut phases = Vec::with_capacity(diffs.len());
    let mut dropped = 0usize;
    for (d, &mag) in diffs.iter().zip(&mags) {
        if mag == 0.0 || mag < gate {
            dropped += 1;
        } else {
            phases.push(d.arg());
        }
    }
    mags.clear();

    if phases.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} difference samples survived the magnitude gate",
            phases.len()
        )));
    }

    let mut phase_sum = Vec::with_capacity(phases.len());
    phase_sum.push(0.0);
    let mut acc = 0.0;
    for w in phases.windows(2) {
        acc += wrap_phase(w[1] - w[0]);
        phase_sum.push(acc);
    }

    Ok(PhaseTrack {
        phase_sum,
        gated_fraction: dropped as f64 / diffs.len() as f64,
    })
}

/// Topographic prominence of the peak at `idx`: height above the higher
/// of the two basin minima reached before a strictly taller sample. An
/// endpoint peak has only one basin and is measured against it alone.
fn prominence(series: &[f64], idx: usize) -> f64 {
    let peak = series[idx];
    let basin = |iter: &mut dyn Iterator<Item = &f64>| -> Option<f64> {
        let mut min: Option<f64> = None;
        for &v in iter {
            if v > peak {
                break;
            }
            min = Some(min.map_or(v, |m: f64| m.min(v)));
        }
        min
    };
    let left = basin(&mut series[..idx].iter().rev());
    let right = basin(&mut series[idx + 1..].iter());
    let base = match (left, right) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => peak,
    };
    peak - base
}

/// `(index, value)` list of extrema.
pub type Extrema = Vec<(usize, f64)>;

/// Prominent local maxima and minima of a series.
///
/// Maxima are interior samples strictly above both neighbours with
/// prominence at least `prominence_rel × (max − min)`. Minima are found
/// the same way on the negated series, with the endpoints also eligible.
/// A flat series yields no extrema.
pub fn find_extrema(series: &[f64], prominence_rel: f64) -> (Extrema, Extrema) {
    if series.len() < 3 {
        return (Vec::new(), Vec::new());
    }
    let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if range <= 0.0 {
        return (Vec::new(), Vec::new());
    }
    let threshold = prominence_rel * range;

    let mut maxima = Vec::new();
    for i in 1..series.len() - 1 {
        if series[i] > series[i - 1] && series[i] > series[i + 1] {
            let p = prominence(series, i);
            if p >= threshold {
                maxima.push((i, series[i]));
            }
        }
    }

    let negated: Vec<f64> = series.iter().map(|v| -v).collect();
    let mut minima = Vec::new();
    let last = series.len() - 1;
    if negated[0] > negated[1] && prominence(&negated, 0) >= threshold {
        minima.push((0, series[0]));
    }
    for i in 1..last {
        if negated[i] > negated[i - 1] && negated[i] > negated[i + 1] {
            let p = prominence(&negated, i);
            if p >= threshold {
                minima.push((i, series[i]));
            }
        }
    }
    if negated[last] > negated[last - 1] && prominence(&negated, last) >= threshold {
        minima.push((last, series[last]));
    }

    (maxima, minima)
}

/// Classify an extracted pattern.
///
/// Crossing requires exactly one prominent maximum with the series at
/// both window ends at least one prominence threshold below the peak —
/// the rise/peak/fall signature. Two or more maxima read as a turn-back;
/// none as a walk-by.
pub fn classify(pattern: &PhasePattern, prominence_rel: f64) -> BehaviorLabel {
    if pattern.phase_sum.len() < 3 {
        return BehaviorLabel::NoEvent;
    }
    match pattern.maxima.len() {
        0 => BehaviorLabel::WalkBy,
        1 => {
            let s = &pattern.phase_sum;
            let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
            let threshold = prominence_rel * (max - min);
            let peak = pattern.maxima[0].1;
            let ends_low =
                s[0] < peak - threshold && s[s.len() - 1] < peak - threshold;
            if ends_low {
                BehaviorLabel::Crossing
            } else {
                BehaviorLabel::TurnBack
            }
        }
        _ => BehaviorLabel::TurnBack,
    }
}

fn analyze_segment(
    ratio: &[ComplexSample],
    segment: Segment,
    params: &DetectParams,
) -> (BehaviorLabel, PhasePattern) {
    let window = &ratio[segment.start_idx..=segment.end_idx];
    match phase_track(window, params.gate_rel) {
        Ok(track) => {
            let (maxima, minima) = find_extrema(&track.phase_sum, params.prominence_rel);
            let pattern = PhasePattern {
                phase_sum: track.phase_sum,
                maxima,
                minima,
                gated_fraction: track.gated_fraction,
            };
            let label = classify(&pattern, params.prominence_rel);
            (label, pattern)
        }
        Err(Error::InsufficientData(_)) => (BehaviorLabel::NoEvent, PhasePattern::empty()),
        Err(_) => unreachable!("phase_track only fails with InsufficientData"),
    }
}

/// Run the full pipeline on a trace: moving average per antenna, antenna
/// ratio, AGC segmentation, then per-window pattern extraction and
/// classification. One [`Detection`] per activity window.
pub fn detect(trace: &CsiTrace, params: &DetectParams) -> Result<Vec<Detection>> {
    trace.validate()?;
    let n_ant = trace.num_antennas();
    let (pa, pb) = params.primary_pair;
    if pa >= n_ant || pb >= n_ant || pa == pb {
        return Err(Error::InvalidArgument(format!(
            "primary antenna pair ({pa}, {pb}) invalid for {n_ant} antennas"
        )));
    }

    let filtered: Vec<Vec<ComplexSample>> = (0..n_ant)
        .map(|k| moving_average(&trace.antenna_series(k)?, params.ma_window))
        .collect::<Result<_>>()?;
    let ratio = ratio_of(&filtered[pa], &filtered[pb], (pa, pb), trace.sample_rate_hz)?;

    // secondary pair: numerator antenna with the next unused antenna
    let check_pair = (0..n_ant).find(|&k| k != pa && k != pb).map(|k| (pa, k));
    let check_ratio = match check_pair {
        Some((a, b)) => Some(ratio_of(&filtered[a], &filtered[b], (a, b), trace.sample_rate_hz)?),
        None => None,
    };

    let segments = segment_activity(&trace.agc_series(), &params.segmentation)?;

    Ok(segments
        .into_iter()
        .map(|segment| {
            let (label, pattern) = analyze_segment(&ratio.values, segment, params);
            let alt_label = check_ratio
                .as_ref()
                .map(|r| analyze_segment(&r.values, segment, params).0);
            Detection {
                label,
                binary: label == BehaviorLabel::Crossing,
                segment,
                pattern,
                alt_label,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn wrap_phase_half_open_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.3) - 0.3).abs() < 1e-15);
        assert!((wrap_phase(TAU + 0.3) - 0.3).abs() < 1e-12);
        assert!((wrap_phase(-TAU - 0.3) + 0.3).abs() < 1e-12);
    }

    #[test]
    fn phase_track_pure_tone_is_linear() {
        let omega = 0.05;
        let series: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::from_polar(1.0, omega * i as f64))
            .collect();
        let track = phase_track(&series, 0.1).unwrap();
        assert_eq!(track.gated_fraction, 0.0);
        for (k, v) in track.phase_sum.iter().enumerate() {
            assert!(
                (v - omega * k as f64).abs() < 1e-9,
                "index {k}: {v} vs {}",
                omega * k as f64
            );
        }
    }

    #[test]
    fn phase_track_constant_series_is_insufficient() {
        let series = vec![Complex64::new(1.0, 1.0); 100];
        assert!(matches!(
            phase_track(&series, 0.1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn phase_track_needs_three_samples() {
        let series = vec![Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            phase_track(&series, 0.1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn phase_track_invariant_under_rotation() {
        let series: Vec<Complex64> = (0..500)
            .map(|i| {
                let t = i as f64 * 0.01;
                Complex64::new((3.0 * t).sin() + 1.5, (2.0 * t).cos())
            })
            .collect();
        let rot = Complex64::from_polar(1.0, 1.234);
        let rotated: Vec<Complex64> = series.iter().map(|z| z * rot).collect();
        let a = phase_track(&series, 0.1).unwrap();
        let b = phase_track(&rotated, 0.1).unwrap();
        assert_eq!(a.phase_sum.len(), b.phase_sum.len());
        for (x, y) in a.phase_sum.iter().zip(&b.phase_sum) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    fn triangle(n: usize, peak: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                peak * (1.0 - (2.0 * x - 1.0).abs())
            })
            .collect()
    }

    #[test]
    fn extrema_of_triangle() {
        let s = triangle(101, 10.0);
        let (maxima, minima) = find_extrema(&s, 0.15);
        assert_eq!(maxima.len(), 1);
        assert_eq!(maxima[0].0, 50);
        assert_eq!(minima.len(), 2);
        assert_eq!(minima[0].0, 0);
        assert_eq!(minima[1].0, 100);
    }

    #[test]
    fn extrema_of_w_shape() {
        // two equal peaks separated by a deep valley
        let mut s = triangle(101, 10.0);
        s.extend(triangle(101, 10.0));
        let (maxima, _) = find_extrema(&s, 0.15);
        assert_eq!(maxima.len(), 2);
    }

    #[test]
    fn small_ripple_is_suppressed() {
        let n = 401;
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                let tent = 10.0 * (1.0 - (2.0 * x - 1.0).abs());
                tent + 0.3 * (40.0 * x).sin() // ripple prominence << 15% of range
            })
            .collect();
        let (maxima, _) = find_extrema(&s, 0.15);
        assert_eq!(maxima.len(), 1);
    }

    #[test]
    fn flat_series_has_no_extrema() {
        let s = vec![2.0; 50];
        let (maxima, minima) = find_extrema(&s, 0.15);
        assert!(maxima.is_empty());
        assert!(minima.is_empty());
    }

    #[test]
    fn extrema_alternate() {
        // noisy multi-bump series; maxima and minima must interleave
        let s: Vec<f64> = (0..600)
            .map(|i| {
                let t = i as f64 / 100.0;
                (t * 2.1).sin() * 5.0 + (t * 0.7).cos() * 2.0
            })
            .collect();
        let (maxima, minima) = find_extrema(&s, 0.15);
        let mut all: Vec<(usize, bool)> = maxima
            .iter()
            .map(|&(i, _)| (i, true))
            .chain(minima.iter().map(|&(i, _)| (i, false)))
            .collect();
        all.sort_by_key(|&(i, _)| i);
        for w in all.windows(2) {
            assert_ne!(w[0].1, w[1].1, "extrema at {} and {} do not alternate", w[0].0, w[1].0);
        }
    }

    fn pattern_from(series: Vec<f64>, prominence_rel: f64) -> PhasePattern {
        let (maxima, minima) = find_extrema(&series, prominence_rel);
        PhasePattern { phase_sum: series, maxima, minima, gated_fraction: 0.0 }
    }

    #[test]
    fn classify_single_peak_low_ends() {
        let p = pattern_from(triangle(201, 8.0), 0.15);
        assert_eq!(classify(&p, 0.15), BehaviorLabel::Crossing);
    }

    #[test]
    fn classify_no_maxima() {
        // monotone ramp: no interior peak
        let s: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let p = pattern_from(s, 0.15);
        assert_eq!(classify(&p, 0.15), BehaviorLabel::WalkBy);
    }

    #[test]
    fn classify_two_maxima() {
        let mut s = triangle(101, 10.0);
        s.extend(triangle(101, 10.0));
        let p = pattern_from(s, 0.15);
        assert_eq!(classify(&p, 0.15), BehaviorLabel::TurnBack);
    }

    #[test]
    fn classify_high_endpoint_is_not_crossing() {
        // rises and stays up: one maximum-ish shape but no descent
        let mut s: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        s.push(10.05);
        s.push(9.95);
        s.push(10.0);
        let p = pattern_from(s, 0.15);
        assert_ne!(classify(&p, 0.15), BehaviorLabel::Crossing);
    }

    #[test]
    fn classify_empty_pattern_is_no_event() {
        assert_eq!(classify(&PhasePattern::empty(), 0.15), BehaviorLabel::NoEvent);
    }

    #[test]
    fn detect_propagates_short_baseline() {
        use crate::geometry::Geometry;
        use crate::trace::{CsiFrame, CsiTrace};
        use std::collections::BTreeMap;

        let geometry = Geometry::doorway(2.0, 5.24e9).unwrap();
        let trace = CsiTrace {
            geometry,
            sample_rate_hz: 1000.0,
            frames: (0..100)
                .map(|i| CsiFrame {
                    t: i as f64 / 1000.0,
                    agc: 0.0,
                    samples: vec![Complex64::new(1.0, 0.0); 3],
                })
                .collect(),
            meta: BTreeMap::new(),
        };
        assert!(matches!(
            detect(&trace, &DetectParams::default()),
            Err(Error::InsufficientBaseline { .. })
        ));
    }

    #[test]
    fn detect_rejects_bad_antenna_pair() {
        use crate::geometry::Geometry;
        use crate::trace::{CsiFrame, CsiTrace};
        use std::collections::BTreeMap;

        let geometry = Geometry::doorway(2.0, 5.24e9).unwrap();
        let trace = CsiTrace {
            geometry,
            sample_rate_hz: 1000.0,
            frames: vec![CsiFrame {
                t: 0.0,
                agc: 0.0,
                samples: vec![Complex64::new(1.0, 0.0); 3],
            }],
            meta: BTreeMap::new(),
        };
        let params = DetectParams { primary_pair: (0, 5), ..DetectParams::default() };
        assert!(matches!(
            detect(&trace, &params),
            Err(Error::InvalidArgument(_))
        ));
    }
}
